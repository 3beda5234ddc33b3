//! Boolean matrices, permutations and matrix sets.
//!
//! Matrices are stored as bit-packed rows: bit `j` of row `i` is entry
//! `(i, j)`. Bits past column `n - 1` are always zero, so whole-word
//! comparisons and popcounts are exact.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on matrix dimension.
pub const DEFAULT_MAX_DIM: usize = 4096;

const WORD: usize = 64;

/// The configured dimension cap. `SYNCHRO_MAX_N` overrides the default.
pub fn max_dimension() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("SYNCHRO_MAX_N")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_DIM)
    })
}

pub(crate) fn check_dimension(n: usize) -> Result<()> {
    let max = max_dimension();
    if n == 0 || n > max {
        return Err(Error::DimensionOutOfRange { n, max });
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(
    try_from = "crate::format::MatrixRepr",
    into = "crate::format::MatrixRepr"
)]
pub struct BinaryMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        check_dimension(n)?;
        let stride = n.div_ceil(WORD);
        Ok(BinaryMatrix {
            n,
            stride,
            words: vec![0; n * stride],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.set(i, i, true);
        }
        Ok(m)
    }

    pub fn ones(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    /// Builds a matrix from per-row lists of column indices holding a 1.
    pub fn from_rows(n: usize, rows: &[Vec<usize>]) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: rows.len(),
            });
        }
        let mut m = Self::zeros(n)?;
        for (i, row) in rows.iter().enumerate() {
            for &j in row {
                if j >= n {
                    return Err(Error::InvalidArgument(format!(
                        "column index {j} out of range in row {i} (n = {n})"
                    )));
                }
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    /// Builds a matrix from a dense 0/1 table.
    pub fn from_dense<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Binary row-stochastic matrix of a total function on `0..n`.
    pub fn from_function(f: &[usize]) -> Result<Self> {
        let n = f.len();
        let mut m = Self::zeros(n)?;
        for (i, &j) in f.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidArgument(format!(
                    "function value {j} out of range (n = {n})"
                )));
            }
            m.set(i, j, true);
        }
        Ok(m)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        (self.words[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.n && j < self.n);
        let w = &mut self.words[i * self.stride + j / WORD];
        let bit = 1u64 << (j % WORD);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    /// Column indices of the 1s in row `i`, ascending.
    pub fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        ones_in_words(self.row_words(i))
    }

    /// Row indices of the 1s in column `j`, ascending.
    pub fn col_ones(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.get(i, j))
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.row_words(i)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn col_count(&self, j: usize) -> usize {
        (0..self.n).filter(|&i| self.get(i, j)).count()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Per-row ascending column lists; the serialized form.
    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|i| self.row_ones(i).collect()).collect()
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = BinaryMatrix {
            n: self.n,
            stride: self.stride,
            words: vec![0; self.words.len()],
        };
        for i in 0..self.n {
            for j in self.row_ones(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Boolean product: row `i` of the result is the OR of the rows of
    /// `other` selected by the 1s of row `i` of `self`.
    pub fn product(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        self.check_same_dim(other)?;
        let mut out = BinaryMatrix {
            n: self.n,
            stride: self.stride,
            words: vec![0; self.words.len()],
        };
        for i in 0..self.n {
            let dst = i * self.stride;
            for k in self.row_ones(i) {
                let src = other.row_words(k);
                for (d, s) in out.words[dst..dst + self.stride].iter_mut().zip(src) {
                    *d |= *s;
                }
            }
        }
        Ok(out)
    }

    /// Entrywise `self >= other`.
    pub fn dominates(&self, other: &BinaryMatrix) -> Result<bool> {
        self.check_same_dim(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| b & !a == 0))
    }

    /// Entrywise OR.
    pub fn union(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (d, s) in out.words.iter_mut().zip(&other.words) {
            *d |= *s;
        }
        Ok(out)
    }

    /// No zero row and no zero column.
    pub fn is_nz(&self) -> bool {
        let mut cols = vec![0u64; self.stride];
        for i in 0..self.n {
            let row = self.row_words(i);
            if row.iter().all(|&w| w == 0) {
                return false;
            }
            for (c, w) in cols.iter_mut().zip(row) {
                *c |= *w;
            }
        }
        cols.iter().map(|w| w.count_ones() as usize).sum::<usize>() == self.n
    }

    pub fn has_zero_row(&self) -> Option<usize> {
        (0..self.n).find(|&i| self.row_words(i).iter().all(|&w| w == 0))
    }

    pub fn is_all_ones(&self) -> bool {
        self.count_ones() == self.n * self.n
    }

    /// Every row holds exactly one 1.
    pub fn as_function(&self) -> Option<Vec<usize>> {
        (0..self.n)
            .map(|i| {
                let mut it = self.row_ones(i);
                match (it.next(), it.next()) {
                    (Some(j), None) => Some(j),
                    _ => None,
                }
            })
            .collect()
    }

    pub fn as_permutation(&self) -> Option<Permutation> {
        self.as_function().and_then(|f| Permutation::new(f).ok())
    }

    /// The submatrix on the given row and column index lists (in that order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<BinaryMatrix> {
        if rows.len() != cols.len() {
            return Err(Error::DimensionMismatch {
                left: rows.len(),
                right: cols.len(),
            });
        }
        let mut sub = BinaryMatrix::zeros(rows.len())?;
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    sub.set(a, b, true);
                }
            }
        }
        Ok(sub)
    }

    fn check_same_dim(&self, other: &BinaryMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix({})", self.n)?;
        for i in 0..self.n {
            let line: String = (0..self.n)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

pub(crate) fn ones_in_words(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            }
        })
    })
}

pub fn bool_product(a: &BinaryMatrix, b: &BinaryMatrix) -> Result<BinaryMatrix> {
    a.product(b)
}

pub fn dominates(a: &BinaryMatrix, b: &BinaryMatrix) -> Result<bool> {
    a.dominates(b)
}

pub fn is_nz(m: &BinaryMatrix) -> bool {
    m.is_nz()
}

/// A bijection on `0..n`, stored as its image table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty".into()));
        }
        let mut seen = vec![false; n];
        for &x in &image {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!(
                    "{image:?} is not a bijection on 0..{n}"
                )));
            }
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// Uniform over the symmetric group.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(rng);
        Permutation { image }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn into_image(self) -> Vec<usize> {
        self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { image: inv }
    }

    /// `x -> other(self(x))`, i.e. the matrix product `self · other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            image: self.image.iter().map(|&j| other.image[j]).collect(),
        }
    }

    pub fn is_involution(&self) -> bool {
        self.image
            .iter()
            .enumerate()
            .all(|(i, &j)| self.image[j] == i)
    }

    pub fn to_matrix(&self) -> BinaryMatrix {
        BinaryMatrix::from_function(&self.image).expect("permutation within dimension cap")
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(image: Vec<usize>) -> Result<Self> {
        Permutation::new(image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.image
    }
}

/// A permutation matrix with one extra 1 at `(row, col)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbedPermutation {
    base: Permutation,
    row: usize,
    col: usize,
}

impl PerturbedPermutation {
    pub fn new(base: Permutation, row: usize, col: usize) -> Result<Self> {
        let n = base.len();
        if row >= n || col >= n {
            return Err(Error::InvalidArgument(format!(
                "perturbation ({row}, {col}) out of range (n = {n})"
            )));
        }
        if base.apply(row) == col {
            return Err(Error::InvalidArgument(format!(
                "entry ({row}, {col}) is already a 1 of the base permutation"
            )));
        }
        Ok(PerturbedPermutation { base, row, col })
    }

    pub fn base(&self) -> &Permutation {
        &self.base
    }

    pub fn extra(&self) -> (usize, usize) {
        (self.row, self.col)
    }

    pub fn to_matrix(&self) -> BinaryMatrix {
        let mut m = self.base.to_matrix();
        m.set(self.row, self.col, true);
        m
    }

    /// The rank `n - 1` letter: the base permutation with row `row` redirected
    /// to `col`.
    pub fn merging_letter(&self) -> Vec<usize> {
        let mut f = self.base.image().to_vec();
        f[self.row] = self.col;
        f
    }
}

/// Rule used to pick a 1-entry during permutation extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtractMethod {
    /// Uniformly random 1-entry of the selected line ("method 2").
    Random,
    /// First 1-entry of the selected line ("method 3").
    Deterministic,
}

impl ExtractMethod {
    /// The numeric label used in survey output (2 or 3).
    pub fn label(self) -> u8 {
        match self {
            ExtractMethod::Random => 2,
            ExtractMethod::Deterministic => 3,
        }
    }
}

impl FromStr for ExtractMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "2" | "random" => Ok(ExtractMethod::Random),
            "3" | "deterministic" | "det" => Ok(ExtractMethod::Deterministic),
            other => Err(Error::InvalidArgument(format!(
                "unknown extraction method {other:?}"
            ))),
        }
    }
}

/// Extracts a permutation matrix dominated by `m`, if there is one.
///
/// At every step the live row or column with the fewest 1s is selected
/// (rows are scanned before columns, lower index first, so ties go to the
/// earliest row). A count of zero means no dominated permutation exists.
/// Otherwise one 1-entry of that line is kept according to `method`, the rest
/// of its row and column is cleared, and both are retired. Indices stay in
/// the original coordinates throughout.
pub fn extract_perm<R: Rng + ?Sized>(
    m: &BinaryMatrix,
    method: ExtractMethod,
    rng: &mut R,
) -> Option<Permutation> {
    let n = m.n();
    let mut work = m.clone();
    let mut row_cnt: Vec<usize> = (0..n).map(|i| work.row_count(i)).collect();
    let mut col_cnt: Vec<usize> = (0..n).map(|j| work.col_count(j)).collect();
    let mut row_live = vec![true; n];
    let mut col_live = vec![true; n];
    let mut image = vec![usize::MAX; n];

    for _ in 0..n {
        let mut best: Option<(usize, bool, usize)> = None;
        for (i, &c) in row_cnt.iter().enumerate() {
            if row_live[i] && best.is_none_or(|(b, _, _)| c < b) {
                best = Some((c, false, i));
            }
        }
        for (j, &c) in col_cnt.iter().enumerate() {
            if col_live[j] && best.is_none_or(|(b, _, _)| c < b) {
                best = Some((c, true, j));
            }
        }
        let (count, is_col, line) = best.expect("at least one live line");
        if count == 0 {
            return None;
        }
        let candidates: Vec<usize> = if is_col {
            work.col_ones(line).collect()
        } else {
            work.row_ones(line).collect()
        };
        let pick = match method {
            ExtractMethod::Deterministic => candidates[0],
            ExtractMethod::Random => candidates[rng.gen_range(0..candidates.len())],
        };
        let (r, c) = if is_col { (pick, line) } else { (line, pick) };

        let others: Vec<usize> = work.row_ones(r).filter(|&x| x != c).collect();
        for x in others {
            work.set(r, x, false);
            col_cnt[x] -= 1;
        }
        let others: Vec<usize> = work.col_ones(c).filter(|&x| x != r).collect();
        for x in others {
            work.set(x, c, false);
            row_cnt[x] -= 1;
        }
        row_live[r] = false;
        col_live[c] = false;
        image[r] = c;
    }
    Some(Permutation { image })
}

/// Extraction with the deterministic rule; a pure function of `m`.
pub fn extract_perm_deterministic(m: &BinaryMatrix) -> Option<Permutation> {
    extract_perm(
        m,
        ExtractMethod::Deterministic,
        &mut rand::rngs::mock::StepRng::new(0, 0),
    )
}

/// Perfect matching in the row/column bipartite graph of `m`
/// (augmenting paths). Independent check for [`extract_perm`].
pub fn matching_oracle(m: &BinaryMatrix) -> bool {
    maximum_matching(m).iter().all(Option::is_some)
}

/// Maximum bipartite matching (Kuhn's algorithm); `result[row] = Some(col)`.
pub fn maximum_matching(m: &BinaryMatrix) -> Vec<Option<usize>> {
    fn augment(
        u: usize,
        m: &BinaryMatrix,
        visited: &mut [bool],
        match_col: &mut [Option<usize>],
    ) -> bool {
        for c in m.row_ones(u) {
            if visited[c] {
                continue;
            }
            visited[c] = true;
            let free = match match_col[c] {
                None => true,
                Some(w) => augment(w, m, visited, match_col),
            };
            if free {
                match_col[c] = Some(u);
                return true;
            }
        }
        false
    }

    let n = m.n();
    let mut match_col: Vec<Option<usize>> = vec![None; n];
    for r in 0..n {
        let mut visited = vec![false; n];
        augment(r, m, &mut visited, &mut match_col);
    }
    let mut row_match = vec![None; n];
    for (c, r) in match_col.iter().enumerate() {
        if let Some(r) = r {
            row_match[*r] = Some(c);
        }
    }
    row_match
}

/// One recorded block-permutation structure from the generator: the partition
/// built while matrix `excluded` was left out, and the block permutation each
/// other matrix follows on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureRecord {
    pub excluded: usize,
    pub q: usize,
    pub block_of: Vec<usize>,
    /// `sigmas[k]` is the block permutation of matrix `k`; `None` for the
    /// excluded matrix.
    pub sigmas: Vec<Option<Vec<usize>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    pub matrix: usize,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorMeta {
    pub structures: Vec<StructureRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
}

/// A nonempty ordered list of same-size matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "crate::format::SetRepr", into = "crate::format::SetRepr")]
pub struct MatrixSet {
    matrices: Vec<BinaryMatrix>,
    meta: Option<GeneratorMeta>,
}

/// A set of permutation matrices where exactly one matrix carries one extra 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbedPermutationSet {
    pub perms: Vec<Permutation>,
    pub perturbed_index: usize,
    pub perturbed: PerturbedPermutation,
}

impl MatrixSet {
    pub fn new(matrices: Vec<BinaryMatrix>) -> Result<Self> {
        let first = matrices.first().ok_or(Error::EmptySet)?;
        let n = first.n();
        if let Some(bad) = matrices.iter().find(|m| m.n() != n) {
            return Err(Error::DimensionMismatch {
                left: n,
                right: bad.n(),
            });
        }
        Ok(MatrixSet {
            matrices,
            meta: None,
        })
    }

    pub fn with_meta(mut self, meta: GeneratorMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn n(&self) -> usize {
        self.matrices[0].n()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matrices(&self) -> &[BinaryMatrix] {
        &self.matrices
    }

    pub fn meta(&self) -> Option<&GeneratorMeta> {
        self.meta.as_ref()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BinaryMatrix> {
        self.matrices.iter()
    }

    pub fn is_nz(&self) -> bool {
        self.matrices.iter().all(BinaryMatrix::is_nz)
    }

    pub fn check_nz(&self) -> Result<()> {
        match self.matrices.iter().position(|m| !m.is_nz()) {
            Some(index) => Err(Error::NotNz { index }),
            None => Ok(()),
        }
    }

    /// Entrywise OR of all matrices (the support of their sum).
    pub fn boolean_sum(&self) -> BinaryMatrix {
        let mut acc = self.matrices[0].clone();
        for m in &self.matrices[1..] {
            acc = acc.union(m).expect("uniform dimension");
        }
        acc
    }

    pub fn transpose(&self) -> MatrixSet {
        MatrixSet {
            matrices: self.matrices.iter().map(BinaryMatrix::transpose).collect(),
            meta: None,
        }
    }

    /// The set with matrix `index` removed; `None` if that would leave it empty.
    pub fn without(&self, index: usize) -> Option<MatrixSet> {
        if self.len() < 2 || index >= self.len() {
            return None;
        }
        let matrices = self
            .matrices
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != index)
            .map(|(_, m)| m.clone())
            .collect();
        Some(MatrixSet {
            matrices,
            meta: None,
        })
    }

    /// Recognizes a perturbed permutation set.
    pub fn as_perturbed_permutation_set(&self) -> Option<PerturbedPermutationSet> {
        let n = self.n();
        let mut perms = Vec::with_capacity(self.len());
        let mut perturbed = None;
        for (k, m) in self.matrices.iter().enumerate() {
            if let Some(p) = m.as_permutation() {
                perms.push(p);
                continue;
            }
            if perturbed.is_some() || m.count_ones() != n + 1 {
                return None;
            }
            let row = (0..n).find(|&i| m.row_count(i) == 2)?;
            // The base keeps the 1 whose column has no other 1.
            let (a, b) = {
                let mut it = m.row_ones(row);
                (it.next()?, it.next()?)
            };
            let (keep, extra) = if m.col_count(a) == 1 { (a, b) } else { (b, a) };
            let mut f = m.as_function_except(row)?;
            f[row] = keep;
            let base = Permutation::new(f).ok()?;
            perms.push(base.clone());
            perturbed = Some((k, PerturbedPermutation::new(base, row, extra).ok()?));
        }
        let (perturbed_index, perturbed) = perturbed?;
        Some(PerturbedPermutationSet {
            perms,
            perturbed_index,
            perturbed,
        })
    }
}

impl BinaryMatrix {
    fn as_function_except(&self, skip: usize) -> Option<Vec<usize>> {
        (0..self.n)
            .map(|i| {
                if i == skip {
                    return Some(0);
                }
                let mut it = self.row_ones(i);
                match (it.next(), it.next()) {
                    (Some(j), None) => Some(j),
                    _ => None,
                }
            })
            .collect()
    }
}

impl PerturbedPermutationSet {
    pub fn to_matrix_set(&self) -> MatrixSet {
        let matrices = self
            .perms
            .iter()
            .enumerate()
            .map(|(k, p)| {
                if k == self.perturbed_index {
                    self.perturbed.to_matrix()
                } else {
                    p.to_matrix()
                }
            })
            .collect();
        MatrixSet::new(matrices).expect("nonempty uniform set")
    }
}

impl<'a> IntoIterator for &'a MatrixSet {
    type Item = &'a BinaryMatrix;
    type IntoIter = std::slice::Iter<'a, BinaryMatrix>;
    fn into_iter(self) -> Self::IntoIter {
        self.matrices.iter()
    }
}
