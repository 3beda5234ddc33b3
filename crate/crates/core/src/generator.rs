//! Randomized constructions.
//!
//! The centrepiece is [`listing1`], which builds perturbed permutation sets
//! whose every proper subset is forced to carry a block-permutation structure,
//! so that a primitive outcome is automatically minimally primitive. The
//! other samplers are the baselines used by the surveys.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    check_dimension, extract_perm, BinaryMatrix, ExtractMethod, GeneratorMeta, MatrixSet,
    Permutation, Perturbation, StructureRecord,
};
use crate::primitivity::{self, EqualPartition, PrimitivityVerdict};

/// The portable seeded generator used throughout.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of trial `trial` in a run seeded with `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial
}

/// Rejection budget of [`addone`].
pub const ADDONE_REJECTION_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Block counts `q_1 >= ... >= q_m >= 2`; the dimension is their product.
    pub primes: Vec<usize>,
    #[serde(default = "default_t1")]
    pub t1: usize,
    #[serde(default = "default_method")]
    pub method: ExtractMethod,
    #[serde(default)]
    pub seed: u64,
}

fn default_t1() -> usize {
    1000
}

fn default_method() -> ExtractMethod {
    ExtractMethod::Deterministic
}

impl GeneratorConfig {
    pub fn new(primes: Vec<usize>, method: ExtractMethod, seed: u64) -> Self {
        GeneratorConfig {
            primes,
            t1: default_t1(),
            method,
            seed,
        }
    }

    pub fn validate(&self) -> Result<usize> {
        if self.primes.len() < 2 {
            return Err(Error::InvalidArgument(
                "at least two block counts are required".into(),
            ));
        }
        if self.primes.iter().any(|&q| q < 2) {
            return Err(Error::InvalidArgument("block counts must be >= 2".into()));
        }
        if self.primes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "block counts must be non-increasing".into(),
            ));
        }
        let n = self
            .primes
            .iter()
            .try_fold(1usize, |acc, &q| acc.checked_mul(q))
            .ok_or_else(|| Error::InvalidArgument("dimension overflows".into()))?;
        check_dimension(n)?;
        Ok(n)
    }

    pub fn n(&self) -> Result<usize> {
        self.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorOutcome {
    pub converged: bool,
    pub set: Option<MatrixSet>,
    pub primitive: Option<PrimitivityVerdict>,
}

/// Uniform equal-block partition: shuffle the states and cut the sequence
/// into `q` chunks. Blocks are then numbered by their smallest member.
pub fn sample_equal_partition<R: Rng + ?Sized>(
    n: usize,
    q: usize,
    rng: &mut R,
) -> Result<EqualPartition> {
    if q < 2 || !n.is_multiple_of(q) {
        return Err(Error::InvalidPartition(format!(
            "{q} does not split {n} states into at least two equal blocks"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let size = n / q;
    let mut block_of = vec![0; n];
    for (pos, &x) in order.iter().enumerate() {
        block_of[x] = pos / size;
    }
    let p = EqualPartition::new(block_of)?;
    EqualPartition::new(p.canonical().block_of().to_vec())
}

/// Looks for a block permutation `sigma` such that every block
/// `(i, sigma(i))` of `m` dominates a permutation matrix. On success returns
/// `sigma` and `m` with every entry outside those blocks cleared.
pub fn dom_perm<R: Rng + ?Sized>(
    m: &BinaryMatrix,
    partition: &EqualPartition,
    method: ExtractMethod,
    rng: &mut R,
) -> Result<Option<(Vec<usize>, BinaryMatrix)>> {
    if partition.n() != m.n() {
        return Err(Error::DimensionMismatch {
            left: m.n(),
            right: partition.n(),
        });
    }
    let q = partition.q();
    let blocks = partition.blocks();
    let mut indicator = BinaryMatrix::zeros(q)?;
    for (i, rows) in blocks.iter().enumerate() {
        for (k, cols) in blocks.iter().enumerate() {
            let sub = m.submatrix(rows, cols)?;
            if extract_perm(&sub, method, rng).is_some() {
                indicator.set(i, k, true);
            }
        }
    }
    let Some(sigma) = extract_perm(&indicator, method, rng) else {
        return Ok(None);
    };
    let block_of = partition.block_of();
    let mut masked = m.clone();
    for r in 0..m.n() {
        let keep = sigma.apply(block_of[r]);
        for c in m.row_ones(r) {
            if block_of[c] != keep {
                masked.set(r, c, false);
            }
        }
    }
    Ok(Some((sigma.into_image(), masked)))
}

/// Adds one 1 to one of the permutations without breaking any of the
/// block-permutation structures recorded for it.
///
/// Each attempt draws a matrix uniformly and one of its 0-entries uniformly;
/// the draw is kept once the new 1 lies in the same block as the existing 1
/// of its row for every recorded partition that constrains that matrix.
pub fn addone<R: Rng + ?Sized>(
    perms: &[Permutation],
    meta: &GeneratorMeta,
    rng: &mut R,
) -> Result<(MatrixSet, Perturbation)> {
    addone_with_cap(perms, meta, rng, ADDONE_REJECTION_CAP)
}

pub fn addone_with_cap<R: Rng + ?Sized>(
    perms: &[Permutation],
    meta: &GeneratorMeta,
    rng: &mut R,
    cap: usize,
) -> Result<(MatrixSet, Perturbation)> {
    let m = perms.len();
    let n = perms.first().ok_or(Error::EmptySet)?.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need n >= 2 to add an entry".into()));
    }
    for _ in 0..cap {
        let k = rng.gen_range(0..m);
        let row = rng.gen_range(0..n);
        let existing = perms[k].apply(row);
        let mut col = rng.gen_range(0..n - 1);
        if col >= existing {
            col += 1;
        }
        let compatible = meta
            .structures
            .iter()
            .filter(|s| s.excluded != k)
            .all(|s| s.block_of[col] == s.block_of[existing]);
        if compatible {
            let matrices = perms
                .iter()
                .enumerate()
                .map(|(idx, p)| {
                    let mut mat = p.to_matrix();
                    if idx == k {
                        mat.set(row, col, true);
                    }
                    mat
                })
                .collect();
            let perturbation = Perturbation {
                matrix: k,
                row,
                col,
            };
            let mut meta = meta.clone();
            meta.perturbation = Some(perturbation);
            return Ok((MatrixSet::new(matrices)?.with_meta(meta), perturbation));
        }
    }
    Err(Error::CapExhausted {
        what: "addone rejection",
        cap,
    })
}

/// Randomized construction of perturbed permutation sets in which, for each
/// `j`, the set without matrix `j` has a block-permutation structure on an
/// equal partition into `primes[j]` blocks.
///
/// Starting from all-ones matrices, each round samples a `q_j`-partition (up
/// to `t1` times) until every other matrix admits a compatible block
/// permutation, then masks those matrices to their selected blocks. A
/// permutation is finally extracted from each matrix, one compatible 0-entry
/// is raised to 1, and primitivity is checked.
pub fn listing1<R: Rng + ?Sized>(cfg: &GeneratorConfig, rng: &mut R) -> Result<GeneratorOutcome> {
    listing1_with(cfg, rng, primitivity::BRUTEFORCE_MAX_N)
}

/// [`listing1`] with a bound on the dimension up to which an imprimitivity
/// witness is searched; surveys pass 0.
pub fn listing1_with<R: Rng + ?Sized>(
    cfg: &GeneratorConfig,
    rng: &mut R,
    witness_max_n: usize,
) -> Result<GeneratorOutcome> {
    let n = cfg.validate()?;
    let m = cfg.primes.len();
    let mut matrices = vec![BinaryMatrix::ones(n)?; m];
    let mut structures = Vec::with_capacity(m);

    for (j, &q) in cfg.primes.iter().enumerate() {
        let mut committed = None;
        for _ in 0..cfg.t1 {
            let partition = sample_equal_partition(n, q, rng)?;
            let mut staged = Vec::with_capacity(m - 1);
            for (k, mk) in matrices.iter().enumerate() {
                if k == j {
                    continue;
                }
                match dom_perm(mk, &partition, cfg.method, rng)? {
                    Some((sigma, masked)) => staged.push((k, sigma, masked)),
                    None => break,
                }
            }
            if staged.len() == m - 1 {
                committed = Some((partition, staged));
                break;
            }
        }
        let Some((partition, staged)) = committed else {
            return Ok(GeneratorOutcome {
                converged: false,
                set: None,
                primitive: None,
            });
        };
        let mut sigmas = vec![None; m];
        for (k, sigma, masked) in staged {
            matrices[k] = masked;
            sigmas[k] = Some(sigma);
        }
        structures.push(StructureRecord {
            excluded: j,
            q,
            block_of: partition.block_of().to_vec(),
            sigmas,
        });
    }

    let perms = matrices
        .iter()
        .map(|mk| {
            extract_perm(mk, cfg.method, rng).ok_or_else(|| {
                Error::Precondition("masked matrix no longer dominates a permutation".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = GeneratorMeta {
        structures,
        perturbation: None,
    };
    let (set, _) = addone(&perms, &meta, rng)?;
    let verdict = primitivity::verdict(&set, witness_max_n)?;
    Ok(GeneratorOutcome {
        converged: true,
        set: Some(set),
        primitive: Some(verdict),
    })
}

/// One uniform permutation and one uniform letter of rank `n - 1`.
///
/// The rank `n - 1` letter is drawn exactly: a uniform pair `{a, b}` is
/// merged, and the resulting `n - 1` classes (ordered by smallest member) are
/// sent injectively to a uniform ordered selection of `n - 1` targets. Each
/// map of image size `n - 1` arises from exactly one such choice.
pub fn method1_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MatrixSet> {
    if n < 2 {
        return Err(Error::InvalidArgument("method 1 needs n >= 2".into()));
    }
    let perm = Permutation::random(n, rng);
    let letter = rank_deficient_letter(n, rng);
    MatrixSet::new(vec![
        perm.to_matrix(),
        BinaryMatrix::from_function(&letter)?,
    ])
}

pub(crate) fn rank_deficient_letter<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let pair = rng.gen_range(0..n * (n - 1) / 2);
    // Unrank pair index into a < b.
    let (mut a, mut rest) = (0, pair);
    while rest >= n - 1 - a {
        rest -= n - 1 - a;
        a += 1;
    }
    let b = a + 1 + rest;
    let mut targets: Vec<usize> = (0..n).collect();
    targets.shuffle(rng);
    let mut class = 0;
    let mut f = vec![0; n];
    for x in 0..n {
        if x == b {
            f[x] = f[a];
            continue;
        }
        f[x] = targets[class];
        class += 1;
    }
    f
}

/// `m` uniform permutations, one of which (chosen uniformly) gets one of its
/// 0-entries (chosen uniformly) raised to 1.
pub fn procedure1_sample<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<MatrixSet> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidArgument(
            "random perturbed permutation sets need n >= 2 and m >= 2".into(),
        ));
    }
    let perms: Vec<Permutation> = (0..m).map(|_| Permutation::random(n, rng)).collect();
    let k = rng.gen_range(0..m);
    let row = rng.gen_range(0..n);
    let existing = perms[k].apply(row);
    let mut col = rng.gen_range(0..n - 1);
    if col >= existing {
        col += 1;
    }
    let matrices = perms
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let mut mat = p.to_matrix();
            if idx == k {
                mat.set(row, col, true);
            }
            mat
        })
        .collect();
    MatrixSet::new(matrices)
}

/// `m` independent matrices with i.i.d. Bernoulli(`p`) entries.
pub fn random_binary_set<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    p: f64,
    rng: &mut R,
) -> Result<MatrixSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    if m == 0 {
        return Err(Error::EmptySet);
    }
    let mut matrices = Vec::with_capacity(m);
    for _ in 0..m {
        let mut mat = BinaryMatrix::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                if rng.gen_bool(p) {
                    mat.set(i, j, true);
                }
            }
        }
        matrices.push(mat);
    }
    MatrixSet::new(matrices)
}
