//! Complete deterministic automata, square graphs and reset thresholds.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_dimension, BinaryMatrix, MatrixSet, Permutation};

/// Default cap on letters produced by [`associated_automaton`].
pub const DEFAULT_LETTER_CAP: usize = 10_000;

/// Default cap on visited subsets in [`reset_threshold_exact`].
pub const DEFAULT_STATE_CAP: usize = 1 << 26;

/// Largest state count handled by the subset search (one machine word).
pub const SUBSET_MAX_N: usize = 64;

/// `n` states and `m >= 1` letters, each a total function on the states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AutomatonRepr", into = "AutomatonRepr")]
pub struct Automaton {
    n: usize,
    letters: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct AutomatonRepr {
    n: usize,
    letters: Vec<Vec<usize>>,
}

impl TryFrom<AutomatonRepr> for Automaton {
    type Error = Error;
    fn try_from(r: AutomatonRepr) -> Result<Self> {
        Automaton::new(r.n, r.letters)
    }
}

impl From<Automaton> for AutomatonRepr {
    fn from(a: Automaton) -> Self {
        AutomatonRepr {
            n: a.n,
            letters: a.letters,
        }
    }
}

impl Automaton {
    pub fn new(n: usize, letters: Vec<Vec<usize>>) -> Result<Self> {
        check_dimension(n)?;
        if letters.is_empty() {
            return Err(Error::InvalidAutomaton("no letters".into()));
        }
        for (k, f) in letters.iter().enumerate() {
            if f.len() != n {
                return Err(Error::InvalidAutomaton(format!(
                    "letter {k} has {} entries, expected {n}",
                    f.len()
                )));
            }
            if let Some(&bad) = f.iter().find(|&&x| x >= n) {
                return Err(Error::InvalidAutomaton(format!(
                    "letter {k} maps to {bad}, outside 0..{n}"
                )));
            }
        }
        Ok(Automaton { n, letters })
    }

    /// Reads each matrix as a binary row-stochastic letter.
    pub fn from_matrix_set(s: &MatrixSet) -> Result<Self> {
        let letters = s
            .iter()
            .enumerate()
            .map(|(k, m)| {
                m.as_function().ok_or_else(|| {
                    Error::InvalidAutomaton(format!("matrix {k} is not row-stochastic"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Automaton::new(s.n(), letters)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Vec<usize>] {
        &self.letters
    }

    pub fn letter(&self, k: usize) -> &[usize] {
        &self.letters[k]
    }

    pub fn letter_matrix(&self, k: usize) -> BinaryMatrix {
        BinaryMatrix::from_function(&self.letters[k]).expect("validated letter")
    }

    pub fn to_matrix_set(&self) -> MatrixSet {
        MatrixSet::new(
            (0..self.num_letters())
                .map(|k| self.letter_matrix(k))
                .collect(),
        )
        .expect("nonempty")
    }

    /// The automaton with letter `k` removed; `None` if it is the only one.
    pub fn without_letter(&self, k: usize) -> Option<Automaton> {
        if self.letters.len() < 2 || k >= self.letters.len() {
            return None;
        }
        let mut letters = self.letters.clone();
        letters.remove(k);
        Some(Automaton { n: self.n, letters })
    }

    /// Renames state `x` to `relabel(x)` in every letter.
    pub fn relabel(&self, relabel: &Permutation) -> Automaton {
        let letters = self
            .letters
            .iter()
            .map(|f| {
                let mut g = vec![0; self.n];
                for (x, &fx) in f.iter().enumerate() {
                    g[relabel.apply(x)] = relabel.apply(fx);
                }
                g
            })
            .collect();
        Automaton { n: self.n, letters }
    }

    /// Letter set equality, ignoring order and multiplicity.
    pub fn same_letters(&self, other: &Automaton) -> bool {
        let a: HashSet<&Vec<usize>> = self.letters.iter().collect();
        let b: HashSet<&Vec<usize>> = other.letters.iter().collect();
        self.n == other.n && a == b
    }
}

/// All binary row-stochastic letters dominated by some matrix of the set,
/// deduplicated, in order of source matrix and then lexicographic choice.
pub fn associated_automaton(s: &MatrixSet) -> Result<Automaton> {
    associated_automaton_with_cap(s, DEFAULT_LETTER_CAP)
}

pub fn associated_automaton_with_cap(s: &MatrixSet, letter_cap: usize) -> Result<Automaton> {
    let n = s.n();
    let mut total: usize = 0;
    for (index, m) in s.iter().enumerate() {
        if let Some(row) = m.has_zero_row() {
            return Err(Error::ZeroRow { index, row });
        }
        let count = (0..n).try_fold(1usize, |acc, i| acc.checked_mul(m.row_count(i)));
        total = count
            .and_then(|c| total.checked_add(c))
            .filter(|&t| t <= letter_cap)
            .ok_or(Error::CapExhausted {
                what: "associated-automaton letter",
                cap: letter_cap,
            })?;
    }

    let mut seen = HashSet::new();
    let mut letters = Vec::with_capacity(total);
    for m in s {
        let choices: Vec<Vec<usize>> = (0..n).map(|i| m.row_ones(i).collect()).collect();
        let mut digits = vec![0usize; n];
        'enumerate: loop {
            let f: Vec<usize> = (0..n).map(|i| choices[i][digits[i]]).collect();
            if seen.insert(f.clone()) {
                letters.push(f);
            }
            // Odometer with the last row varying fastest.
            let mut i = n;
            loop {
                if i == 0 {
                    break 'enumerate;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < choices[i].len() {
                    continue 'enumerate;
                }
                digits[i] = 0;
            }
        }
    }
    Automaton::new(n, letters)
}

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

/// The pair graph of an automaton: one vertex per unordered pair `{i, j}`
/// (including singletons `{i, i}`) and, for every letter, the edge to the
/// pair of images.
#[derive(Clone, Debug)]
pub struct SquareGraph {
    n: usize,
    m: usize,
    vertices: Vec<(usize, usize)>,
    succ: Vec<u32>,
}

impl SquareGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_letters(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Vertex `v` as its pair `(i, j)` with `i <= j`.
    pub fn vertex(&self, v: usize) -> (usize, usize) {
        self.vertices[v]
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        pair_index(i, j)
    }

    pub fn is_singleton(&self, v: usize) -> bool {
        let (i, j) = self.vertices[v];
        i == j
    }

    pub fn successor(&self, v: usize, letter: usize) -> usize {
        self.succ[v * self.m + letter] as usize
    }

    fn predecessors(&self) -> (Vec<usize>, Vec<u32>) {
        let v_count = self.vertex_count();
        let mut offsets = vec![0usize; v_count + 1];
        for &t in &self.succ {
            offsets[t as usize + 1] += 1;
        }
        for v in 0..v_count {
            offsets[v + 1] += offsets[v];
        }
        let mut fill = offsets.clone();
        let mut preds = vec![0u32; self.succ.len()];
        for (e, &t) in self.succ.iter().enumerate() {
            let t = t as usize;
            preds[fill[t]] = (e / self.m) as u32;
            fill[t] += 1;
        }
        (offsets, preds)
    }

    /// Shortest distance from every vertex to the nearest singleton.
    pub fn distances_to_singletons(&self) -> Vec<Option<usize>> {
        let (offsets, preds) = self.predecessors();
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for (v, d) in dist.iter_mut().enumerate() {
            if self.is_singleton(v) {
                *d = Some(0);
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued vertices have a distance") + 1;
            for &u in &preds[offsets[v]..offsets[v + 1]] {
                let u = u as usize;
                if dist[u].is_none() {
                    dist[u] = Some(d);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    fn bfs_from(&self, source: usize, dist: &mut [u32]) -> u32 {
        dist.fill(u32::MAX);
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        let mut far = 0;
        while let Some(v) = queue.pop_front() {
            let d = dist[v] + 1;
            for letter in 0..self.m {
                let w = self.successor(v, letter);
                if dist[w] == u32::MAX {
                    dist[w] = d;
                    far = d;
                    queue.push_back(w);
                }
            }
        }
        far
    }
}

pub fn square_graph(a: &Automaton) -> SquareGraph {
    let n = a.n();
    let m = a.num_letters();
    let v_count = n * (n + 1) / 2;
    let mut vertices = vec![(0, 0); v_count];
    for j in 0..n {
        for i in 0..=j {
            vertices[pair_index(i, j)] = (i, j);
        }
    }
    let mut succ = vec![0u32; v_count * m];
    for (v, &(i, j)) in vertices.iter().enumerate() {
        for (k, f) in a.letters().iter().enumerate() {
            succ[v * m + k] = pair_index(f[i], f[j]) as u32;
        }
    }
    SquareGraph {
        n,
        m,
        vertices,
        succ,
    }
}

/// Every pair of states can be merged by some word.
pub fn is_synchronizing(a: &Automaton) -> bool {
    square_graph(a)
        .distances_to_singletons()
        .iter()
        .all(Option::is_some)
}

/// Synchronization of the associated automaton of an NZ set, decided on its
/// pair graph without enumerating letters: for `i != j`, some letter of the
/// associated automaton sends `{i, j}` to `{i', j'}` exactly when a single
/// matrix has 1s at `(i, i')` and `(j, j')`.
pub fn associated_is_synchronizing(s: &MatrixSet) -> bool {
    let n = s.n();
    let columns: Vec<Vec<Vec<usize>>> = s
        .iter()
        .map(|m| {
            let t = m.transpose();
            (0..n).map(|c| t.row_ones(c).collect()).collect()
        })
        .collect();
    let v_count = n * (n + 1) / 2;
    let mut seen = vec![false; v_count];
    let mut queue = VecDeque::with_capacity(v_count);
    for i in 0..n {
        let v = pair_index(i, i);
        seen[v] = true;
        queue.push_back((i, i));
    }
    let mut reached = n;
    while let Some((a, b)) = queue.pop_front() {
        for cols in &columns {
            for &i in &cols[a] {
                for &j in &cols[b] {
                    let v = pair_index(i, j);
                    if !seen[v] {
                        seen[v] = true;
                        reached += 1;
                        queue.push_back((i.min(j), i.max(j)));
                    }
                }
            }
        }
        if reached == v_count {
            return true;
        }
    }
    reached == v_count
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterReport {
    /// Largest distance from a non-singleton pair to the nearest singleton;
    /// `None` when some pair cannot be merged.
    pub sync_eccentricity: Option<usize>,
    /// Largest shortest-path length over ordered pairs of vertices with a
    /// path between them.
    pub pair_diameter: usize,
}

pub fn diameters(a: &Automaton) -> DiameterReport {
    let g = square_graph(a);
    let dist = g.distances_to_singletons();
    let sync_eccentricity = dist.iter().try_fold(0usize, |acc, d| d.map(|d| acc.max(d)));
    let mut scratch = vec![0u32; g.vertex_count()];
    let pair_diameter = (0..g.vertex_count())
        .map(|v| g.bfs_from(v, &mut scratch))
        .max()
        .unwrap_or(0) as usize;
    DiameterReport {
        sync_eccentricity,
        pair_diameter,
    }
}

/// Only the synchronization eccentricity; skips the all-pairs search.
pub fn sync_eccentricity(a: &Automaton) -> Option<usize> {
    square_graph(a)
        .distances_to_singletons()
        .iter()
        .try_fold(0usize, |acc, d| d.map(|d| acc.max(d)))
}

fn subset_tables(a: &Automaton) -> Result<Vec<Vec<u64>>> {
    let n = a.n();
    if n > SUBSET_MAX_N {
        return Err(Error::DimensionOutOfRange {
            n,
            max: SUBSET_MAX_N,
        });
    }
    Ok(a.letters()
        .iter()
        .map(|f| f.iter().map(|&y| 1u64 << y).collect())
        .collect())
}

#[inline]
fn image(table: &[u64], mut set: u64) -> u64 {
    let mut out = 0;
    while set != 0 {
        let x = set.trailing_zeros() as usize;
        set &= set - 1;
        out |= table[x];
    }
    out
}

fn full_set(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Length of the shortest synchronizing word, by breadth-first search over
/// subsets reachable from the full state set.
///
/// `Ok(None)` means the automaton is not synchronizing (checked up front on
/// the square graph). Visiting more than `state_cap` subsets is an error.
pub fn reset_threshold_exact(a: &Automaton, state_cap: usize) -> Result<Option<usize>> {
    let tables = subset_tables(a)?;
    if !is_synchronizing(a) {
        return Ok(None);
    }
    let start = full_set(a.n());
    if start.count_ones() == 1 {
        return Ok(Some(0));
    }
    let mut seen: HashSet<u64> = HashSet::from([start]);
    let mut frontier = vec![start];
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &set in &frontier {
            for table in &tables {
                let img = image(table, set);
                if img.count_ones() == 1 {
                    return Ok(Some(depth));
                }
                if seen.insert(img) {
                    if seen.len() > state_cap {
                        return Err(Error::CapExhausted {
                            what: "reset-threshold subset",
                            cap: state_cap,
                        });
                    }
                    next.push(img);
                }
            }
        }
        frontier = next;
    }
    unreachable!("synchronizing automaton always reaches a singleton")
}

/// A shortest synchronizing word (letter indices), with the same search as
/// [`reset_threshold_exact`] plus parent links.
pub fn shortest_reset_word(a: &Automaton, state_cap: usize) -> Result<Option<Vec<usize>>> {
    let tables = subset_tables(a)?;
    if !is_synchronizing(a) {
        return Ok(None);
    }
    let start = full_set(a.n());
    if start.count_ones() == 1 {
        return Ok(Some(Vec::new()));
    }
    let mut parent: HashMap<u64, (u64, usize)> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    parent.insert(start, (start, usize::MAX));
    while let Some(set) = queue.pop_front() {
        for (k, table) in tables.iter().enumerate() {
            let img = image(table, set);
            if parent.contains_key(&img) {
                continue;
            }
            parent.insert(img, (set, k));
            if img.count_ones() == 1 {
                let mut word = Vec::new();
                let mut cur = img;
                while cur != start {
                    let (prev, letter) = parent[&cur];
                    word.push(letter);
                    cur = prev;
                }
                word.reverse();
                return Ok(Some(word));
            }
            if parent.len() > state_cap {
                return Err(Error::CapExhausted {
                    what: "reset-threshold subset",
                    cap: state_cap,
                });
            }
            queue.push_back(img);
        }
    }
    unreachable!("synchronizing automaton always reaches a singleton")
}

/// Synchronizing, and no automaton obtained by dropping one letter is.
pub fn is_minimally_synchronizing(a: &Automaton) -> Result<bool> {
    if !is_synchronizing(a) {
        return Err(Error::Precondition("automaton is not synchronizing".into()));
    }
    if a.num_letters() == 1 {
        // The empty alphabet synchronizes only a single state.
        return Ok(a.n() > 1);
    }
    Ok((0..a.num_letters()).all(|k| {
        let sub = a.without_letter(k).expect("at least two letters");
        !is_synchronizing(&sub)
    }))
}

/// Drops letters (lowest index first) while the rest still synchronizes.
pub fn minimize_greedy(a: &Automaton) -> Result<Automaton> {
    if !is_synchronizing(a) {
        return Err(Error::Precondition("automaton is not synchronizing".into()));
    }
    let mut cur = a.clone();
    'outer: loop {
        for k in 0..cur.num_letters() {
            if let Some(sub) = cur.without_letter(k) {
                if is_synchronizing(&sub) {
                    cur = sub;
                    continue 'outer;
                }
            }
        }
        return Ok(cur);
    }
}

/// For a minimally primitive perturbed permutation set `s` and its associated
/// automaton `a`: returns `a` if it is already minimally synchronizing, and
/// otherwise `a` without the base permutation of the perturbed matrix.
pub fn minimize_per_prop2(a: &Automaton, s: &MatrixSet) -> Result<Automaton> {
    let view = s
        .as_perturbed_permutation_set()
        .ok_or_else(|| Error::Precondition("not a perturbed permutation set".into()))?;
    let expected = associated_automaton(s)?;
    if !a.same_letters(&expected) {
        return Err(Error::Precondition(
            "automaton is not the associated automaton of the set".into(),
        ));
    }
    if is_minimally_synchronizing(a)? {
        return Ok(a.clone());
    }
    let base = view.perms[view.perturbed_index].image();
    let k = a
        .letters()
        .iter()
        .position(|f| f.as_slice() == base)
        .ok_or_else(|| Error::Precondition("base permutation missing from letters".into()))?;
    Ok(a.without_letter(k)
        .expect("associated automaton has m + 1 >= 2 letters"))
}

/// The Černý automaton: a cyclic shift and a letter merging state `n - 1`
/// into state `0` while fixing the rest.
pub fn cerny(n: usize) -> Result<Automaton> {
    let shift: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut merge: Vec<usize> = (0..n).collect();
    merge[n - 1] = 0;
    Automaton::new(n, vec![shift, merge])
}
