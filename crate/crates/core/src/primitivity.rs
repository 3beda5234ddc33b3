//! Irreducibility, block-permutation structures and primitivity.
//!
//! Primitivity of an irreducible NZ set is decided through its associated
//! automaton: the set is primitive exactly when that automaton synchronizes,
//! which is a reachability question on pairs of states (see
//! [`crate::automata::associated_is_synchronizing`]).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::automata;
use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, MatrixSet};

/// Largest dimension accepted by the exhaustive partition search.
pub const BRUTEFORCE_MAX_N: usize = 12;

/// Default cap on distinct products stored by [`exponent_bruteforce`].
pub const DEFAULT_PRODUCT_CAP: usize = 1 << 24;

/// A partition of `0..n` into `k >= 2` nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    block_of: Vec<usize>,
    k: usize,
}

impl Partition {
    /// `block_of[i]` is the block id of state `i`; ids must be exactly `0..k`.
    pub fn new(block_of: Vec<usize>) -> Result<Self> {
        let k = block_of.iter().max().map_or(0, |&b| b + 1);
        if k < 2 {
            return Err(Error::InvalidPartition(format!(
                "need at least two blocks, got {k}"
            )));
        }
        let mut used = vec![false; k];
        for &b in &block_of {
            used[b] = true;
        }
        if let Some(empty) = used.iter().position(|&u| !u) {
            return Err(Error::InvalidPartition(format!("block {empty} is empty")));
        }
        Ok(Partition { block_of, k })
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= n || block_of[x] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "state {x} out of range or listed twice"
                    )));
                }
                block_of[x] = b;
            }
        }
        if block_of.contains(&usize::MAX) {
            return Err(Error::InvalidPartition(
                "blocks do not cover all states".into(),
            ));
        }
        Partition::new(block_of)
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.k
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    /// Members of each block, ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.k];
        for (x, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(x);
        }
        blocks
    }

    pub fn is_equal_sized(&self) -> bool {
        let n = self.n();
        n.is_multiple_of(self.k) && self.blocks().iter().all(|b| b.len() == n / self.k)
    }

    /// Relabels blocks in order of their smallest member.
    pub fn canonical(&self) -> Partition {
        let mut relabel = vec![usize::MAX; self.k];
        let mut next = 0;
        let block_of = self
            .block_of
            .iter()
            .map(|&b| {
                if relabel[b] == usize::MAX {
                    relabel[b] = next;
                    next += 1;
                }
                relabel[b]
            })
            .collect();
        Partition {
            block_of,
            k: self.k,
        }
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.block_of
    }
}

/// A partition into `q` blocks of size `n / q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EqualPartition(Partition);

impl EqualPartition {
    pub fn new(block_of: Vec<usize>) -> Result<Self> {
        let p = Partition::new(block_of)?;
        if !p.is_equal_sized() {
            return Err(Error::InvalidPartition("blocks differ in size".into()));
        }
        Ok(EqualPartition(p))
    }

    pub fn q(&self) -> usize {
        self.0.k
    }

    pub fn block_size(&self) -> usize {
        self.0.n() / self.0.k
    }

    pub fn as_partition(&self) -> &Partition {
        &self.0
    }

    pub fn into_partition(self) -> Partition {
        self.0
    }
}

impl std::ops::Deref for EqualPartition {
    type Target = Partition;
    fn deref(&self) -> &Partition {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitivityClass {
    Reducible,
    Imprimitive,
    Primitive,
}

impl PrimitivityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PrimitivityClass::Reducible => "reducible",
            PrimitivityClass::Imprimitive => "imprimitive",
            PrimitivityClass::Primitive => "primitive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    /// No directed path from `from` to `to` in the digraph of the sum.
    Unreachable { unreachable: [usize; 2] },
    /// A shared block-permutation structure.
    BlockStructure {
        partition: Partition,
        block_permutations: Vec<Vec<usize>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitivityVerdict {
    pub class: PrimitivityClass,
    /// Always present for reducible sets. For imprimitive sets it is present
    /// when the exhaustive partition search was within budget.
    pub witness: Option<Witness>,
}

impl PrimitivityVerdict {
    pub fn is_primitive(&self) -> bool {
        self.class == PrimitivityClass::Primitive
    }
}

fn reachable_from(m: &BinaryMatrix, start: usize) -> Vec<bool> {
    let n = m.n();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for v in m.row_ones(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// A pair `(u, v)` with no path from `u` to `v` in the digraph of the sum,
/// or `None` if that digraph is strongly connected.
pub fn unreachable_pair(s: &MatrixSet) -> Option<(usize, usize)> {
    let sum = s.boolean_sum();
    if let Some(v) = reachable_from(&sum, 0).iter().position(|&r| !r) {
        return Some((0, v));
    }
    reachable_from(&sum.transpose(), 0)
        .iter()
        .position(|&r| !r)
        .map(|v| (v, 0))
}

/// Strong connectivity of the digraph of the sum, via one forward and one
/// backward search from state 0.
pub fn is_irreducible(s: &MatrixSet) -> bool {
    unreachable_pair(s).is_none()
}

fn block_permutation_of(m: &BinaryMatrix, block_of: &[usize], k: usize) -> Option<Vec<usize>> {
    let mut sigma = vec![usize::MAX; k];
    for (i, &l) in block_of.iter().enumerate() {
        for j in m.row_ones(i) {
            let target = block_of[j];
            if sigma[l] == usize::MAX {
                sigma[l] = target;
            } else if sigma[l] != target {
                return None;
            }
        }
    }
    let mut hit = vec![false; k];
    for &t in &sigma {
        if t == usize::MAX || std::mem::replace(&mut hit[t], true) {
            return None;
        }
    }
    Some(sigma)
}

/// The block permutation of every matrix on `p`, if all of them have one.
pub fn has_block_permutation_on(s: &MatrixSet, p: &Partition) -> Result<Option<Vec<Vec<usize>>>> {
    if p.n() != s.n() {
        return Err(Error::DimensionMismatch {
            left: s.n(),
            right: p.n(),
        });
    }
    s.check_nz()?;
    Ok(s.iter()
        .map(|m| block_permutation_of(m, p.block_of(), p.num_blocks()))
        .collect())
}

/// Restricted growth strings of length `n` in lexicographic order, i.e. set
/// partitions in canonical order.
struct SetPartitions {
    a: Vec<usize>,
    max_prefix: Vec<usize>,
    first: bool,
}

impl SetPartitions {
    fn new(n: usize) -> Self {
        SetPartitions {
            a: vec![0; n],
            max_prefix: vec![0; n],
            first: true,
        }
    }

    fn advance(&mut self) -> bool {
        if self.first {
            self.first = false;
            return !self.a.is_empty();
        }
        let n = self.a.len();
        for i in (1..n).rev() {
            if self.a[i] <= self.max_prefix[i - 1] {
                self.a[i] += 1;
                let m = self.max_prefix[i - 1].max(self.a[i]);
                self.max_prefix[i] = m;
                for j in i + 1..n {
                    self.a[j] = 0;
                    self.max_prefix[j] = m;
                }
                return true;
            }
        }
        false
    }
}

/// Exhaustive search for a block-permutation structure shared by all
/// matrices. Partitions are visited in canonical (restricted growth string)
/// order and the first witness is returned.
pub fn find_block_permutation_bruteforce(
    s: &MatrixSet,
    equal_only: bool,
) -> Result<Option<(Partition, Vec<Vec<usize>>)>> {
    let n = s.n();
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::DimensionOutOfRange {
            n,
            max: BRUTEFORCE_MAX_N,
        });
    }
    s.check_nz()?;
    let mut it = SetPartitions::new(n);
    while it.advance() {
        let k = it.max_prefix[n - 1] + 1;
        if k < 2 {
            continue;
        }
        if equal_only {
            if !n.is_multiple_of(k) {
                continue;
            }
            let mut sizes = vec![0usize; k];
            for &b in &it.a {
                sizes[b] += 1;
            }
            if sizes.iter().any(|&c| c != n / k) {
                continue;
            }
        }
        let sigmas: Option<Vec<Vec<usize>>> = s
            .iter()
            .map(|m| block_permutation_of(m, &it.a, k))
            .collect();
        if let Some(sigmas) = sigmas {
            let partition = Partition {
                block_of: it.a.clone(),
                k,
            };
            return Ok(Some((partition, sigmas)));
        }
    }
    Ok(None)
}

/// Class of an NZ set without searching for an imprimitivity witness.
pub fn classify(s: &MatrixSet) -> Result<PrimitivityClass> {
    s.check_nz()?;
    if !is_irreducible(s) {
        return Ok(PrimitivityClass::Reducible);
    }
    Ok(if automata::associated_is_synchronizing(s) {
        PrimitivityClass::Primitive
    } else {
        PrimitivityClass::Imprimitive
    })
}

/// Full verdict; imprimitive witnesses are searched exhaustively up to
/// dimension `witness_max_n` and omitted above it.
pub fn verdict(s: &MatrixSet, witness_max_n: usize) -> Result<PrimitivityVerdict> {
    s.check_nz()?;
    if let Some((from, to)) = unreachable_pair(s) {
        return Ok(PrimitivityVerdict {
            class: PrimitivityClass::Reducible,
            witness: Some(Witness::Unreachable {
                unreachable: [from, to],
            }),
        });
    }
    if automata::associated_is_synchronizing(s) {
        return Ok(PrimitivityVerdict {
            class: PrimitivityClass::Primitive,
            witness: None,
        });
    }
    let witness = if s.n() <= witness_max_n.min(BRUTEFORCE_MAX_N) {
        find_block_permutation_bruteforce(s, false)?.map(|(partition, block_permutations)| {
            Witness::BlockStructure {
                partition,
                block_permutations,
            }
        })
    } else {
        None
    };
    Ok(PrimitivityVerdict {
        class: PrimitivityClass::Imprimitive,
        witness,
    })
}

/// Primitivity verdict of an NZ set, with a witness when one is affordable.
pub fn is_primitive(s: &MatrixSet) -> Result<PrimitivityVerdict> {
    verdict(s, BRUTEFORCE_MAX_N)
}

/// Length of the shortest positive product, by breadth-first search over the
/// distinct elements of the generated semigroup.
///
/// `Ok(None)` means the semigroup closed without a positive element, so the
/// set is not primitive. Running past `depth_cap` levels is an error.
pub fn exponent_bruteforce(s: &MatrixSet, depth_cap: usize) -> Result<Option<usize>> {
    exponent_bruteforce_with(s, depth_cap, DEFAULT_PRODUCT_CAP)
}

pub fn exponent_bruteforce_with(
    s: &MatrixSet,
    depth_cap: usize,
    product_cap: usize,
) -> Result<Option<usize>> {
    let mut seen: HashSet<BinaryMatrix> = HashSet::new();
    let mut frontier = Vec::new();
    for m in s {
        if seen.insert(m.clone()) {
            if m.is_all_ones() {
                return Ok(Some(1));
            }
            frontier.push(m.clone());
        }
    }
    let mut depth = 1;
    while !frontier.is_empty() {
        if depth >= depth_cap {
            return Err(Error::CapExhausted {
                what: "exponent depth",
                cap: depth_cap,
            });
        }
        depth += 1;
        let mut next = Vec::new();
        for p in &frontier {
            for m in s {
                let q = p.product(m)?;
                if q.is_all_ones() {
                    return Ok(Some(depth));
                }
                if !seen.contains(&q) {
                    if seen.len() >= product_cap {
                        return Err(Error::CapExhausted {
                            what: "semigroup product",
                            cap: product_cap,
                        });
                    }
                    seen.insert(q.clone());
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    Ok(None)
}

/// Primitive, and no set obtained by dropping one matrix is primitive.
pub fn is_minimally_primitive(s: &MatrixSet) -> Result<bool> {
    if s.len() < 2 {
        return Err(Error::Precondition(
            "minimal primitivity needs at least two matrices".into(),
        ));
    }
    if classify(s)? != PrimitivityClass::Primitive {
        return Ok(false);
    }
    for k in 0..s.len() {
        let sub = s.without(k).expect("at least two matrices");
        if classify(&sub)? == PrimitivityClass::Primitive {
            return Ok(false);
        }
    }
    Ok(true)
}
