//! Three-letter automata built from a merging letter and two symmetric
//! permutations.
//!
//! Constructors take 0-based state indices. The conventional labels are
//! 1-based; `A_{1,6}` on 8 states is `build_aij(Saus1, 8, 0, 5)` here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automata::Automaton;
use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, MatrixSet, Permutation};
use crate::primitivity::Partition;

/// Shapes of the symmetric permutation pair `(Q1, Q2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetricPairShape {
    /// Even `n`: `Q1` fixes the two ends of the alternating path.
    Saus1,
    /// Even `n`: `Q1` closes the path into a cycle by swapping the ends.
    Saus2,
    /// Odd `n`: `Q1` fixes the first state, `Q2` the last.
    SausOdd,
}

impl SymmetricPairShape {
    fn check(self, n: usize) -> Result<()> {
        let ok = match self {
            SymmetricPairShape::Saus1 | SymmetricPairShape::Saus2 => n >= 2 && n.is_multiple_of(2),
            SymmetricPairShape::SausOdd => n >= 3 && n % 2 == 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "shape {self:?} is not defined for n = {n}"
            )))
        }
    }

    /// `Saus1` for even `n`, `SausOdd` for odd `n`.
    pub fn irreducible_for(n: usize) -> Self {
        if n.is_multiple_of(2) {
            SymmetricPairShape::Saus1
        } else {
            SymmetricPairShape::SausOdd
        }
    }
}

/// The two symmetric permutations of the given shape.
pub fn build_q1q2(shape: SymmetricPairShape, n: usize) -> Result<(Permutation, Permutation)> {
    shape.check(n)?;
    // Written with 1-based labels, shifted on the way out.
    let q1 = |i: usize| -> usize {
        match shape {
            SymmetricPairShape::Saus1 | SymmetricPairShape::Saus2 => {
                let ends_fixed = shape == SymmetricPairShape::Saus1;
                if i == 1 {
                    if ends_fixed {
                        1
                    } else {
                        n
                    }
                } else if i == n {
                    if ends_fixed {
                        n
                    } else {
                        1
                    }
                } else if i.is_multiple_of(2) {
                    i + 1
                } else {
                    i - 1
                }
            }
            SymmetricPairShape::SausOdd => {
                if i == 1 {
                    1
                } else if i.is_multiple_of(2) {
                    i + 1
                } else {
                    i - 1
                }
            }
        }
    };
    let q2 = |i: usize| -> usize {
        if shape == SymmetricPairShape::SausOdd && i == n {
            n
        } else if i.is_multiple_of(2) {
            i - 1
        } else {
            i + 1
        }
    };
    let p1 = Permutation::new((1..=n).map(|i| q1(i) - 1).collect())?;
    let p2 = Permutation::new((1..=n).map(|i| q2(i) - 1).collect())?;
    Ok((p1, p2))
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i >= n || j >= n || i == j {
        return Err(Error::InvalidArgument(format!(
            "need distinct states below {n}, got ({i}, {j})"
        )));
    }
    Ok(())
}

/// The automaton `{merge, Q1, Q2}` where `merge` sends `i` to `j` and fixes
/// every other state.
pub fn build_aij(shape: SymmetricPairShape, n: usize, i: usize, j: usize) -> Result<Automaton> {
    check_pair(n, i, j)?;
    let (q1, q2) = build_q1q2(shape, n)?;
    let mut merge: Vec<usize> = (0..n).collect();
    merge[i] = j;
    Automaton::new(n, vec![merge, q1.into_image(), q2.into_image()])
}

/// The matrix set `{I + E_ij, Q1, Q2}` whose associated automaton is
/// [`build_aij`].
pub fn build_mij(shape: SymmetricPairShape, n: usize, i: usize, j: usize) -> Result<MatrixSet> {
    check_pair(n, i, j)?;
    let (q1, q2) = build_q1q2(shape, n)?;
    let mut perturbed = BinaryMatrix::identity(n)?;
    perturbed.set(i, j, true);
    MatrixSet::new(vec![perturbed, q1.to_matrix(), q2.to_matrix()])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    /// `n = 4k`, `k >= 2`.
    E,
    /// `n = 4k + 2`, `k >= 2`.
    Eprime,
    /// `n = 4k + 1`, `k >= 1`.
    O,
    /// `n = 4k + 3`, `k >= 1`.
    Oprime,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [
        FamilyKind::E,
        FamilyKind::Eprime,
        FamilyKind::O,
        FamilyKind::Oprime,
    ];

    fn residue_and_min(self) -> (usize, usize) {
        match self {
            FamilyKind::E => (0, 8),
            FamilyKind::Eprime => (2, 10),
            FamilyKind::O => (1, 5),
            FamilyKind::Oprime => (3, 7),
        }
    }

    pub fn accepts(self, n: usize) -> bool {
        let (r, min) = self.residue_and_min();
        n >= min && n % 4 == r
    }

    fn check(self, n: usize) -> Result<()> {
        if self.accepts(n) {
            Ok(())
        } else {
            let (r, min) = self.residue_and_min();
            Err(Error::InvalidArgument(format!(
                "family {self} needs n = {r} mod 4 and n >= {min}, got {n}"
            )))
        }
    }

    /// Valid sizes up to and including `max_n`.
    pub fn sizes_up_to(self, max_n: usize) -> impl Iterator<Item = usize> {
        let (_, min) = self.residue_and_min();
        (min..=max_n).step_by(4)
    }

    /// The merged pair `(i, j)`, 0-based.
    pub fn indices(self, n: usize) -> Result<(usize, usize)> {
        self.check(n)?;
        // 1-based: E = A_{1,n-2}, E' = A_{1,n-4}, O = O' = A_{(n-1)/2,(n+1)/2}.
        Ok(match self {
            FamilyKind::E => (0, n - 3),
            FamilyKind::Eprime => (0, n - 5),
            FamilyKind::O | FamilyKind::Oprime => ((n - 1) / 2 - 1, n.div_ceil(2) - 1),
        })
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::E => "E",
            FamilyKind::Eprime => "Ep",
            FamilyKind::O => "O",
            FamilyKind::Oprime => "Op",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" | "e" => Ok(FamilyKind::E),
            "Ep" | "ep" | "E'" | "Eprime" => Ok(FamilyKind::Eprime),
            "O" | "o" => Ok(FamilyKind::O),
            "Op" | "op" | "O'" | "Oprime" => Ok(FamilyKind::Oprime),
            other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        }
    }
}

pub fn build_family(kind: FamilyKind, n: usize) -> Result<Automaton> {
    let (i, j) = kind.indices(n)?;
    build_aij(SymmetricPairShape::irreducible_for(n), n, i, j)
}

/// The matrix-set form `{I + E_ij, Q1, Q2}` of a family member.
pub fn family_matrix_set(kind: FamilyKind, n: usize) -> Result<MatrixSet> {
    let (i, j) = kind.indices(n)?;
    build_mij(SymmetricPairShape::irreducible_for(n), n, i, j)
}

/// Closed form of the synchronization eccentricity of the square graph.
pub fn sgd_formula(kind: FamilyKind, n: usize) -> Result<usize> {
    kind.check(n)?;
    let n2 = n * n;
    Ok(match kind {
        FamilyKind::E => (n2 + 2 * n - 4) / 4,
        FamilyKind::Eprime => (n2 + 2 * n - 12) / 4,
        FamilyKind::O => (n2 + 3 * n - 8) / 4,
        FamilyKind::Oprime => (n2 + 3 * n - 6) / 4,
    })
}

/// Conjectured reset threshold of the family member.
pub fn conjectured_reset_threshold(kind: FamilyKind, n: usize) -> Result<usize> {
    kind.check(n)?;
    let n2 = n * n;
    Ok(match kind {
        FamilyKind::E => (n2 - 2) / 2,
        FamilyKind::Eprime => (n2 - 10) / 2,
        FamilyKind::O | FamilyKind::Oprime => (n2 - 1) / 2,
    })
}

/// A partition on which `{I + E_ij, Q1, Q2}` of shape `Saus2` has a
/// block-permutation structure (0-based `i`, `j`).
///
/// The shape's two matchings form one alternating cycle, and its
/// colour-preserving symmetries act transitively on states, so the merge can
/// be moved to start at the first state. There, with `j` the 1-based target:
/// odd `j` gives the odd/even split, even `j` gives the pairs
/// `{a, j + 1 - a}` taken modulo `n`. The result is pulled back to the
/// original labels.
pub fn witness_partitions_prop4(n: usize, i: usize, j: usize) -> Result<Partition> {
    SymmetricPairShape::Saus2.check(n)?;
    check_pair(n, i, j)?;
    // 1-based labels taken modulo n, with representatives 1..=n.
    let wrap = |x: i64| -> usize { ((x - 1).rem_euclid(n as i64) + 1) as usize };
    let (i1, j1) = (i as i64 + 1, j as i64 + 1);
    let reflect = i1 % 2 == 0;
    // x -> 3 - x swaps the ends of each Q2 pair and maps Q1 pairs to Q1 pairs.
    let relabel = |x: i64| -> usize {
        let y = if reflect { 3 - x } else { x };
        let start = if reflect { 3 - i1 } else { i1 };
        wrap(y - (start - 1))
    };
    debug_assert_eq!(relabel(i1), 1);
    let target = relabel(j1);
    let block_of_relabelled = |y: usize| -> usize {
        if target % 2 == 1 {
            (y + 1) % 2
        } else {
            let partner = wrap(target as i64 + 1 - y as i64);
            y.min(partner) - 1
        }
    };
    let raw: Vec<usize> = (1..=n as i64)
        .map(|x| block_of_relabelled(relabel(x)))
        .collect();
    Ok(Partition::new(compact_labels(&raw))?.canonical())
}

fn compact_labels(raw: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    raw.iter()
        .map(|&b| {
            let next = map.len();
            *map.entry(b).or_insert(next)
        })
        .collect()
}

/// Every letter is a permutation or an idempotent.
pub fn has_simple_idempotents(a: &Automaton) -> bool {
    a.letters().iter().all(|f| {
        let is_perm = Permutation::new(f.clone()).is_ok();
        let idempotent = f.iter().all(|&y| f[y] == y);
        is_perm || idempotent
    })
}
