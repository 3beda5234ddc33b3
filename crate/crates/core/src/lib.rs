//! Primitive sets of binary matrices and the synchronizing automata they induce.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`]: bit-packed boolean matrices, permutations, matrix sets and
//!   permutation extraction.
//! * [`primitivity`]: irreducibility, block-permutation structures, primitivity
//!   verdicts and brute-force exponents.
//! * [`automata`]: associated automata, square graphs, synchronization and
//!   exact reset thresholds.
//! * [`generator`]: the randomized constructions (minimally primitive sets,
//!   random perturbed permutation sets, Bernoulli sets).
//! * [`families`]: the explicit three-letter families with simple idempotents.
//! * [`experiments`]: seeded Monte-Carlo surveys and random-model statistics.
//!
//! All indices are 0-based. Where documentation refers to the conventional
//! 1-based labels it says so explicitly.

pub mod automata;
pub mod error;
pub mod experiments;
pub mod families;
pub mod format;
pub mod generator;
pub mod matrix;
pub mod primitivity;

pub use automata::{Automaton, DiameterReport, SquareGraph};
pub use error::{Error, Result};
pub use matrix::{BinaryMatrix, MatrixSet, Permutation, PerturbedPermutation};
pub use primitivity::{PrimitivityClass, PrimitivityVerdict};
