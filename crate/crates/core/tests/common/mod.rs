//! Instance generators and cross-checks shared by the oracle tests and the
//! acceptance suite.
#![allow(dead_code)]

use rand::Rng;
use synchro::automata::{
    associated_automaton, associated_is_synchronizing, is_synchronizing, reset_threshold_exact,
    shortest_reset_word, sync_eccentricity, DEFAULT_STATE_CAP,
};
use synchro::generator::{
    procedure1_sample, random_binary_set, GeneratorConfig, GeneratorOutcome, SeededRng,
};
use synchro::primitivity::{
    classify, exponent_bruteforce_with, find_block_permutation_bruteforce,
    has_block_permutation_on, is_irreducible, is_primitive, Partition, PrimitivityClass,
};
use synchro::{Automaton, BinaryMatrix, MatrixSet, Permutation};

/// Semigroup size at which the exponent search gives up.
pub const PRODUCT_CAP: usize = 1 << 16;

pub fn nz_matrices(n: usize) -> Vec<BinaryMatrix> {
    (0..1u64 << (n * n))
        .map(|bits| {
            let mut m = BinaryMatrix::zeros(n).unwrap();
            for k in 0..n * n {
                if bits >> k & 1 == 1 {
                    m.set(k / n, k % n, true);
                }
            }
            m
        })
        .filter(|m| m.is_nz())
        .collect()
}

pub struct Check {
    pub class: PrimitivityClass,
    /// `None` when the set is not primitive or the semigroup search hit
    /// [`PRODUCT_CAP`].
    pub exponent: Option<usize>,
    /// The exponent search gave up and the verdict was confirmed by a
    /// certificate instead: a positive product, a reducibility cut, or a
    /// block-permutation witness.
    pub certified: bool,
}

/// Length of an explicit positive product `W P V`, checked by
/// multiplication: `W` dominates a reset word of `A(M)` (so it has an
/// all-ones column `c`), `V` is the reversed reset word of `A(M^T)` (an
/// all-ones row `r`) and `P` follows a path from `c` to `r`.
pub fn positive_product_certificate(s: &MatrixSet) -> Option<usize> {
    let n = s.n();
    let lift = |set: &MatrixSet| -> Option<(Vec<usize>, usize)> {
        let a = associated_automaton(set).ok()?;
        let word = shortest_reset_word(&a, DEFAULT_STATE_CAP).ok()??;
        let sink = word.iter().fold(0, |x, &l| a.letter(l)[x]);
        let factors = word
            .iter()
            .map(|&l| {
                let f = a.letter_matrix(l);
                set.iter().position(|m| m.dominates(&f).unwrap()).unwrap()
            })
            .collect();
        Some((factors, sink))
    };
    let (w, c) = lift(s)?;
    let (mut v, r) = lift(&s.transpose())?;
    v.reverse();

    // Shortest path c -> r, remembering which matrix supplies each edge.
    let mut prev = vec![None; n];
    let mut queue = std::collections::VecDeque::from([c]);
    let mut seen = vec![false; n];
    seen[c] = true;
    while let Some(x) = queue.pop_front() {
        for (t, m) in s.iter().enumerate() {
            for y in m.row_ones(x) {
                if !std::mem::replace(&mut seen[y], true) {
                    prev[y] = Some((x, t));
                    queue.push_back(y);
                }
            }
        }
    }
    let mut path = Vec::new();
    let mut y = r;
    while y != c {
        let (x, t) = prev[y]?;
        path.push(t);
        y = x;
    }
    path.reverse();

    let word: Vec<usize> = w.into_iter().chain(path).chain(v).collect();
    let mut product = BinaryMatrix::identity(n).unwrap();
    for &t in &word {
        product = product.product(&s.matrices()[t]).unwrap();
    }
    product.is_all_ones().then_some(word.len())
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Every cross-check that applies to an NZ set; `Err` describes the first
/// disagreement.
pub fn cross_check(s: &MatrixSet) -> Result<Check, String> {
    let class = classify(s).map_err(|e| e.to_string())?;
    let primitive = class == PrimitivityClass::Primitive;
    let verdict = is_primitive(s).map_err(|e| e.to_string())?;
    ensure!(verdict.class == class, "is_primitive vs classify on {s:?}");
    let transposed = classify(&s.transpose()).map_err(|e| e.to_string())?;
    ensure!(transposed == class, "transpose symmetry on {s:?}");
    ensure!(
        !primitive || is_irreducible(s),
        "primitive but reducible: {s:?}"
    );

    let (exponent, certified) = match exponent_bruteforce_with(s, 10_000, PRODUCT_CAP) {
        Ok(e) => {
            ensure!(
                primitive == e.is_some(),
                "exponent oracle disagrees on {s:?}"
            );
            (e, false)
        }
        Err(e) if e.is_cap_exhausted() => {
            let confirmed = if primitive {
                positive_product_certificate(s).is_some()
            } else {
                !is_irreducible(s)
                    || find_block_permutation_bruteforce(s, false)
                        .map_err(|e| e.to_string())?
                        .is_some()
            };
            ensure!(confirmed, "no certificate for {class:?} on {s:?}");
            (None, true)
        }
        Err(e) => return Err(e.to_string()),
    };

    // Dense sets have too many associated letters to enumerate; there the
    // implicit pair search stands in for the explicit automaton.
    let sync_of = |set: &MatrixSet| -> Result<bool, String> {
        match associated_automaton(set) {
            Ok(a) => {
                let sync = is_synchronizing(&a);
                ensure!(
                    associated_is_synchronizing(set) == sync,
                    "implicit vs explicit"
                );
                Ok(sync)
            }
            Err(e) if e.is_cap_exhausted() => Ok(associated_is_synchronizing(set)),
            Err(e) => Err(e.to_string()),
        }
    };
    let (sync, sync_t) = (sync_of(s)?, sync_of(&s.transpose())?);
    if is_irreducible(s) {
        ensure!(sync == primitive, "Theorem 1 on M: {s:?}");
        ensure!(sync_t == primitive, "Theorem 1 on M^T: {s:?}");
    }
    Ok(Check {
        class,
        exponent,
        certified,
    })
}

/// `rt(A) <= exp(M) <= rt(A(M)) + rt(A(M^T)) + n - 1` for a primitive set
/// with known exponent.
pub fn exponent_sandwich(s: &MatrixSet, exp: usize) -> Result<(), String> {
    let rt = |set: &MatrixSet| -> Result<usize, String> {
        let a = associated_automaton(set).map_err(|e| e.to_string())?;
        reset_threshold_exact(&a, DEFAULT_STATE_CAP)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| "primitive set with non-synchronizing automaton".to_string())
    };
    let (r, rt_t) = (rt(s)?, rt(&s.transpose())?);
    ensure!(r.max(rt_t) <= exp, "lower bound: {r} {rt_t} {exp}");
    ensure!(exp < r + rt_t + s.n(), "upper bound: {r} {rt_t} {exp}");
    Ok(())
}

/// Random NZ sets from four families: dense Bernoulli sets, permutation
/// sets, sets with a planted block-permutation structure, and perturbed
/// permutation sets. The last are kept small because their semigroups grow
/// fast before reaching a positive element.
pub fn random_nz_set(rng: &mut SeededRng) -> MatrixSet {
    let m = rng.gen_range(2..=3);
    match rng.gen_range(0..4) {
        0 => {
            let n = rng.gen_range(2..=5);
            procedure1_sample(n, m, rng).unwrap()
        }
        1 => {
            let n = rng.gen_range(2..=8);
            loop {
                let p = rng.gen_range(0.25..0.5);
                let s = random_binary_set(n, m, p, rng).unwrap();
                if s.is_nz() {
                    break s;
                }
            }
        }
        2 => {
            let n = rng.gen_range(2..=8);
            let perms = (0..m)
                .map(|_| Permutation::random(n, rng).to_matrix())
                .collect();
            MatrixSet::new(perms).unwrap()
        }
        _ => planted_structure(rng, m),
    }
}

/// Equal blocks over `n <= 8`; each matrix maps block `b` into block
/// `sigma(b)` with a random NZ pattern.
pub fn planted_structure(rng: &mut SeededRng, m: usize) -> MatrixSet {
    let (k, size) = [(2, 2), (3, 2), (4, 2), (2, 4)][rng.gen_range(0..4)];
    let n = k * size;
    let order = Permutation::random(n, rng);
    let block_of = |x: usize| order.apply(x) / size;
    let members: Vec<Vec<usize>> = (0..k)
        .map(|b| (0..n).filter(|&x| block_of(x) == b).collect())
        .collect();
    let matrices = (0..m)
        .map(|_| {
            let sigma = Permutation::random(k, rng);
            loop {
                let mut mat = BinaryMatrix::zeros(n).unwrap();
                for b in 0..k {
                    for &r in &members[b] {
                        for &c in &members[sigma.apply(b)] {
                            if rng.gen_bool(0.5) {
                                mat.set(r, c, true);
                            }
                        }
                    }
                }
                if mat.is_nz() {
                    break mat;
                }
            }
        })
        .collect();
    MatrixSet::new(matrices).unwrap()
}

pub fn random_automaton(rng: &mut SeededRng, n: usize, m: usize) -> Automaton {
    let letters = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    Automaton::new(n, letters).unwrap()
}

/// `d <= rt <= n d` with `d` the synchronizing eccentricity.
pub fn eq5_sandwich(a: &Automaton) -> Result<(), String> {
    let rt = reset_threshold_exact(a, DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
    let ecc = sync_eccentricity(a);
    ensure!(rt.is_some() == ecc.is_some(), "synchronization disagrees");
    if let (Some(rt), Some(d)) = (rt, ecc) {
        ensure!(d <= rt && rt <= a.n() * d.max(1), "d={d} rt={rt}");
    }
    Ok(())
}

/// Structural invariants of a converged Listing-1 outcome: the set is a
/// perturbed permutation set matching its recorded perturbation, and
/// dropping matrix `j` leaves a block permutation on the recorded equal
/// `q_j`-partition.
pub fn listing1_invariants(cfg: &GeneratorConfig, out: &GeneratorOutcome) -> Result<(), String> {
    let s = out.set.as_ref().ok_or("converged outcome without a set")?;
    let n = cfg.n().map_err(|e| e.to_string())?;
    ensure!(
        (s.n(), s.len()) == (n, cfg.primes.len()),
        "shape {}x{}",
        s.n(),
        s.len()
    );
    let meta = s.meta().ok_or("generated set without structures")?;
    let pert = meta.perturbation.ok_or("no perturbation recorded")?;

    for (k, mat) in s.iter().enumerate() {
        let mut base = mat.clone();
        if k == pert.matrix {
            ensure!(mat.get(pert.row, pert.col), "perturbation entry missing");
            base.set(pert.row, pert.col, false);
        }
        ensure!(
            base.as_permutation().is_some(),
            "matrix {k} is not a base permutation"
        );
        ensure!(
            mat.count_ones() == n + usize::from(k == pert.matrix),
            "matrix {k} has extra entries"
        );
    }

    ensure!(meta.structures.len() == cfg.primes.len(), "structure count");
    for (j, rec) in meta.structures.iter().enumerate() {
        ensure!(
            (rec.excluded, rec.q) == (j, cfg.primes[j]),
            "structure {j} header"
        );
        let part = Partition::new(rec.block_of.clone()).map_err(|e| e.to_string())?;
        ensure!(
            part.is_equal_sized() && part.num_blocks() == rec.q,
            "structure {j} partition is not an equal {}-partition",
            rec.q
        );
        let rest = s.without(j).ok_or("cannot drop a matrix")?;
        let sigmas = has_block_permutation_on(&rest, &part)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("structure {j} broken"))?;
        let recorded: Vec<_> = rec.sigmas.iter().flatten().cloned().collect();
        ensure!(
            sigmas == recorded,
            "structure {j} block permutations differ"
        );
    }
    let verdict = out.primitive.as_ref().ok_or("no verdict")?;
    ensure!(
        verdict.class == classify(s).map_err(|e| e.to_string())?,
        "stored verdict differs"
    );
    Ok(())
}
