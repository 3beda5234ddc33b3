//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_DEVIATIONS` are reproduced faithfully but are
//! expected to fail (see the README); they do not fail the process unless
//! `ACCEPTANCE_STRICT=1` is set. Any other failure exits with status 1.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{
    cross_check, eq5_sandwich, exponent_sandwich, listing1_invariants, nz_matrices,
    random_automaton, random_nz_set,
};
use synchro::automata::{
    associated_automaton, diameters, is_minimally_synchronizing, minimize_per_prop2,
    reset_threshold_exact, sync_eccentricity, DEFAULT_STATE_CAP,
};
use synchro::experiments::{
    bp_connectivity_p, bp_isolation_p, randmodel, summarize, survey, ItersMode, RandomModel,
    SurveyConfig, SurveyMethod, SurveySummary,
};
use synchro::families::{
    build_aij, build_family, build_mij, conjectured_reset_threshold, sgd_formula,
    witness_partitions_prop4, FamilyKind, SymmetricPairShape,
};
use synchro::generator::{listing1_with, seeded_rng, GeneratorConfig};
use synchro::matrix::ExtractMethod;
use synchro::primitivity::{
    classify, exponent_bruteforce, has_block_permutation_on, is_minimally_primitive,
    PrimitivityClass,
};
use synchro::{Automaton, BinaryMatrix, MatrixSet};

const KNOWN_DEVIATIONS: &[&str] = &["survey-fractions", "max-diameter"];

type Outcome = Result<String, String>;

struct Suite {
    unexpected: Vec<&'static str>,
    known: Vec<&'static str>,
}

impl Suite {
    fn run(&mut self, id: &'static str, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_text(&*p))));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed <= limit {
                Ok(d)
            } else {
                Err(format!("{d}; over the {limit:?} budget"))
            }
        });
        let known = KNOWN_DEVIATIONS.contains(&id);
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) if known => ("FAIL (known deviation)", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        println!(
            "{status}  [{id}] {title} ({:.2}s): {detail}",
            elapsed.as_secs_f64()
        );
        if outcome.is_err() {
            if known {
                self.known.push(id);
            } else {
                self.unexpected.push(id);
            }
        }
    }
}

fn panic_text(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rt(a: &Automaton) -> Result<usize, String> {
    reset_threshold_exact(a, DEFAULT_STATE_CAP)
        .map_err(|e| e.to_string())?
        .ok_or_else(|| "not synchronizing".into())
}

fn example_fidelity() -> Outcome {
    let m1 = BinaryMatrix::from_dense(&[[0u8, 1, 0], [1, 0, 0], [0, 0, 1]]).unwrap();
    let m2 = BinaryMatrix::from_dense(&[[1u8, 0, 1], [0, 0, 1], [0, 1, 0]]).unwrap();
    let s = MatrixSet::new(vec![m1, m2]).unwrap();
    let exp = exponent_bruteforce(&s, 100).map_err(|e| e.to_string())?;
    let a = associated_automaton(&s).map_err(|e| e.to_string())?;
    let at = associated_automaton(&s.transpose()).map_err(|e| e.to_string())?;
    // Letters a, b, c and a, b, c' as printed, written as maps.
    let expect_a = Automaton::new(3, vec![vec![1, 0, 2], vec![0, 2, 1], vec![2, 2, 1]]).unwrap();
    let expect_at = Automaton::new(3, vec![vec![1, 0, 2], vec![0, 2, 1], vec![0, 2, 0]]).unwrap();
    let got = (exp, rt(&a)?, rt(&at)?);
    check(got == (Some(8), 4, 2), || {
        format!("(exp, rt, rt^T) = {got:?}")
    })?;
    check(a.same_letters(&expect_a), || {
        format!("A(M) letters {:?}", a.letters())
    })?;
    check(at.same_letters(&expect_at), || {
        format!("A(M^T) letters {:?}", at.letters())
    })?;
    Ok("exp 8, rt(A(M)) 4, rt(A(M^T)) 2, letter sets match".into())
}

fn family_golden() -> Outcome {
    let a16 = build_aij(SymmetricPairShape::Saus1, 8, 0, 5).map_err(|e| e.to_string())?;
    let e8 = build_family(FamilyKind::E, 8).map_err(|e| e.to_string())?;
    let got = (rt(&a16)?, sync_eccentricity(&e8));
    check(got == (31, Some(19)), || {
        format!("(rt(A_1,6), ecc(E_8)) = {got:?}")
    })?;
    Ok("rt(A_{1,6}) = 31, sync_eccentricity(E_8) = 19".into())
}

fn theorem4() -> Outcome {
    let (mut count, mut pair_disagree) = (0, 0);
    for kind in FamilyKind::ALL {
        for n in kind.sizes_up_to(60) {
            let a = build_family(kind, n).map_err(|e| e.to_string())?;
            let report = diameters(&a);
            let formula = sgd_formula(kind, n).map_err(|e| e.to_string())?;
            check(report.sync_eccentricity == Some(formula), || {
                format!("{kind} n={n}: {:?} vs {formula}", report.sync_eccentricity)
            })?;
            pair_disagree += usize::from(report.pair_diameter != formula);
            count += 1;
        }
    }
    Ok(format!(
        "{count} instances match; pair_diameter differs from the formula on {pair_disagree}"
    ))
}

fn conjecture1() -> Outcome {
    let cases = [
        (FamilyKind::E, &[8usize, 12, 16][..]),
        (FamilyKind::Eprime, &[10, 14]),
        (FamilyKind::O, &[5, 9, 13]),
        (FamilyKind::Oprime, &[7, 11]),
    ];
    let mut seen = Vec::new();
    for (kind, sizes) in cases {
        for &n in sizes {
            let a = build_family(kind, n).map_err(|e| e.to_string())?;
            let (got, want) = (rt(&a)?, conjectured_reset_threshold(kind, n).unwrap());
            check(got == want, || {
                format!("{kind} n={n}: rt {got}, conjectured {want}")
            })?;
            seen.push(format!("{kind}{n}={got}"));
        }
    }
    Ok(format!("conjecture-consistent: {}", seen.join(" ")))
}

fn prop4() -> Outcome {
    let mut count = 0;
    for n in [4, 6, 8, 10] {
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let s = build_mij(SymmetricPairShape::Saus2, n, i, j).map_err(|e| e.to_string())?;
                let class = classify(&s).map_err(|e| e.to_string())?;
                check(class != PrimitivityClass::Primitive, || {
                    format!("n={n} ({i},{j}) primitive")
                })?;
                let p = witness_partitions_prop4(n, i, j).map_err(|e| e.to_string())?;
                let ok = has_block_permutation_on(&s, &p)
                    .map_err(|e| e.to_string())?
                    .is_some();
                check(ok, || {
                    format!("n={n} ({i},{j}): witness {:?} fails", p.block_of())
                })?;
                count += 1;
            }
        }
    }
    Ok(format!(
        "{count} Saus2 triples non-primitive with validated witnesses"
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut exhaustive = 0;
    for n in 1..=3 {
        let ms = nz_matrices(n);
        for i in 0..ms.len() {
            for j in i..ms.len() {
                let s = MatrixSet::new(vec![ms[i].clone(), ms[j].clone()]).unwrap();
                let c = cross_check(&s)?;
                check(!c.certified, || format!("semigroup cap hit on {s:?}"))?;
                exhaustive += 1;
            }
        }
    }

    let mut rng = seeded_rng(31_337);
    let (mut classes, mut certified, mut sandwiches) = ([0usize; 3], 0, 0);
    for _ in 0..1000 {
        let s = random_nz_set(&mut rng);
        let c = cross_check(&s)?;
        classes[c.class as usize] += 1;
        certified += usize::from(c.certified);
        let explicit = associated_automaton(&s).ok();
        let explicit_t = associated_automaton(&s.transpose()).ok();
        if let (Some(a), Some(at)) = (explicit, explicit_t) {
            eq5_sandwich(&a)?;
            eq5_sandwich(&at)?;
            if let Some(exp) = c.exponent {
                exponent_sandwich(&s, exp)?;
            }
            sandwiches += 1;
        }
    }
    for _ in 0..1000 {
        use rand::Rng;
        let n = rng.gen_range(2..=12);
        let m = rng.gen_range(1..=3);
        eq5_sandwich(&random_automaton(&mut rng, n, m))?;
    }
    Ok(format!(
        "0 violations; {exhaustive} exhaustive pairs; 1000 random sets \
         (reducible/imprimitive/primitive {classes:?}, {certified} decided by certificate \
         after the semigroup cap, {sandwiches} with both sandwiches); 1000 random automata"
    ))
}

/// Three-sigma binomial band around `p0`; for `p0 = 0` the upper end is
/// `3 / trials`.
fn band(observed: f64, p0: f64, trials: usize) -> (bool, f64) {
    let sigma = (p0 * (1.0 - p0) / trials as f64).sqrt();
    let half = if p0 == 0.0 {
        3.0 / trials as f64
    } else {
        3.0 * sigma
    };
    ((observed - p0).abs() <= half, half)
}

fn survey_fractions() -> Outcome {
    let cfg = SurveyConfig {
        n_list: vec![20],
        iters: ItersMode::Fixed(20_000),
        ..SurveyConfig::default()
    };
    let rows = survey(&cfg).map_err(|e| e.to_string())?;
    let summaries = summarize(&rows);
    // Paper percentages: nonprimitive, reducible, imprimitive.
    let targets = [
        (SurveyMethod::Naive, [0.0035, 0.0035, 0.0]),
        (SurveyMethod::Random, [0.0615, 0.0518, 0.0097]),
        (SurveyMethod::Deterministic, [0.845, 0.779, 0.066]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (method, want) in targets {
        let s = summaries
            .iter()
            .find(|s| s.method == method)
            .ok_or("missing summary")?;
        let got = [
            s.nonprimitive_fraction.unwrap_or(f64::NAN),
            s.reducible_fraction.unwrap_or(f64::NAN),
            s.imprimitive_fraction.unwrap_or(f64::NAN),
        ];
        let mut line = format!("m{}:", method.number());
        for (k, label) in ["nonprim", "red", "imp"].iter().enumerate() {
            let (inside, half) = band(got[k], want[k], s.converged);
            ok &= inside;
            line += &format!(
                " {label} {:.2}% vs {:.2}±{:.2}%{}",
                100.0 * got[k],
                100.0 * want[k],
                100.0 * half,
                if inside { "" } else { " X" }
            );
        }
        line += &format!(" [{} of {} converged]", s.converged, s.trials);
        parts.push(line);
    }
    let detail = parts.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_models() -> Outcome {
    let run =
        |model, n, trials| randmodel(model, n, 2, trials, 0, false).map_err(|e| e.to_string());
    let p1 = run(RandomModel::Procedure1, 100, 200)?;
    let connect = run(
        RandomModel::Bp {
            p: bp_connectivity_p(200, 6.0),
        },
        200,
        200,
    )?;
    let isolate = run(
        RandomModel::Bp {
            p: bp_isolation_p(200, -8.0),
        },
        200,
        200,
    )?;
    let informative = run(
        RandomModel::Bp {
            p: bp_isolation_p(200, -2.0),
        },
        200,
        200,
    )?;
    let detail = format!(
        "procedure1 n=100 primitive {:.3}; B(p) np-ln n=6 (p={:.4}) primitive {:.3}; \
         B(p) 2np-ln n=-8 (p clamped to {:.4}) reducible {:.3}; \
         informational 2np-ln n=-2 (p={:.4}) reducible {:.3}",
        p1.primitive_fraction(),
        connect.p.unwrap(),
        connect.primitive_fraction(),
        isolate.p.unwrap(),
        isolate.reducible_fraction(),
        informative.p.unwrap(),
        informative.reducible_fraction(),
    );
    let ok = p1.primitive_fraction() >= 0.9
        && connect.primitive_fraction() >= 0.9
        && isolate.reducible_fraction() >= 0.9;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn generator_suite() -> Outcome {
    let mut parts = Vec::new();
    for primes in [vec![5, 3, 2], vec![3, 2, 2, 2]] {
        for method in [ExtractMethod::Random, ExtractMethod::Deterministic] {
            let (mut converged, mut primitive, mut seed) = (0, 0, 0u64);
            while converged < 100 {
                check(seed < 2000, || {
                    format!("{primes:?} {method:?}: only {converged} converged")
                })?;
                let cfg = GeneratorConfig::new(primes.clone(), method, seed);
                seed += 1;
                let out =
                    listing1_with(&cfg, &mut seeded_rng(cfg.seed), 0).map_err(|e| e.to_string())?;
                if !out.converged {
                    continue;
                }
                converged += 1;
                listing1_invariants(&cfg, &out)
                    .map_err(|e| format!("{primes:?} seed {}: {e}", cfg.seed))?;
                let s = out.set.unwrap();
                if out.primitive.unwrap().class != PrimitivityClass::Primitive {
                    continue;
                }
                primitive += 1;
                check(
                    is_minimally_primitive(&s).map_err(|e| e.to_string())?,
                    || format!("{primes:?} seed {}: not minimally primitive", cfg.seed),
                )?;
                let a = associated_automaton(&s).map_err(|e| e.to_string())?;
                let minimized = minimize_per_prop2(&a, &s).map_err(|e| e.to_string())?;
                check(
                    is_minimally_synchronizing(&minimized).map_err(|e| e.to_string())?,
                    || {
                        format!(
                            "{primes:?} seed {}: minimized automaton not minimal",
                            cfg.seed
                        )
                    },
                )?;
            }
            let label = if method == ExtractMethod::Random {
                2
            } else {
                3
            };
            parts.push(format!(
                "{primes:?} m{label}: 100 converged in {seed} runs, {primitive} primitive"
            ));
        }
    }
    Ok(parts.join("; "))
}

fn max_diameter() -> Outcome {
    let cfg = SurveyConfig {
        methods: vec![SurveyMethod::Naive, SurveyMethod::Deterministic],
        ..SurveyConfig::default()
    };
    let summaries = summarize(&survey(&cfg).map_err(|e| e.to_string())?);
    let max_of = |method, n| {
        summaries
            .iter()
            .find(|s: &&SurveySummary| s.method == method && s.n == n)
            .and_then(|s| s.max_sync_eccentricity)
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for &n in &cfg.n_list {
        let (m1, m3) = (
            max_of(SurveyMethod::Naive, n),
            max_of(SurveyMethod::Deterministic, n),
        );
        ok &= matches!((m1, m3), (Some(a), Some(b)) if b >= a);
        parts.push(format!("n={n}: method 1 {m1:?}, method 3 {m3:?}"));
    }
    let detail = format!("{} (seed 0, 2000 trials)", parts.join("; "));
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let mut suite = Suite {
        unexpected: Vec::new(),
        known: Vec::new(),
    };
    let secs = Duration::from_secs;
    suite.run("example", "Example fidelity", secs(1), example_fidelity);
    suite.run("golden", "Family golden values", secs(1), family_golden);
    suite.run("theorem-4", "Theorem 4 sweep, n <= 60", secs(60), theorem4);
    suite.run(
        "conjecture-1",
        "Conjecture 1 consistency (conjecture check)",
        secs(300),
        conjecture1,
    );
    suite.run(
        "prop-4",
        "Prop 4: Saus2 triples never primitive",
        secs(60),
        prop4,
    );
    suite.run(
        "oracles",
        "Oracle equivalence",
        secs(600),
        oracle_equivalence,
    );
    suite.run(
        "survey-fractions",
        "Nonprimitive fractions at n = 20, 20000 trials",
        secs(1800),
        survey_fractions,
    );
    suite.run("random-models", "Random models", secs(600), random_models);
    suite.run(
        "generator",
        "Generator structural suite",
        secs(600),
        generator_suite,
    );
    suite.run(
        "max-diameter",
        "Method 3 >= method 1 max diameter",
        secs(600),
        max_diameter,
    );

    println!(
        "summary: {} unexpected failure(s), {} known deviation(s) failing",
        suite.unexpected.len(),
        suite.known.len()
    );
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if !suite.unexpected.is_empty() || (strict && !suite.known.is_empty()) {
        std::process::exit(1);
    }
}
