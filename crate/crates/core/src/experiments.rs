//! Seeded Monte-Carlo surveys.
//!
//! Every trial draws from its own stream seeded with `seed ^ trial`, so a run
//! is reproducible from `(seed, trials)` regardless of how trials are spread
//! over worker threads. Rows are always emitted in trial order.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automata::{
    associated_automaton, diameters, is_minimally_synchronizing, is_synchronizing, minimize_greedy,
    minimize_per_prop2, Automaton,
};
use crate::error::{Error, Result};
use crate::generator::{
    listing1_with, method1_sample, procedure1_sample, random_binary_set, seeded_rng, trial_seed,
    GeneratorConfig,
};
use crate::matrix::{BinaryMatrix, ExtractMethod, MatrixSet};
use crate::primitivity::{classify, is_irreducible, is_minimally_primitive, PrimitivityClass};

/// The three generation methods compared by the survey.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum SurveyMethod {
    /// A uniform permutation plus a uniform letter of rank `n - 1`.
    Naive,
    /// Listing 1 with uniformly random 1-entry selection.
    Random,
    /// Listing 1 with first-entry selection.
    Deterministic,
}

impl SurveyMethod {
    pub const ALL: [SurveyMethod; 3] = [
        SurveyMethod::Naive,
        SurveyMethod::Random,
        SurveyMethod::Deterministic,
    ];

    pub fn number(self) -> u8 {
        match self {
            SurveyMethod::Naive => 1,
            SurveyMethod::Random => 2,
            SurveyMethod::Deterministic => 3,
        }
    }

    fn extract_method(self) -> Option<ExtractMethod> {
        match self {
            SurveyMethod::Naive => None,
            SurveyMethod::Random => Some(ExtractMethod::Random),
            SurveyMethod::Deterministic => Some(ExtractMethod::Deterministic),
        }
    }
}

impl From<SurveyMethod> for u8 {
    fn from(m: SurveyMethod) -> u8 {
        m.number()
    }
}

impl TryFrom<u8> for SurveyMethod {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(SurveyMethod::Naive),
            2 => Ok(SurveyMethod::Random),
            3 => Ok(SurveyMethod::Deterministic),
            other => Err(Error::InvalidArgument(format!("unknown method {other}"))),
        }
    }
}

impl FromStr for SurveyMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("unknown method {s:?}")))?;
        SurveyMethod::try_from(v)
    }
}

impl fmt::Display for SurveyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// How many trials to run per `(method, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItersMode {
    /// `50 n^2` trials.
    FiftyNSquared,
    Fixed(usize),
}

impl ItersMode {
    pub fn trials(self, n: usize) -> usize {
        match self {
            ItersMode::FiftyNSquared => 50 * n * n,
            ItersMode::Fixed(k) => k,
        }
    }
}

impl Default for ItersMode {
    fn default() -> Self {
        ItersMode::Fixed(2000)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMode {
    /// Every hundredth trial.
    #[default]
    Sampled,
    Full,
}

impl AuditMode {
    fn selects(self, trial: usize) -> bool {
        match self {
            AuditMode::Sampled => trial.is_multiple_of(100),
            AuditMode::Full => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyConfig {
    pub methods: Vec<SurveyMethod>,
    pub n_list: Vec<usize>,
    pub iters: ItersMode,
    pub t1: usize,
    pub seed: u64,
    pub audit: AuditMode,
    /// Record per-trial wall-clock time (makes output non-reproducible).
    pub timing: bool,
}

impl Default for SurveyConfig {
    fn default() -> Self {
        SurveyConfig {
            methods: SurveyMethod::ALL.to_vec(),
            n_list: vec![12, 20, 30],
            iters: ItersMode::default(),
            t1: 1000,
            seed: 0,
            audit: AuditMode::default(),
            timing: false,
        }
    }
}

/// Prime factors of `n` in non-increasing order.
pub fn factor_descending(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        while rest.is_multiple_of(p) {
            out.push(p);
            rest /= p;
        }
        p += 1;
    }
    if rest > 1 {
        out.push(rest);
    }
    out.reverse();
    out
}

/// The block counts used for dimension `n`: its prime factorization, which
/// must have at least two factors.
pub fn primes_for(n: usize) -> Result<Vec<usize>> {
    let f = factor_descending(n);
    if f.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "n = {n} is not a product of at least two primes"
        )));
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditResult {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub method: SurveyMethod,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    /// Always true for method 1.
    pub converged: bool,
    pub verdict: Option<PrimitivityClass>,
    /// Whether the measured automaton is minimally synchronizing.
    pub minimal: Option<bool>,
    pub sync_eccentricity: Option<usize>,
    pub pair_diameter: Option<usize>,
    pub audit: Option<AuditResult>,
    /// Analysis cap hit while processing this trial.
    pub error: Option<String>,
    pub elapsed_ms: Option<u64>,
}

impl SurveyRow {
    fn blank(method: SurveyMethod, n: usize, trial: usize, seed: u64) -> Self {
        SurveyRow {
            method,
            n,
            trial,
            seed,
            converged: false,
            verdict: None,
            minimal: None,
            sync_eccentricity: None,
            pair_diameter: None,
            audit: None,
            error: None,
            elapsed_ms: None,
        }
    }
}

/// Class of a method-1 sample, whose rank-deficient letter has a zero column.
///
/// Such a set is treated as the automaton it spells: reducible when the
/// digraph of the sum is not strongly connected, otherwise primitive exactly
/// when the automaton synchronizes.
pub fn classify_automaton_set(s: &MatrixSet) -> Result<PrimitivityClass> {
    if !is_irreducible(s) {
        return Ok(PrimitivityClass::Reducible);
    }
    let a = Automaton::from_matrix_set(s)?;
    Ok(if is_synchronizing(&a) {
        PrimitivityClass::Primitive
    } else {
        PrimitivityClass::Imprimitive
    })
}

fn measure(row: &mut SurveyRow, minimized: &Automaton) -> Result<()> {
    let d = diameters(minimized);
    row.minimal = Some(is_minimally_synchronizing(minimized)?);
    row.sync_eccentricity = d.sync_eccentricity;
    row.pair_diameter = Some(d.pair_diameter);
    Ok(())
}

fn run_naive(row: &mut SurveyRow, audit: bool) -> Result<()> {
    let mut rng = seeded_rng(row.seed);
    let s = method1_sample(row.n, &mut rng)?;
    row.converged = true;
    let class = classify_automaton_set(&s)?;
    row.verdict = Some(class);
    if class == PrimitivityClass::Primitive {
        let a = Automaton::from_matrix_set(&s)?;
        let minimized = minimize_greedy(&a)?;
        measure(row, &minimized)?;
        if audit {
            let ok = is_synchronizing(&a) && row.minimal == Some(true);
            row.audit = Some(if ok {
                AuditResult::Pass
            } else {
                AuditResult::Fail
            });
        }
    }
    Ok(())
}

fn run_listing(row: &mut SurveyRow, method: ExtractMethod, t1: usize, audit: bool) -> Result<()> {
    let mut rng = seeded_rng(row.seed);
    let mut cfg = GeneratorConfig::new(primes_for(row.n)?, method, row.seed);
    cfg.t1 = t1;
    let outcome = listing1_with(&cfg, &mut rng, 0)?;
    row.converged = outcome.converged;
    let (Some(set), Some(verdict)) = (outcome.set, outcome.primitive) else {
        return Ok(());
    };
    row.verdict = Some(verdict.class);
    if verdict.is_primitive() {
        let a = associated_automaton(&set)?;
        let minimized = minimize_per_prop2(&a, &set)?;
        measure(row, &minimized)?;
        if audit {
            let ok =
                is_synchronizing(&a) && row.minimal == Some(true) && is_minimally_primitive(&set)?;
            row.audit = Some(if ok {
                AuditResult::Pass
            } else {
                AuditResult::Fail
            });
        }
    }
    Ok(())
}

/// One survey trial. Cap exhaustion is recorded in the row; other errors
/// propagate.
pub fn survey_trial(
    method: SurveyMethod,
    n: usize,
    trial: usize,
    cfg: &SurveyConfig,
) -> Result<SurveyRow> {
    let start = Instant::now();
    let mut row = SurveyRow::blank(method, n, trial, trial_seed(cfg.seed, trial as u64));
    let audit = cfg.audit.selects(trial);
    let res = match method.extract_method() {
        None => run_naive(&mut row, audit),
        Some(em) => run_listing(&mut row, em, cfg.t1, audit),
    };
    match res {
        Ok(()) => {}
        Err(e) if e.is_cap_exhausted() => row.error = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    if cfg.timing {
        row.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(row)
}

/// All trials of one `(method, n)` configuration, in trial order.
pub fn survey_config_rows(
    method: SurveyMethod,
    n: usize,
    cfg: &SurveyConfig,
) -> Result<Vec<SurveyRow>> {
    if method != SurveyMethod::Naive {
        primes_for(n)?;
    }
    (0..cfg.iters.trials(n))
        .into_par_iter()
        .map(|t| survey_trial(method, n, t, cfg))
        .collect()
}

/// Every configuration of the survey, methods outermost.
pub fn survey(cfg: &SurveyConfig) -> Result<Vec<SurveyRow>> {
    for &n in &cfg.n_list {
        if cfg.methods.iter().any(|&m| m != SurveyMethod::Naive) {
            primes_for(n)?;
        }
    }
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for &n in &cfg.n_list {
            rows.extend(survey_config_rows(method, n, cfg)?);
        }
    }
    Ok(rows)
}

/// Aggregates of one `(method, n)` configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub method: SurveyMethod,
    pub n: usize,
    pub trials: usize,
    pub converged: usize,
    pub primitive: usize,
    pub reducible: usize,
    pub imprimitive: usize,
    /// Fractions among converged trials; `None` when nothing converged.
    pub primitive_fraction: Option<f64>,
    pub reducible_fraction: Option<f64>,
    pub imprimitive_fraction: Option<f64>,
    pub nonprimitive_fraction: Option<f64>,
    pub max_sync_eccentricity: Option<usize>,
    pub mean_sync_eccentricity: Option<f64>,
    pub max_pair_diameter: Option<usize>,
    pub mean_pair_diameter: Option<f64>,
    pub audited: usize,
    pub audit_failures: usize,
    pub errors: usize,
}

fn mean(values: &[usize]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<usize>() as f64 / values.len() as f64)
    }
}

/// One summary per `(method, n)`, in order of first appearance.
pub fn summarize(rows: &[SurveyRow]) -> Vec<SurveySummary> {
    let mut keys: Vec<(SurveyMethod, usize)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.method, r.n)) {
            keys.push((r.method, r.n));
        }
    }
    keys.into_iter()
        .map(|(method, n)| {
            let group: Vec<&SurveyRow> = rows
                .iter()
                .filter(|r| r.method == method && r.n == n)
                .collect();
            let count = |c: PrimitivityClass| group.iter().filter(|r| r.verdict == Some(c)).count();
            let primitive = count(PrimitivityClass::Primitive);
            let reducible = count(PrimitivityClass::Reducible);
            let imprimitive = count(PrimitivityClass::Imprimitive);
            let classified = primitive + reducible + imprimitive;
            let frac = |k: usize| (classified > 0).then(|| k as f64 / classified as f64);
            let ecc: Vec<usize> = group.iter().filter_map(|r| r.sync_eccentricity).collect();
            let pd: Vec<usize> = group.iter().filter_map(|r| r.pair_diameter).collect();
            SurveySummary {
                method,
                n,
                trials: group.len(),
                converged: group.iter().filter(|r| r.converged).count(),
                primitive,
                reducible,
                imprimitive,
                primitive_fraction: frac(primitive),
                reducible_fraction: frac(reducible),
                imprimitive_fraction: frac(imprimitive),
                nonprimitive_fraction: frac(reducible + imprimitive),
                max_sync_eccentricity: ecc.iter().copied().max(),
                mean_sync_eccentricity: mean(&ecc),
                max_pair_diameter: pd.iter().copied().max(),
                mean_pair_diameter: mean(&pd),
                audited: group.iter().filter(|r| r.audit.is_some()).count(),
                audit_failures: group
                    .iter()
                    .filter(|r| r.audit == Some(AuditResult::Fail))
                    .count(),
                errors: group.iter().filter(|r| r.error.is_some()).count(),
            }
        })
        .collect()
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn io_err(e: impl fmt::Display) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}

/// Per-trial CSV. The `elapsed_ms` column is present only when `timing` is
/// set, so that untimed reruns are byte-identical.
pub fn write_survey_csv<W: Write>(w: W, rows: &[SurveyRow], timing: bool) -> Result<()> {
    let mut out = csv_writer(w);
    let mut header = vec![
        "method",
        "n",
        "trial",
        "seed",
        "converged",
        "verdict",
        "minimal",
        "sync_eccentricity",
        "pair_diameter",
        "audit",
        "error",
    ];
    if timing {
        header.push("elapsed_ms");
    }
    out.write_record(&header).map_err(io_err)?;
    for r in rows {
        let mut rec = vec![
            r.method.to_string(),
            r.n.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.converged.to_string(),
            r.verdict
                .map(|v| v.as_str().to_string())
                .unwrap_or_default(),
            opt(&r.minimal),
            opt(&r.sync_eccentricity),
            opt(&r.pair_diameter),
            r.audit
                .map(|a| match a {
                    AuditResult::Pass => "pass".to_string(),
                    AuditResult::Fail => "fail".to_string(),
                })
                .unwrap_or_default(),
            opt(&r.error),
        ];
        if timing {
            rec.push(opt(&r.elapsed_ms));
        }
        out.write_record(&rec).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

fn fmt_f(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn write_summary_csv<W: Write>(w: W, summaries: &[SurveySummary]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record([
        "method",
        "n",
        "trials",
        "converged",
        "primitive",
        "reducible",
        "imprimitive",
        "primitive_fraction",
        "reducible_fraction",
        "imprimitive_fraction",
        "nonprimitive_fraction",
        "max_sync_eccentricity",
        "mean_sync_eccentricity",
        "max_pair_diameter",
        "mean_pair_diameter",
        "audited",
        "audit_failures",
        "errors",
    ])
    .map_err(io_err)?;
    for s in summaries {
        out.write_record([
            s.method.to_string(),
            s.n.to_string(),
            s.trials.to_string(),
            s.converged.to_string(),
            s.primitive.to_string(),
            s.reducible.to_string(),
            s.imprimitive.to_string(),
            fmt_f(s.primitive_fraction),
            fmt_f(s.reducible_fraction),
            fmt_f(s.imprimitive_fraction),
            fmt_f(s.nonprimitive_fraction),
            opt(&s.max_sync_eccentricity),
            fmt_f(s.mean_sync_eccentricity),
            opt(&s.max_pair_diameter),
            fmt_f(s.mean_pair_diameter),
            s.audited.to_string(),
            s.audit_failures.to_string(),
            s.errors.to_string(),
        ])
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Random set models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum RandomModel {
    /// `m` uniform permutations, one of them perturbed by a single 1-entry.
    Procedure1,
    /// `m` matrices with i.i.d. Bernoulli(`p`) entries.
    Bp { p: f64 },
}

impl RandomModel {
    pub fn name(&self) -> &'static str {
        match self {
            RandomModel::Procedure1 => "procedure1",
            RandomModel::Bp { .. } => "bp",
        }
    }

    pub fn p(&self) -> Option<f64> {
        match *self {
            RandomModel::Procedure1 => None,
            RandomModel::Bp { p } => Some(p),
        }
    }
}

/// `p` with `n p - ln n = c`, clamped to `[0, 1]`.
pub fn bp_connectivity_p(n: usize, c: f64) -> f64 {
    (((n as f64).ln() + c) / n as f64).clamp(0.0, 1.0)
}

/// `p` with `2 n p - ln n = c`, clamped to `[0, 1]`.
pub fn bp_isolation_p(n: usize, c: f64) -> f64 {
    (((n as f64).ln() + c) / (2.0 * n as f64)).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomModelRow {
    pub model: String,
    pub n: usize,
    pub m: usize,
    pub p: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub primitive_count: usize,
    pub reducible_count: usize,
    pub imprimitive_count: usize,
    /// Irreducible sets with a zero row or column, whose primitivity is not
    /// decided here.
    pub undetermined_count: usize,
    /// Trials in which the greedy search found a positive product.
    pub exp_bound_found: Option<usize>,
    /// Mean length of those products.
    pub exp_bound_mean: Option<f64>,
}

impl RandomModelRow {
    pub fn primitive_fraction(&self) -> f64 {
        self.primitive_count as f64 / self.trials as f64
    }

    pub fn reducible_fraction(&self) -> f64 {
        self.reducible_count as f64 / self.trials as f64
    }
}

/// Class of an arbitrary set; `None` for irreducible sets that are not NZ.
pub fn classify_any(s: &MatrixSet) -> Result<Option<PrimitivityClass>> {
    if s.is_nz() {
        return classify(s).map(Some);
    }
    if !is_irreducible(s) {
        return Ok(Some(PrimitivityClass::Reducible));
    }
    Ok(None)
}

/// Length of a positive product found by repeatedly appending the matrix
/// that maximizes the number of 1-entries (lowest index on ties), within
/// `step_cap` factors. An upper bound on the exponent, not the exponent.
pub fn greedy_positive_product(s: &MatrixSet, step_cap: usize) -> Result<Option<usize>> {
    let mut cur: Option<&BinaryMatrix> = None;
    for m in s {
        if cur.is_none_or(|c| m.count_ones() > c.count_ones()) {
            cur = Some(m);
        }
    }
    let mut cur = cur.ok_or(Error::EmptySet)?.clone();
    let mut len = 1;
    while !cur.is_all_ones() {
        if len >= step_cap {
            return Ok(None);
        }
        let mut next = None;
        let mut next_ones = 0;
        for m in s {
            let p = cur.product(m)?;
            let ones = p.count_ones();
            if next.is_none() || ones > next_ones {
                next_ones = ones;
                next = Some(p);
            }
        }
        cur = next.expect("non-empty set");
        len += 1;
    }
    Ok(Some(len))
}

pub fn randmodel_trial(model: RandomModel, n: usize, m: usize, seed: u64) -> Result<MatrixSet> {
    let mut rng = seeded_rng(seed);
    match model {
        RandomModel::Procedure1 => procedure1_sample(n, m, &mut rng),
        RandomModel::Bp { p } => random_binary_set(n, m, p, &mut rng),
    }
}

/// Counts of each class over `trials` samples; with `exp_bound`, also runs
/// [`greedy_positive_product`] (capped at `4 n` factors) on primitive samples.
pub fn randmodel(
    model: RandomModel,
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    exp_bound: bool,
) -> Result<RandomModelRow> {
    let results: Vec<(Option<PrimitivityClass>, Option<usize>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = randmodel_trial(model, n, m, trial_seed(seed, t as u64))?;
            let class = classify_any(&s)?;
            let bound = if exp_bound && class == Some(PrimitivityClass::Primitive) {
                greedy_positive_product(&s, 4 * n)?
            } else {
                None
            };
            Ok((class, bound))
        })
        .collect::<Result<_>>()?;
    let count = |c| results.iter().filter(|(k, _)| *k == Some(c)).count();
    let bounds: Vec<usize> = results.iter().filter_map(|(_, b)| *b).collect();
    Ok(RandomModelRow {
        model: model.name().to_string(),
        n,
        m,
        p: model.p(),
        trials,
        seed,
        primitive_count: count(PrimitivityClass::Primitive),
        reducible_count: count(PrimitivityClass::Reducible),
        imprimitive_count: count(PrimitivityClass::Imprimitive),
        undetermined_count: results.iter().filter(|(k, _)| k.is_none()).count(),
        exp_bound_found: exp_bound.then_some(bounds.len()),
        exp_bound_mean: if exp_bound { mean(&bounds) } else { None },
    })
}

pub fn write_randmodel_csv<W: Write>(w: W, rows: &[RandomModelRow]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record([
        "model",
        "n",
        "m",
        "p",
        "trials",
        "seed",
        "primitive_count",
        "reducible_count",
        "imprimitive_count",
        "undetermined_count",
        "primitive_fraction",
        "reducible_fraction",
        "exp_bound_found",
        "exp_bound_mean",
    ])
    .map_err(io_err)?;
    for r in rows {
        out.write_record([
            r.model.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.p.map(|p| format!("{p:.8}")).unwrap_or_default(),
            r.trials.to_string(),
            r.seed.to_string(),
            r.primitive_count.to_string(),
            r.reducible_count.to_string(),
            r.imprimitive_count.to_string(),
            r.undetermined_count.to_string(),
            format!("{:.6}", r.primitive_fraction()),
            format!("{:.6}", r.reducible_fraction()),
            opt(&r.exp_bound_found),
            fmt_f(r.exp_bound_mean),
        ])
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
