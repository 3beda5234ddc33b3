//! `synchro`: analysis, generation and surveys from the command line.
//!
//! Exit status: 0 on success, 1 on bad input, 2 when an analysis cap is hit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use synchro::automata::{
    associated_automaton, associated_automaton_with_cap, diameters, reset_threshold_exact,
    shortest_reset_word, DEFAULT_LETTER_CAP, DEFAULT_STATE_CAP,
};
use synchro::experiments::{
    bp_connectivity_p, bp_isolation_p, randmodel, summarize, survey, write_randmodel_csv,
    write_summary_csv, write_survey_csv, AuditMode, ItersMode, RandomModel, SurveyConfig,
    SurveyMethod,
};
use synchro::families::{
    build_aij, build_family, build_mij, family_matrix_set, FamilyKind, SymmetricPairShape,
};
use synchro::format::{read_json, to_json_string, write_json};
use synchro::generator::{listing1, seeded_rng, GeneratorConfig};
use synchro::matrix::ExtractMethod;
use synchro::primitivity::{exponent_bruteforce_with, is_primitive, DEFAULT_PRODUCT_CAP};
use synchro::{Automaton, Error, MatrixSet};

#[derive(Parser)]
#[command(
    name = "synchro",
    version,
    about = "Primitive matrix sets and synchronizing automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Primitivity verdict of a matrix set.
    Check {
        /// Matrix-set JSON, or `-` for stdin.
        input: PathBuf,
    },
    /// Associated automaton of a matrix set.
    Automaton {
        input: PathBuf,
        /// Use the transposed set.
        #[arg(long)]
        transpose: bool,
        #[arg(long, default_value_t = DEFAULT_LETTER_CAP)]
        letter_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Square-graph diameters of an automaton.
    Diameter(AutomatonInput),
    /// Exact reset threshold of an automaton.
    Rt {
        #[command(flatten)]
        input: AutomatonInput,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
        /// Also print a shortest reset word.
        #[arg(long)]
        word: bool,
    },
    /// Exponent of a matrix set by semigroup search.
    Exp {
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        depth_cap: usize,
        #[arg(long, default_value_t = DEFAULT_PRODUCT_CAP)]
        product_cap: usize,
    },
    /// Build a family member or a general A_ij.
    Family(FamilyArgs),
    /// Run the randomized construction once.
    Gen(GenArgs),
    /// Monte-Carlo survey of the three generation methods.
    Survey(SurveyArgs),
    /// Primitivity statistics of a random set model.
    Randmodel(RandmodelArgs),
}

#[derive(Args)]
struct AutomatonInput {
    /// Automaton JSON (or a matrix set with --from-set), `-` for stdin.
    input: PathBuf,
    /// Read a matrix set and use its associated automaton.
    #[arg(long)]
    from_set: bool,
}

impl AutomatonInput {
    fn load(&self) -> anyhow::Result<Automaton> {
        if self.from_set {
            let s: MatrixSet = read_json(&self.input)?;
            Ok(associated_automaton(&s)?)
        } else {
            Ok(read_json(&self.input)?)
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Saus1,
    Saus2,
    Sausodd,
}

impl From<ShapeArg> for SymmetricPairShape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Saus1 => SymmetricPairShape::Saus1,
            ShapeArg::Saus2 => SymmetricPairShape::Saus2,
            ShapeArg::Sausodd => SymmetricPairShape::SausOdd,
        }
    }
}

#[derive(Args)]
struct FamilyArgs {
    /// E, Ep, O or Op.
    #[arg(long, required_unless_present = "shape")]
    kind: Option<FamilyKind>,
    #[arg(long)]
    n: usize,
    /// Build A_ij on this shape instead of a named family.
    #[arg(long, requires_all = ["i", "j"], conflicts_with = "kind")]
    shape: Option<ShapeArg>,
    /// Merged state, 1-based.
    #[arg(long)]
    i: Option<usize>,
    /// Target state, 1-based.
    #[arg(long)]
    j: Option<usize>,
    /// Automaton output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Matrix-set output; defaults to `<out>` with extension `set.json`.
    #[arg(long)]
    set_out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Block counts, e.g. `5,3,2`.
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<usize>>,
    #[arg(long)]
    t1: Option<usize>,
    /// 2 (random) or 3 (deterministic).
    #[arg(long)]
    method: Option<ExtractMethod>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Matrix-set output (with generator metadata).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SurveyArgs {
    /// Methods, e.g. `1,2,3`.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    method: Vec<SurveyMethod>,
    /// Dimensions, e.g. `12,20,30`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["n", "primes"])]
    n_list: Option<Vec<usize>>,
    #[arg(long, conflicts_with = "primes")]
    n: Option<usize>,
    /// A single dimension given as its factors.
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<usize>>,
    /// Trials per (method, n).
    #[arg(long, default_value_t = 2000, conflicts_with = "iters_50n2")]
    trials: usize,
    /// Run 50 n^2 trials per (method, n).
    #[arg(long)]
    iters_50n2: bool,
    #[arg(long, default_value_t = 1000)]
    t1: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-trial output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary output; for CSV defaults to `<out>` with extension
    /// `summary.csv`, or stderr when writing rows to stdout.
    #[arg(long)]
    summary_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Audit every primitive row instead of 1%.
    #[arg(long)]
    audit_full: bool,
    /// Add an elapsed_ms column (output no longer reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Procedure1,
    Bp,
}

#[derive(Args)]
struct RandmodelArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Entry probability for bp.
    #[arg(long, conflicts_with_all = ["connect", "isolate"])]
    p: Option<f64>,
    /// bp with n p - ln n = C.
    #[arg(
        long,
        value_name = "C",
        allow_hyphen_values = true,
        conflicts_with = "isolate"
    )]
    connect: Option<f64>,
    /// bp with 2 n p - ln n = C (clamped at 0).
    #[arg(long, value_name = "C", allow_hyphen_values = true)]
    isolate: Option<f64>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add the greedy positive-product length columns.
    #[arg(long)]
    exp_bound: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p.as_os_str() != "-" => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        _ => Box::new(io::stdout().lock()),
    })
}

fn emit<T: Serialize>(path: Option<&Path>, value: &T) -> anyhow::Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => write_json(p, value)?,
        _ => println!("{}", to_json_string(value)),
    }
    Ok(())
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn optional_number(v: Option<usize>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

fn cmd_family(args: &FamilyArgs) -> anyhow::Result<()> {
    let (aut, set) = match (args.kind, args.shape) {
        (Some(kind), _) => (
            build_family(kind, args.n)?,
            family_matrix_set(kind, args.n)?,
        ),
        (None, Some(shape)) => {
            let (i, j) = (args.i.unwrap(), args.j.unwrap());
            if i == 0 || j == 0 {
                bail!("--i and --j are 1-based");
            }
            (
                build_aij(shape.into(), args.n, i - 1, j - 1)?,
                build_mij(shape.into(), args.n, i - 1, j - 1)?,
            )
        }
        (None, None) => bail!("either --kind or --shape is required"),
    };
    emit(args.out.as_deref(), &aut)?;
    let set_path = args.set_out.clone().or_else(|| {
        args.out
            .as_ref()
            .filter(|p| p.as_os_str() != "-")
            .map(|p| sibling(p, "set.json"))
    });
    if let Some(p) = set_path {
        write_json(&p, &set)?;
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<()> {
    let mut cfg: GeneratorConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => GeneratorConfig::new(Vec::new(), ExtractMethod::Deterministic, 0),
    };
    if let Some(p) = &args.primes {
        cfg.primes = p.clone();
    }
    if let Some(t) = args.t1 {
        cfg.t1 = t;
    }
    if let Some(m) = args.method {
        cfg.method = m;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if cfg.primes.is_empty() {
        bail!("no primes given (use --primes or --config)");
    }
    let mut rng = seeded_rng(cfg.seed);
    let outcome = listing1(&cfg, &mut rng)?;
    if let (Some(p), Some(set)) = (&args.out, &outcome.set) {
        write_json(p, set)?;
    }
    #[derive(Serialize)]
    struct Report<'a> {
        n: usize,
        converged: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        verdict: Option<&'a synchro::PrimitivityVerdict>,
    }
    println!(
        "{}",
        to_json_string(&Report {
            n: cfg.n()?,
            converged: outcome.converged,
            verdict: outcome.primitive.as_ref(),
        })
    );
    Ok(())
}

fn cmd_survey(args: &SurveyArgs) -> anyhow::Result<()> {
    let n_list = match (&args.n_list, args.n, &args.primes) {
        (Some(l), _, _) => l.clone(),
        (None, Some(n), _) => vec![n],
        (None, None, Some(p)) => vec![p.iter().product()],
        (None, None, None) => SurveyConfig::default().n_list,
    };
    let cfg = SurveyConfig {
        methods: args.method.clone(),
        n_list,
        iters: if args.iters_50n2 {
            ItersMode::FiftyNSquared
        } else {
            ItersMode::Fixed(args.trials)
        },
        t1: args.t1,
        seed: args.seed,
        audit: if args.audit_full {
            AuditMode::Full
        } else {
            AuditMode::Sampled
        },
        timing: args.timing,
    };
    let rows = survey(&cfg)?;
    let summaries = summarize(&rows);
    let to_file = args.out.as_ref().filter(|p| p.as_os_str() != "-");
    match args.format {
        OutputFormat::Csv => {
            write_survey_csv(output(args.out.as_deref())?, &rows, cfg.timing)?;
            match (&args.summary_out, to_file) {
                (Some(p), _) => write_summary_csv(output(Some(p))?, &summaries)?,
                (None, Some(p)) => {
                    write_summary_csv(output(Some(&sibling(p, "summary.csv")))?, &summaries)?
                }
                (None, None) => write_summary_csv(io::stderr().lock(), &summaries)?,
            }
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                config: &'a SurveyConfig,
                rows: &'a [synchro::experiments::SurveyRow],
                summary: &'a [synchro::experiments::SurveySummary],
            }
            let doc = Doc {
                config: &cfg,
                rows: &rows,
                summary: &summaries,
            };
            if let Some(p) = &args.summary_out {
                emit(Some(p), &summaries)?;
            }
            emit(args.out.as_deref(), &doc)?;
        }
    }
    Ok(())
}

fn cmd_randmodel(args: &RandmodelArgs) -> anyhow::Result<()> {
    let model = match args.model {
        ModelArg::Procedure1 => RandomModel::Procedure1,
        ModelArg::Bp => {
            let p = match (args.p, args.connect, args.isolate) {
                (Some(p), _, _) => p,
                (None, Some(c), _) => bp_connectivity_p(args.n, c),
                (None, None, Some(c)) => bp_isolation_p(args.n, c),
                (None, None, None) => bail!("bp needs --p, --connect or --isolate"),
            };
            RandomModel::Bp { p }
        }
    };
    let row = randmodel(
        model,
        args.n,
        args.m,
        args.trials,
        args.seed,
        args.exp_bound,
    )?;
    write_randmodel_csv(output(args.out.as_deref())?, &[row])?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Check { input } => {
            let s: MatrixSet = read_json(&input)?;
            emit(None, &is_primitive(&s)?)?;
        }
        Command::Automaton {
            input,
            transpose,
            letter_cap,
            out,
        } => {
            let mut s: MatrixSet = read_json(&input)?;
            if transpose {
                s = s.transpose();
            }
            emit(
                out.as_deref(),
                &associated_automaton_with_cap(&s, letter_cap)?,
            )?;
        }
        Command::Diameter(input) => emit(None, &diameters(&input.load()?))?,
        Command::Rt {
            input,
            state_cap,
            word,
        } => {
            let a = input.load()?;
            if word {
                match shortest_reset_word(&a, state_cap)? {
                    Some(w) => println!("{}\n{}", w.len(), to_json_string(&w)),
                    None => println!("none"),
                }
            } else {
                println!("{}", optional_number(reset_threshold_exact(&a, state_cap)?));
            }
        }
        Command::Exp {
            input,
            depth_cap,
            product_cap,
        } => {
            let s: MatrixSet = read_json(&input)?;
            println!(
                "{}",
                optional_number(exponent_bruteforce_with(&s, depth_cap, product_cap)?)
            );
        }
        Command::Family(args) => cmd_family(&args)?,
        Command::Gen(args) => cmd_gen(&args)?,
        Command::Survey(args) => cmd_survey(&args)?,
        Command::Randmodel(args) => cmd_randmodel(&args)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let capped = e
                .downcast_ref::<Error>()
                .is_some_and(Error::is_cap_exhausted);
            ExitCode::from(if capped { 2 } else { 1 })
        }
    }
}
