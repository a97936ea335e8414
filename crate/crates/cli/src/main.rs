mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use algoprob::analysis::{
    aligned_pairs, build_entry, compare_models, convergence_profile, naturalness_test, plot_csv,
    profile_csv, raw_file_name, reduced_file_name, CompareOptions, DistributionSequence,
    OrderOptions, DEFAULT_C,
};
use algoprob::io::write_atomic;
use algoprob::rankstats::{significance_table, significance_table_csv, Mode, Tail};
use algoprob::rulespace::{tm_space_size, EcaRule, TmProgram, ECA_SPACE_SIZE};
use algoprob::sampling::{Distribution, ExtractionPolicy, StopRule};

use config::{ModelKind, RunConfig};

#[derive(Parser)]
#[command(
    name = "algoprob",
    version,
    about = "Output-frequency distributions of small machines and their rank comparison"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count, decode or list the rules of a model.
    Enumerate(EnumerateArgs),
    /// Sample a model and write raw and reduced distribution files per length.
    Distribution(DistributionArgs),
    /// Correlate two distribution sequences length by length.
    Compare(CompareArgs),
    /// Order-preservation verdict of a candidate sequence against a reference.
    Naturalness(NaturalnessArgs),
    /// Exact Spearman p-values for every attainable coefficient.
    SignificanceTable(TableArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Tm)]
    model: ModelKind,
    #[arg(long, default_value_t = 2)]
    symbols: u8,
    #[arg(long, default_value_t = 2)]
    states: u8,
    /// Print the number of rules (the default action).
    #[arg(long, conflicts_with_all = ["index", "list"])]
    count: bool,
    /// Print the transition table of one rule.
    #[arg(long, conflicts_with = "list")]
    index: Option<u64>,
    /// Print every rule, one per line.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct DistributionArgs {
    /// TOML file with any of the run settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    #[arg(long)]
    symbols: Option<u8>,
    #[arg(long)]
    states: Option<u8>,
    /// Single string length.
    #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
    n: Option<usize>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Step budget for every length (default: 10 per symbol).
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    steps_per_symbol: Option<u64>,
    /// exact-length, all-substrings, center-window or prefix.
    #[arg(long)]
    policy: Option<ExtractionPolicy>,
    /// fixed-steps or uniform-random-stop.
    #[arg(long)]
    stop_rule: Option<StopRule>,
    /// all, schedule or a rule count.
    #[arg(long)]
    sample_size: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses one per core.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SignificanceArgs {
    /// one-sided or two-sided.
    #[arg(long, default_value = "one-sided")]
    tail: Tail,
    /// auto, exact or monte-carlo.
    #[arg(long, default_value = "auto")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte-Carlo permutations.
    #[arg(long, default_value_t = algoprob::rankstats::DEFAULT_MONTE_CARLO_SAMPLES)]
    samples: u64,
}

impl SignificanceArgs {
    fn options(&self) -> CompareOptions {
        CompareOptions {
            tail: self.tail,
            mode: self.mode,
            seed: self.seed,
            samples: self.samples,
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    /// Directory of reduced_n*.json files, or a single distribution file.
    a: PathBuf,
    b: PathBuf,
    #[command(flatten)]
    significance: SignificanceArgs,
    /// Report CSV; printed to standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for per-length rank-aligned weight pairs.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
    /// Directory for the convergence profiles of both sequences.
    #[arg(long)]
    profile_dir: Option<PathBuf>,
}

#[derive(Args)]
struct NaturalnessArgs {
    candidate: PathBuf,
    reference: PathBuf,
    /// Significance threshold.
    #[arg(long, default_value_t = DEFAULT_C)]
    c: f64,
    /// Compare only classes above this weight in both distributions.
    #[arg(long, default_value_t = 0.0)]
    frequency_floor: f64,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[command(flatten)]
    significance: SignificanceArgs,
    /// Per-length evidence CSV; printed after the verdict when absent.
    #[arg(long)]
    evidence: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 8)]
    max_m: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn enumerate(args: &EnumerateArgs) -> anyhow::Result<()> {
    match args.model {
        ModelKind::Tm => {
            let size = tm_space_size(args.symbols, args.states)?;
            if let Some(index) = args.index {
                print!("{}", TmProgram::decode(index, args.symbols, args.states)?);
            } else if args.list {
                for index in 0..size {
                    let p = TmProgram::decode(index, args.symbols, args.states)?;
                    let codes: Vec<String> = p
                        .table()
                        .iter()
                        .map(|a| a.encode(args.states).to_string())
                        .collect();
                    println!("{index} {}", codes.join(" "));
                }
            } else {
                println!("{size}");
            }
        }
        ModelKind::Eca => {
            if let Some(index) = args.index {
                let number = u8::try_from(index).map_err(|_| algoprob::Error::OutOfRange {
                    index,
                    size: ECA_SPACE_SIZE,
                })?;
                println!("{}", EcaRule::new(number));
            } else if args.list {
                for number in 0..=255u8 {
                    println!("{}", EcaRule::new(number));
                }
            } else {
                println!("{ECA_SPACE_SIZE}");
            }
        }
    }
    Ok(())
}

fn distribution(args: &DistributionArgs) -> anyhow::Result<()> {
    let flags = RunConfig {
        model: args.model,
        symbols: args.symbols,
        states: args.states,
        n: args.n,
        n_min: args.n_min,
        n_max: args.n_max,
        steps: args.steps,
        steps_per_symbol: args.steps_per_symbol,
        policy: args.policy,
        stop_rule: args.stop_rule,
        sample_size: args.sample_size.clone(),
        seed: args.seed,
        workers: args.workers,
        out: args.out.clone(),
        ..Default::default()
    };
    let file = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let config = flags.over(file).resolved()?;
    let specs = config.experiments()?;
    let Some(out) = config.out.clone() else {
        bail!("no output directory: pass --out or set `out` in the config file");
    };
    std::fs::create_dir_all(&out).map_err(|e| algoprob::Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let workers = config.workers.unwrap_or(0);
    for spec in &specs {
        let entry = build_entry::<f64>(spec, workers)?;
        let raw_path = out.join(raw_file_name(spec.n));
        let reduced_path = out.join(reduced_file_name(spec.n));
        entry.raw.save(&raw_path)?;
        entry.reduced.save(&reduced_path)?;
        println!(
            "n={} {} strings, {} classes -> {}",
            spec.n,
            entry.raw.len(),
            entry.reduced.len(),
            reduced_path.display()
        );
    }
    write_atomic(&out.join("config.toml"), config.to_toml().as_bytes())?;
    Ok(())
}

/// A directory of reduced files, or one distribution file.
fn load_sequence(path: &Path) -> anyhow::Result<DistributionSequence> {
    if path.is_dir() {
        return Ok(DistributionSequence::load_dir(path)?);
    }
    let d = Distribution::load(path)?;
    let model = d.meta().experiment.map(|e| e.model);
    Ok(DistributionSequence::from_distributions(model, [d])?)
}

fn common_lengths(a: &DistributionSequence, b: &DistributionSequence) -> anyhow::Result<()> {
    if !a.lengths().any(|n| b.get(n).is_some()) {
        bail!(
            "the two inputs share no string length ({:?} vs {:?})",
            a.lengths().collect::<Vec<_>>(),
            b.lengths().collect::<Vec<_>>()
        );
    }
    Ok(())
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn compare(args: &CompareArgs) -> anyhow::Result<()> {
    let a = load_sequence(&args.a)?;
    let b = load_sequence(&args.b)?;
    common_lengths(&a, &b)?;
    let report = compare_models(&a, &b, &args.significance.options());
    let mut extra: BTreeMap<PathBuf, String> = BTreeMap::new();
    if let Some(dir) = &args.plot_dir {
        for (n, da) in &a.per_n {
            if let Some(db) = b.get(*n) {
                extra.insert(
                    dir.join(format!("plot_n{n:02}.csv")),
                    plot_csv(&aligned_pairs(da, db)),
                );
            }
        }
    }
    if let Some(dir) = &args.profile_dir {
        for (name, seq) in [("profile_a.csv", &a), ("profile_b.csv", &b)] {
            let ds: Vec<Distribution> = seq.per_n.values().cloned().collect();
            if ds.len() >= 2 {
                extra.insert(dir.join(name), profile_csv(&convergence_profile(&ds)?));
            }
        }
    }
    for (path, text) in &extra {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| algoprob::Error::Io {
                path: parent.to_owned(),
                source: e,
            })?;
        }
        write_atomic(path, text.as_bytes())?;
    }
    write_or_print(args.out.as_deref(), &report.to_csv())
}

fn naturalness(args: &NaturalnessArgs) -> anyhow::Result<()> {
    let window = |seq: DistributionSequence| DistributionSequence {
        model: seq.model,
        per_n: seq
            .per_n
            .into_iter()
            .filter(|(n, _)| {
                args.n_min.is_none_or(|lo| *n >= lo) && args.n_max.is_none_or(|hi| *n <= hi)
            })
            .collect(),
    };
    let candidate = window(load_sequence(&args.candidate)?);
    let reference = window(load_sequence(&args.reference)?);
    common_lengths(&candidate, &reference)?;
    if !(args.c > 0.0 && args.c < 1.0) {
        bail!("c must lie strictly between 0 and 1, got {}", args.c);
    }
    let options = OrderOptions {
        c: args.c,
        frequency_floor: args.frequency_floor,
        compare: args.significance.options(),
    };
    let report = naturalness_test(&candidate, &reference, &options);
    if let Some(path) = &args.evidence {
        write_atomic(path, report.to_csv().as_bytes())?;
    }
    println!("{}", report.verdict);
    if args.evidence.is_none() {
        print!("{}", report.to_csv());
    }
    Ok(())
}

fn table(args: &TableArgs) -> anyhow::Result<()> {
    let rows = significance_table(args.max_m).context("cannot build the table")?;
    write_or_print(args.out.as_deref(), &significance_table_csv(&rows))
}

/// 1 usage or configuration, 2 I/O, 3 capacity.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<algoprob::Error>() {
            return match e {
                algoprob::Error::Io { .. } | algoprob::Error::Format { .. } => 2,
                algoprob::Error::Capacity(_) => 3,
                _ => 1,
            };
        }
        if cause.is::<std::io::Error>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Enumerate(a) => enumerate(a),
        Command::Distribution(a) => distribution(a),
        Command::Compare(a) => compare(a),
        Command::Naturalness(a) => naturalness(a),
        Command::SignificanceTable(a) => table(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
