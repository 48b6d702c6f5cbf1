//! `overlap`: exact, limiting and simulated laws of the longest border.
//!
//! Exit codes: 0 success, 2 invalid flags, 3 enumeration budget exceeded,
//! 4 verification failure, 1 anything else (I/O).

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use overlap_dist::bounds::bounds_report;
use overlap_dist::exact_dist::{enumerate_distribution, DistTable, Exhaustive};
use overlap_dist::limit_series::SeriesEngine;
use overlap_dist::montecarlo::{sample_distribution, McConfig};
use overlap_dist::output::{Artifact, Emit, RunManifest};
use overlap_dist::verify::{run_verify, Depth};
use overlap_dist::zero_words::{limit_zero, unbordered_count, zero_recursion};
use overlap_dist::{make_theta, AlphabetSpec, Budget, Error, Mode, Scalar, Theta};

#[derive(Parser)]
#[command(
    name = "overlap",
    version,
    about = "Distribution of the longest self-overlap of random words"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Emit JSON (the default when neither --json nor --csv is given).
    #[arg(long, global = true)]
    json: bool,
    /// Emit plot-ready CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Write every rendering (`<command>.json`, `.csv`, `.md`) into this
    /// directory instead of printing to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Maximum number of words one exhaustive enumeration may visit.
    /// Defaults to $OVERLAP_BUDGET or 1e8.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Record wall-clock time in the manifest.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Clone)]
#[command(group(ArgGroup::new("alphabet").args(["theta", "uniform", "geometric"])))]
struct Alphabet {
    /// Letter probabilities, e.g. `0.7,0.3` or `1/3,2/3`.
    #[arg(long)]
    theta: Option<String>,
    /// Uniform law on this many letters.
    #[arg(long)]
    uniform: Option<usize>,
    /// Geometric law `p_a = (1-r) r^a` with this ratio.
    #[arg(long)]
    geometric: Option<f64>,
    /// Truncation threshold for --geometric.
    #[arg(long, default_value_t = 1e-12, requires = "geometric")]
    trunc_eps: f64,
    /// Force exact rational arithmetic.
    #[arg(long)]
    rational: bool,
}

impl Alphabet {
    fn theta(&self) -> Result<Theta, Error> {
        let spec = match (&self.theta, self.uniform, self.geometric) {
            (Some(list), _, _) => AlphabetSpec::parse_list(list)?,
            (_, Some(s), _) => AlphabetSpec::Uniform(s),
            (_, _, Some(ratio)) => AlphabetSpec::Geometric {
                ratio,
                trunc_eps: self.trunc_eps,
            },
            _ => AlphabetSpec::Uniform(2),
        };
        make_theta(spec)
    }

    /// Exact when forced or when the input is rational and `exact_default` holds.
    fn mode(&self, theta: &Theta, exact_default: bool) -> Result<Mode, Error> {
        if self.rational && !theta.is_exact() {
            return Err(Error::NotRational);
        }
        Ok(if self.rational || (exact_default && theta.is_exact()) {
            Mode::ExactRational
        } else {
            Mode::Float
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Enumeration,
    Decomposition,
}

#[derive(Subcommand)]
enum Command {
    /// Law of S_n at one length.
    #[command(group(ArgGroup::new("how").args(["exact", "mc"]).required(true)))]
    Dist {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "enumeration")]
        method: Method,
        #[command(flatten)]
        alphabet: Alphabet,
    },
    /// Limits of P(S_n = k) and P(S_n >= k) with certified tail bounds.
    Limit {
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        alphabet: Alphabet,
    },
    /// Run the self-check suite.
    #[command(group(ArgGroup::new("depth").args(["quick", "full"])))]
    Verify {
        /// Exhaustive checks up to length 10 (the default).
        #[arg(long)]
        quick: bool,
        /// Exhaustive checks up to length 14.
        #[arg(long)]
        full: bool,
        /// Also fail on refuted claims.
        #[arg(long)]
        strict: bool,
    },
    /// Number of unbordered words of each length on s letters.
    Count {
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        s: usize,
    },
    /// P(S_n = 0) for n <= n_max and its limit.
    Zero {
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        alphabet: Alphabet,
    },
    /// Velocity grid, correction majorants and leading-term analysis.
    Bounds {
        /// Lengths as `LO..HI` (inclusive) or a single length.
        #[arg(long, default_value = "4..12", value_parser = parse_grid)]
        grid: RangeInclusive<usize>,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        alphabet: Alphabet,
    },
}

fn parse_grid(text: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"));
    match text.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (parse(lo)?, parse(hi.trim_start_matches('='))?);
            if lo > hi {
                return Err(format!("empty grid {lo}..{hi}"));
            }
            Ok(lo..=hi)
        }
        None => parse(text).map(|n| n..=n),
    }
}

enum Failure {
    Lib(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let mut manifest = RunManifest::new(name);
    let command = Cli::command();
    let top = command.get_arguments().map(|a| (a, &matches));
    let own = command
        .find_subcommand(name)
        .expect("known subcommand")
        .get_arguments()
        .map(|a| (a, sub));
    for (arg, m) in top.chain(own) {
        let id = arg.get_id().as_str();
        if let Ok(Some(raw)) = m.try_get_raw(id) {
            let values = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            manifest = manifest.flag(id, values);
        }
    }
    match run(cli, manifest) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(4),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidTheta(_) | Error::InvalidArgument(_) | Error::NotRational | Error::Parse(_) => 2,
                Error::BudgetExceeded { .. } => 3,
                Error::Io(_) => 1,
            })
        }
    }
}

fn run(cli: Cli, manifest: RunManifest) -> Result<(), Failure> {
    let common = cli.common;
    if let Some(threads) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("--threads: {e}")))?;
    }
    let budget = common.budget.map(Budget).unwrap_or_default();
    let emit = Emit {
        json: common.json || !common.csv || common.out.is_some(),
        csv: common.csv || common.out.is_some(),
        markdown: common.out.is_some(),
        out: common.out.clone(),
    };
    let start = Instant::now();
    let finish = |manifest: RunManifest| {
        if common.timing {
            manifest.timed(start.elapsed())
        } else {
            manifest
        }
    };

    match cli.command {
        Command::Dist {
            n,
            exact,
            samples,
            seed,
            method,
            alphabet,
            ..
        } => {
            let theta = alphabet.theta()?;
            if exact {
                let mode = alphabet.mode(&theta, true)?;
                let manifest = manifest.theta(&theta).mode(mode);
                let artifact = match mode {
                    Mode::ExactRational => dist_exact::<BigRational>(n, &theta, method, budget)?,
                    Mode::Float => dist_exact::<f64>(n, &theta, method, budget)?,
                };
                let (json, csv) = artifact;
                write(&emit, Artifact::new("dist", &finish(manifest), json).with_csv(csv))?;
            } else {
                let cfg = McConfig::new(n, samples, seed)?;
                let result = sample_distribution(&cfg, &theta);
                let manifest = manifest.theta(&theta).mode(Mode::Float).seed(seed);
                let artifact =
                    Artifact::new("dist", &finish(manifest), result.to_json(&theta)).with_csv(result.to_csv());
                write(&emit, artifact)?;
            }
        }
        Command::Limit { k_max, tol, alphabet } => {
            let theta = alphabet.theta()?;
            let mode = alphabet.mode(&theta, false)?;
            let manifest = manifest.theta(&theta).mode(mode);
            let (json, csv, flagged) = match mode {
                Mode::ExactRational => limit_rows::<BigRational>(k_max, tol, &theta, budget)?,
                Mode::Float => limit_rows::<f64>(k_max, tol, &theta, budget)?,
            };
            if flagged > 0 {
                eprintln!("warning: {flagged} rows did not reach --tol {tol:e} within the budget; see `flagged`");
            }
            write(&emit, Artifact::new("limit", &finish(manifest), json).with_csv(csv))?;
        }
        Command::Verify { full, strict, .. } => {
            let depth = if full { Depth::Full } else { Depth::Quick };
            let report = run_verify(depth, budget)?;
            let artifact =
                Artifact::new("verify", &finish(manifest), report.to_json()).with_markdown(report.to_markdown());
            let emit = Emit { markdown: true, ..emit };
            write(&emit, artifact)?;
            if report.failed(strict) {
                return Err(Failure::Verification);
            }
        }
        Command::Count { n_max, s } => {
            let counts = unbordered_count(n_max, s)?;
            let rows: Vec<String> = (1..=n_max).map(|n| counts.get(n).to_string()).collect();
            let mut csv = String::from("n,count\n");
            for (n, c) in rows.iter().enumerate() {
                csv.push_str(&format!("{},{c}\n", n + 1));
            }
            let json = json!({ "s": s, "n_max": n_max, "counts": rows });
            write(&emit, Artifact::new("count", &finish(manifest), json).with_csv(csv))?;
        }
        Command::Zero { n_max, tol, alphabet } => {
            let theta = alphabet.theta()?;
            let mode = alphabet.mode(&theta, true)?;
            let manifest = manifest.theta(&theta).mode(mode);
            let (json, csv) = match mode {
                Mode::ExactRational => zero_rows::<BigRational>(n_max, tol, &theta, budget)?,
                Mode::Float => zero_rows::<f64>(n_max, tol, &theta, budget)?,
            };
            write(&emit, Artifact::new("zero", &finish(manifest), json).with_csv(csv))?;
        }
        Command::Bounds {
            grid,
            k_max,
            tol,
            alphabet,
        } => {
            let theta = alphabet.theta()?;
            let report = bounds_report(&theta, grid, k_max, tol, budget)?;
            let manifest = manifest.theta(&theta).mode(Mode::Float);
            let artifact = Artifact::new("bounds", &finish(manifest), report.to_json())
                .with_csv(report.velocity.to_csv())
                .with_markdown(report.to_markdown());
            write(&emit, artifact)?;
        }
    }
    Ok(())
}

fn write(emit: &Emit, artifact: Artifact) -> Result<(), Failure> {
    for path in emit.write(&artifact)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn dist_exact<T: Scalar>(
    n: usize,
    theta: &Theta,
    method: Method,
    budget: Budget,
) -> Result<(serde_json::Value, String), Error> {
    let table: DistTable<T> = match method {
        Method::Enumeration => enumerate_distribution(n, theta, budget)?,
        Method::Decomposition => Exhaustive::new(theta, budget).decomposed_distribution(n)?,
    };
    Ok((table.to_json(theta), table.to_csv()))
}

fn limit_rows<T: Scalar>(
    k_max: usize,
    tol: f64,
    theta: &Theta,
    budget: Budget,
) -> Result<(serde_json::Value, String, usize), Error> {
    let zero = limit_zero::<T>(theta, tol, budget)?;
    let mut engine = SeriesEngine::new(theta, budget);
    let mut csv = String::from("k,limit_pmf,tail_bound\n");
    csv.push_str(&format!(
        "0,{:e},{:e}\n",
        zero.series.value.as_f64(),
        zero.series.tail_bound
    ));
    let mut flagged = usize::from(zero.series.flagged);
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let pmf = engine.limit_pmf::<T>(k, tol)?;
        let tail = engine.limit_cdf_tail::<T>(k, tol)?;
        flagged += usize::from(pmf.flagged) + usize::from(tail.flagged);
        csv.push_str(&format!("{k},{:e},{:e}\n", pmf.value.as_f64(), pmf.tail_bound));
        rows.push(json!({ "k": k, "pmf": pmf.to_json(), "tail": tail.to_json() }));
    }
    let json = json!({
        "mode": T::MODE,
        "theta": theta.echo(),
        "zero": zero.to_json(),
        "rows": rows,
    });
    Ok((json, csv, flagged))
}

fn zero_rows<T: Scalar>(
    n_max: usize,
    tol: f64,
    theta: &Theta,
    budget: Budget,
) -> Result<(serde_json::Value, String), Error> {
    let seq = zero_recursion::<T>(n_max, theta, budget)?;
    let limit = limit_zero::<T>(theta, tol, budget)?;
    let values: Vec<serde_json::Value> = (1..=n_max).map(|n| seq.get(n).to_json()).collect();
    let json = json!({
        "mode": T::MODE,
        "theta": theta.echo(),
        "producer": seq.producer,
        "p_zero": values,
        "parity_holds": seq.parity_holds(),
        "even_decreasing": seq.even_decreasing(),
        "limit": limit.to_json(),
    });
    Ok((json, seq.to_csv()))
}
