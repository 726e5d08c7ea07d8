use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use rescaledexp::data::Order;
use rescaledexp::harness::{
    aggregate, read_reports, run_adversary, run_once, run_sweep, write_adversary, write_reports,
    write_table, AdversaryLearner, Algorithm, RunSpec, SweepGrid,
};
use rescaledexp::verify::{bundled_datasets, generated_datasets, run_all};
use rescaledexp::{BaselineKind, DatasetHandle};
use serde_json::json;

/// Default directory for CSV output when `--out` is not given.
const OUT_DIR_ENV: &str = "RESCALEDEXP_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "rescaledexp",
    version,
    about = "Parameter-free online learning benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    File,
    Shuffle,
}

#[derive(clap::Args)]
struct RunArgs {
    /// rescaledexp, adagrad, adam, adadelta, pistol, scale_invariant or sgd_decay
    #[arg(long)]
    algo: Algorithm,
    /// libsvm file
    #[arg(long)]
    dataset: PathBuf,
    /// Coordinate-wise RescaledExp (vector mode when false)
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    coordinate_wise: bool,
    /// Re-center RescaledExp at the previous iterate on each reset
    #[arg(long, default_value_t = false, action = ArgAction::Set)]
    recenter: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OrderArg::File)]
    order: OrderArg,
    /// Output CSV; defaults to $RESCALEDEXP_OUT_DIR/<name>.csv, else stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave wall_time_ms empty so identical inputs give identical files
    #[arg(long)]
    no_timing: bool,
}

impl RunArgs {
    fn spec(&self, hyper: Option<f64>) -> RunSpec {
        RunSpec {
            algorithm: self.algo,
            hyperparameter: hyper,
            coordinate_wise: self.coordinate_wise,
            recenter: self.recenter,
            seed: self.seed,
            order: match self.order {
                OrderArg::File => Order::FileOrder,
                OrderArg::Shuffle => Order::Shuffled(self.seed),
            },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// One pass of one algorithm over a dataset
    Run {
        #[command(flatten)]
        args: RunArgs,
        /// Learning-rate scale (baselines only)
        #[arg(long)]
        hyper: Option<f64>,
    },
    /// Two-step hyperparameter sweep (a single run for rescaledexp)
    Sweep {
        #[command(flatten)]
        args: RunArgs,
    },
    /// Normalized-loss table from run/sweep CSV files
    Aggregate {
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play a learner against the lower-bound adversary
    Adversary {
        /// rescaledexp, zero, or a baseline name
        #[arg(long, default_value = "rescaledexp")]
        learner: String,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// Learning-rate scale for baseline learners
        #[arg(long, default_value_t = 1.0)]
        hyper: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks
    Verify {
        /// Directory with separable.libsvm and noisy.libsvm; generated in memory if absent
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
}

fn output_path(out: &Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    out.clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|dir| Path::new(&dir).join(default_name)))
}

fn with_output(
    path: Option<PathBuf>,
    write: impl FnOnce(&mut dyn Write) -> rescaledexp::Result<()>,
) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            let file = File::create(&p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()
                .with_context(|| format!("writing {}", p.display()))?;
            eprintln!("wrote {}", p.display());
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
        }
    }
    Ok(())
}

fn parse_learner(name: &str, hyper: f64) -> anyhow::Result<AdversaryLearner> {
    Ok(match name {
        "rescaledexp" => AdversaryLearner::RescaledExp,
        "zero" => AdversaryLearner::Zero,
        other => AdversaryLearner::Baseline {
            kind: other.parse::<BaselineKind>()?,
            scale: hyper,
        },
    })
}

fn execute(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Run { args, hyper } => {
            let ds = DatasetHandle::open(&args.dataset)?;
            let report = run_once(&ds, &args.spec(hyper))?;
            let name = format!("run_{}_{}.csv", args.algo, ds.name());
            with_output(output_path(&args.out, &name), |w| {
                write_reports(w, &[report], !args.no_timing)
            })
        }
        Command::Sweep { args } => {
            let ds = DatasetHandle::open(&args.dataset)?;
            let outcome = run_sweep(&ds, &args.spec(None), &SweepGrid::default())?;
            eprintln!(
                "best {} on {}: hyperparameter {} loss {}",
                args.algo,
                ds.name(),
                outcome
                    .best
                    .hyperparameter
                    .map_or("-".into(), |h| h.to_string()),
                outcome.best.average_loss
            );
            let name = format!("sweep_{}_{}.csv", args.algo, ds.name());
            with_output(output_path(&args.out, &name), |w| {
                write_reports(w, &outcome.reports, !args.no_timing)
            })
        }
        Command::Aggregate { inputs, out } => {
            let mut reports = Vec::new();
            for path in &inputs {
                let file = File::open(path).map_err(|e| rescaledexp::Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                reports.extend(read_reports(file)?);
            }
            let table = aggregate(&reports)?;
            with_output(output_path(&out, "table.csv"), |w| write_table(w, &table))
        }
        Command::Adversary {
            learner,
            c,
            k,
            eps,
            hyper,
            out,
        } => {
            let report = run_adversary(parse_learner(&learner, hyper)?, c, k, eps)?;
            with_output(output_path(&out, "adversary.csv"), |w| {
                write_adversary(w, &[report])
            })
        }
        Command::Verify { data_dir } => {
            let datasets = match data_dir {
                Some(dir) => bundled_datasets(&dir)?,
                None => generated_datasets()?,
            };
            let outcomes = run_all(&datasets);
            for o in &outcomes {
                println!("{o}");
            }
            let failed: Vec<String> = outcomes
                .iter()
                .filter(|o| !o.passed)
                .map(|o| o.id.to_string())
                .collect();
            if !failed.is_empty() {
                bail!(VerifyFailed(failed.join(",")));
            }
            Ok(())
        }
    }
}

#[derive(Debug)]
struct VerifyFailed(String);

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "checks failed: {}", self.0)
    }
}

impl std::error::Error for VerifyFailed {}

fn error_kind(err: &anyhow::Error) -> &'static str {
    if let Some(e) = err.downcast_ref::<rescaledexp::Error>() {
        e.kind()
    } else if err.downcast_ref::<VerifyFailed>().is_some() {
        "verify"
    } else if err.downcast_ref::<io::Error>().is_some() {
        "io"
    } else {
        "internal"
    }
}

/// Joins the cause chain, skipping causes whose text the outer message already shows.
fn message(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn report_error(kind: &str, message: &str) -> ExitCode {
    eprintln!(
        "{}",
        json!({ "error": { "kind": kind, "message": message } })
    );
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            return report_error(
                "usage",
                message.lines().next().unwrap_or("invalid arguments"),
            );
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(error_kind(&e), &message(&e)),
    }
}
