//! `twwlab`: twin-width tooling for ordered binary structures.
mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::{emit, Session, UsageError};

#[derive(Debug, Parser)]
#[command(
    name = "twwlab",
    version,
    about = "Twin-width of ordered binary structures"
)]
struct Cli {
    /// Print a JSON run report instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact twin-width by exhaustive search.
    TwwExact(TwwExactArgs),
    /// Smallest k for which the builder succeeds with t = k.
    TwwApprox(TwwApproxArgs),
    /// One builder run: a contraction sequence or a mixed minor.
    Algo(AlgoArgs),
    #[command(subcommand)]
    Minors(MinorsCommand),
    #[command(subcommand)]
    Semigrid(SemigridCommand),
    /// Evaluate a sentence on a structure.
    Mc(McArgs),
    /// Count structures avoiding a set of induced patterns.
    Census(CensusArgs),
    /// Check a merge list and report its red degree.
    VerifySeq(VerifySeqArgs),
}

#[derive(Debug, Args)]
struct TwwExactArgs {
    /// Structure in `.obs` format.
    structure: PathBuf,
    /// Largest accepted domain size.
    #[arg(long, default_value_t = twwlab_core::exact::DEFAULT_EXACT_CAP)]
    cap: usize,
    /// Also write the optimal merge list here.
    #[arg(long, value_name = "PATH")]
    seq: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Thresholds {
    /// Grid-minor density profile: linear or exp8.
    #[arg(long, default_value = "linear")]
    profile: String,
    /// Upper bound on the class threshold c.
    #[arg(long, default_value_t = twwlab_core::builder::DEFAULT_C_CEILING)]
    c_ceiling: usize,
}

#[derive(Debug, Args)]
struct TwwApproxArgs {
    structure: PathBuf,
    #[command(flatten)]
    thresholds: Thresholds,
    #[arg(long, value_name = "PATH")]
    seq: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AlgoArgs {
    structure: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    t: usize,
    /// Initial exception bound.
    #[arg(long)]
    b: Option<usize>,
    /// Initial class bound.
    #[arg(long)]
    c: Option<usize>,
    #[command(flatten)]
    thresholds: Thresholds,
}

#[derive(Debug, Subcommand)]
enum MinorsCommand {
    /// Search a t-grid minor in a 0-1 matrix.
    Grid {
        /// Matrix text or `.obs` structure.
        matrix: PathBuf,
        #[arg(long)]
        t: usize,
    },
    /// Search a (k, t)-mixed minor.
    Mixed {
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
    },
    /// Minimal column intervals with at least k distinct rows over a row interval.
    Bad {
        matrix: PathBuf,
        /// Half-open row interval `a:b`.
        #[arg(long)]
        rows: String,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Subcommand)]
enum SemigridCommand {
    /// Generate a semigrid, or G^S when cells are given.
    Gen {
        /// Index in enumeration order.
        #[arg(long)]
        scheme: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Cells `i j` (1-based), one per line.
        #[arg(long, value_name = "PATH")]
        cells: Option<PathBuf>,
        /// Signature, `graph` or symbols like `E:2 F:2`.
        #[arg(long, default_value = "graph")]
        sig: String,
    },
    /// Recover (m, n, S) from G^S.
    Decode {
        structure: PathBuf,
        #[arg(long)]
        scheme: usize,
    },
    /// Recognize a regular semigrid.
    Classify { structure: PathBuf },
    /// Count or list schemes.
    Schemes {
        #[arg(long, default_value = "graph")]
        sig: String,
        /// List graph schemes with their indices.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, value_name = "PATH")]
    formula: PathBuf,
    #[arg(long, value_name = "PATH")]
    structure: PathBuf,
    /// Free-variable assignment `x=3`, repeatable.
    #[arg(long = "assign", value_name = "VAR=ELEM")]
    assign: Vec<String>,
    #[arg(long, default_value_t = 64)]
    depth_budget: usize,
}

#[derive(Debug, Args)]
struct CensusArgs {
    /// Directory of `.obs` patterns.
    #[arg(long, value_name = "DIR")]
    forbid: PathBuf,
    #[arg(long)]
    n_max: usize,
    /// `graphs` or `structures`.
    #[arg(long, default_value = "graphs")]
    universe: String,
    /// Signature for `--universe structures`.
    #[arg(long)]
    sig: Option<String>,
    /// Search-node budget per size.
    #[arg(long, default_value_t = twwlab_core::census::DEFAULT_NODE_BUDGET)]
    budget: u64,
}

#[derive(Debug, Args)]
struct VerifySeqArgs {
    structure: PathBuf,
    /// Merge list.
    seq: PathBuf,
}

fn configure_threads() -> anyhow::Result<usize> {
    match std::env::var("TWWLAB_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| {
                UsageError::new("TWWLAB_THREADS", format!("{v:?} is not a thread count"))
            })?;
            if n == 0 {
                return Err(UsageError::new("TWWLAB_THREADS", "must be at least 1").into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
            Ok(n)
        }
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

fn run(cli: Cli, argv: Vec<String>) -> anyhow::Result<()> {
    let threads = configure_threads()?;
    let mut session = Session::new(argv);
    let out = commands::dispatch(&cli.command, &mut session)?;
    let text = if cli.json {
        let mut config = out.config;
        config["threads"] = threads.into();
        serde_json::to_string_pretty(&session.finish(out.outcome, config))?
    } else {
        out.text
    };
    emit(cli.out.as_ref(), &text)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
