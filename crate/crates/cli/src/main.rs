mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Failure;

/// Higher-order freeness checks for representations of U(n) and their
/// random-matrix counterparts.
#[derive(Parser, Debug)]
#[command(name = "freerep", version)]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output files; without it the main table goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON experiment configuration merged onto the command's defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for data-parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Naive and natural spectral data of one irreducible.
    Spectral {
        /// Strictly decreasing shifted weight, e.g. `2,0`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        l: Vec<i64>,
        /// Scale, as a rational or finite decimal.
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long, default_value_t = 4)]
        orders: usize,
    },
    /// Kronecker products against free convolution and sums of matrices.
    Tensor(ExperimentArgs),
    /// Restriction to U(m) against free compression and corners.
    Restrict(ExperimentArgs),
    /// Exact macro/micro identities and the exponent inequality.
    HofCheck {
        #[arg(long, value_delimiter = ',', default_value = "4,5")]
        n: Vec<usize>,
        /// Largest total power `p_1 + .. + p_r` in the identities.
        #[arg(long, default_value_t = 4)]
        max_order: usize,
        /// Largest `k` for the exhaustive inequality check.
        #[arg(long, default_value_t = 6)]
        inequality_order: usize,
        /// Allow `n < k` through the pseudo-inverse Weingarten function.
        #[arg(long)]
        extended: bool,
        /// Schedule (at least 3 sizes) for a limit record of the mixture ensemble.
        #[arg(long, value_delimiter = ',')]
        limits: Option<Vec<usize>>,
    },
    /// Replica trace tables and fluctuation summaries.
    Simulate {
        #[command(flatten)]
        common: ExperimentArgs,
        /// Explicit eigenvalues (unscaled), repeated to fill each n.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        spectrum: Option<Vec<String>>,
        /// Also write an SVG eigenvalue histogram per n (needs --out).
        #[arg(long)]
        histogram: bool,
    },
    /// Free convolution and compression of atomic measures.
    Freeconv {
        /// Atoms `x:w,..` of the first measure.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Atoms of the second measure.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        /// Compress the first measure by a projection of this trace.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 6)]
        orders: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct ExperimentArgs {
    /// Overrides the n schedule.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Overrides the replica count.
    #[arg(long)]
    replicas: Option<usize>,
    /// Exact columns only.
    #[arg(long)]
    no_mc: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("freerep: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Failure::validation("--threads must be at least 1"));
        }
        freerep::exec::configure_threads(k);
    }
    let ctx = commands::Context {
        seed: cli.seed,
        out: cli.out,
        config: cli.config,
    };
    match cli.command {
        Command::Spectral { l, eps, orders } => commands::spectral(&ctx, l, &eps, orders),
        Command::Tensor(args) => commands::tensor(&ctx, &args),
        Command::Restrict(args) => commands::restrict(&ctx, &args),
        Command::HofCheck {
            n,
            max_order,
            inequality_order,
            extended,
            limits,
        } => commands::hof_check(&ctx, &n, max_order, inequality_order, extended, limits.as_deref()),
        Command::Simulate {
            common,
            spectrum,
            histogram,
        } => commands::simulate(&ctx, &common, spectrum.as_deref(), histogram),
        Command::Freeconv { a, b, alpha, orders } => {
            commands::freeconv(&ctx, &a, b.as_deref(), alpha.as_deref(), orders)
        }
    }
}
