use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvqan::commands::{self, Context, PmOverrides};
use cvqan::CliError;
use cvqan_core::network::CovarianceView;

/// Key-rate experiments on thermal-state CV-QKD access networks.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    #[arg(short, long)]
    scenario: PathBuf,
    /// Output directory; overrides the scenario's `output_dir`.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Master seed; overrides the scenario's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum View {
    Initial,
    PostAllocation,
    PostSplitting,
    BobSide,
}

impl From<View> for CovarianceView {
    fn from(v: View) -> Self {
        match v {
            View::Initial => CovarianceView::Initial,
            View::PostAllocation => CovarianceView::PostAllocation,
            View::PostSplitting => CovarianceView::PostSplitting,
            View::BobSide => CovarianceView::BobSide,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Key-rate report per policy.
    Skr {
        #[command(flatten)]
        common: Common,
        /// Restrict to policies with these labels, e.g. `local-trusted-AC`.
        #[arg(long = "policy")]
        policies: Vec<String>,
    },
    /// Aggregate key rate along the scenario's sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Per-user key rates of sampled users.
    Heatmap {
        #[command(flatten)]
        common: Common,
    },
    /// Network covariance matrices.
    Covmat {
        #[command(flatten)]
        common: Common,
        /// Views to export; all when omitted.
        #[arg(long = "view", value_enum)]
        views: Vec<View>,
    },
    /// PLOB bounds per user and for the network.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// Compare simulated prepare-and-measure statistics with the entanglement-based covariance.
    PmValidate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        symbols: Option<usize>,
        /// Allow networks beyond the mode guard.
        #[arg(long)]
        allow_large: bool,
        /// Relative tolerance per entry.
        #[arg(long)]
        rel_tol: Option<f64>,
        /// Statistical tolerance per entry in standard errors.
        #[arg(long)]
        sigma_tol: Option<f64>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Skr { common, .. }
            | Command::Sweep { common }
            | Command::Heatmap { common }
            | Command::Covmat { common, .. }
            | Command::Bounds { common }
            | Command::PmValidate { common, .. } => common,
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let common = cli.command.common();
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build_global()
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let ctx = Context::new(&common.scenario, common.out.clone(), common.seed)?;
    match &cli.command {
        Command::Skr { policies, .. } => commands::skr(&ctx, policies),
        Command::Sweep { .. } => commands::sweep(&ctx),
        Command::Heatmap { .. } => commands::heatmap(&ctx),
        Command::Covmat { views, .. } => commands::covmat(&ctx, &views.iter().map(|&v| v.into()).collect::<Vec<_>>()),
        Command::Bounds { .. } => commands::bounds(&ctx),
        Command::PmValidate { symbols, allow_large, rel_tol, sigma_tol, .. } => commands::pm_validate(
            &ctx,
            &PmOverrides {
                symbols: *symbols,
                allow_large: *allow_large,
                rel_tolerance: *rel_tol,
                sigma_tolerance: *sigma_tol,
            },
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
