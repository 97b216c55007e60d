use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fredholm_dsm::{DiscrepancyForm, SolverConfig};
use fredholm_dsm_experiment::{
    run_row, run_table, summarize, write_csv, write_trace, ExperimentError, ExperimentRow,
    NoiseDistribution, NoiseSpec, Scheme, SummaryRow, TableSpec, PAPER_FIXED_M, PAPER_NOISE_LEVELS,
};

#[derive(Parser)]
#[command(
    name = "fredholm-dsm",
    version,
    about = "Adaptive-level DSM for Fredholm equations of the first kind"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the inverse Laplace test problem once per scheme.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Relative noise level.
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-iteration trace CSV of the first scheme.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sweep noise levels and seeds and report medians.
    Table {
        #[command(flatten)]
        common: Common,
        /// Relative noise levels.
        #[arg(long, value_delimiter = ',')]
        noise: Option<Vec<f64>>,
        /// Explicit seeds; overrides `--seeds`.
        #[arg(long, value_delimiter = ',')]
        seed: Option<Vec<u64>>,
        /// Use seeds `0..n`.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Adaptive,
    Fixed,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum GnmVariant {
    Formal,
    Listing,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistributionArg {
    Uniform,
    Gaussian,
}

#[derive(Args)]
struct Common {
    /// Starting values for every unset constant.
    #[arg(long, value_enum, default_value = "paper")]
    preset: Preset,
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "C")]
    c: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, value_enum, default_value = "both")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = PAPER_FIXED_M)]
    fixed_m: u32,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    m_cap: Option<u32>,
    /// Stop when the level schedule exceeds `--m-cap` instead of clamping.
    #[arg(long)]
    stop_at_cap: bool,
    #[arg(long, value_enum, default_value = "formal")]
    gnm_variant: GnmVariant,
    #[arg(long, value_enum, default_value = "uniform")]
    distribution: DistributionArg,
    /// Row CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<SolverConfig, ExperimentError> {
        let base = match self.preset {
            Preset::Paper => SolverConfig::paper(),
        };
        let mut config = SolverConfig::new(
            self.alpha0.unwrap_or(base.alpha0()),
            self.q.unwrap_or(base.q()),
            self.c.unwrap_or(base.c()),
            self.eps.unwrap_or(base.eps()),
            self.eta.unwrap_or(base.eta()),
        )?
        .with_discrepancy(match self.gnm_variant {
            GnmVariant::Formal => DiscrepancyForm::Formal,
            GnmVariant::Listing => DiscrepancyForm::Listing,
        })
        .with_stop_at_cap(self.stop_at_cap);
        if let Some(n) = self.max_iter {
            config = config.with_max_iter(n)?;
        }
        if let Some(m) = self.m_cap {
            config = config.with_m_cap(m)?;
        }
        Ok(config)
    }

    fn schemes(&self) -> Vec<Scheme> {
        match self.scheme {
            SchemeArg::Adaptive => vec![Scheme::Adaptive],
            SchemeArg::Fixed => vec![Scheme::Fixed],
            SchemeArg::Both => vec![Scheme::Adaptive, Scheme::Fixed],
        }
    }

    fn distribution(&self) -> NoiseDistribution {
        match self.distribution {
            DistributionArg::Uniform => NoiseDistribution::Uniform,
            DistributionArg::Gaussian => NoiseDistribution::Gaussian,
        }
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, ExperimentError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run(command: Command) -> Result<Vec<ExperimentRow>, ExperimentError> {
    match command {
        Command::Solve {
            common,
            noise,
            seed,
            trace,
        } => {
            let config = common.config()?;
            let spec = NoiseSpec {
                rel_level: noise,
                seed,
                distribution: common.distribution(),
            };
            let mut rows = Vec::new();
            for (i, scheme) in common.schemes().into_iter().enumerate() {
                let r = run_row(&config, &spec, scheme, common.fixed_m)?;
                println!(
                    "{scheme:<8}  Avg {:.6}  m_final {}  n_delta {}  G {:.4e} <= {:.4e}  stop {}",
                    r.row.avg,
                    r.row.m_final,
                    r.row.n_iters,
                    r.row.g_final,
                    r.outcome.threshold,
                    r.row.stop_reason
                );
                if i == 0 {
                    if let Some(path) = &trace {
                        write_trace(create(path)?, &r.outcome)?;
                    }
                }
                rows.push(r.row);
            }
            if let Some(path) = &common.out {
                write_csv(create(path)?, &rows)?;
            }
            Ok(rows)
        }
        Command::Table {
            common,
            noise,
            seed,
            seeds,
        } => {
            let spec = TableSpec {
                config: common.config()?,
                levels: noise.unwrap_or_else(|| PAPER_NOISE_LEVELS.to_vec()),
                seeds: seed.unwrap_or_else(|| (0..seeds).collect()),
                schemes: common.schemes(),
                fixed_m: common.fixed_m,
                distribution: common.distribution(),
            };
            let rows: Vec<ExperimentRow> = run_table(&spec)?.into_iter().map(|r| r.row).collect();
            print!("{}", SummaryRow::format_table(&summarize(&rows)));
            match &common.out {
                Some(path) => write_csv(create(path)?, &rows)?,
                None => write_csv(io::stdout().lock(), &rows)?,
            }
            Ok(rows)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(rows) if rows.iter().all(|r| r.stop_reason.is_success()) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(3),
        Err(e @ (ExperimentError::Config(_) | ExperimentError::Solver(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
