//! Seeded-noise experiments on the inverse Laplace test problem: noise
//! injection, table runs over noise levels and seeds, and CSV reports.

pub mod noise;
pub mod table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Solver(#[from] fredholm_dsm::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;

pub use noise::{add_noise, NoiseDistribution, NoiseSpec, NoisyData};
pub use table::{
    median, read_csv, run_row, run_table, summarize, write_csv, write_trace, ExperimentRow, RowRun,
    Scheme, SummaryRow, TableSpec, PAPER_FIXED_M, PAPER_NOISE_LEVELS,
};
