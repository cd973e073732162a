//! Scenario execution, sweeps and artifacts behind the `cptclone` CLI.

mod chi_curve;
mod config;
mod pipeline;
mod render;
mod sweep;
mod units;
mod vapor;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::lambda::LambdaError;
use crate::metrics::MetricsError;
use crate::optics::{Cf2dError, OpticsError};
use crate::pgm::PgmError;
use crate::scene::SceneError;

pub use chi_curve::{chi_curve, ChiAxis, ChiCurve, ChiDefaults, ChiPoint};
pub use config::{
    Atom, Beams, ChiMode, Geometry, MaskKind, MaskSpec, Numerics, Outputs, ScenarioConfig,
};
pub use pipeline::{
    build_mask, evaluate, run_scenario, simulate, write_metrics_csv, CloneMetrics, MetricRow,
    Polarity, RunReport, Simulation,
};
pub use render::{render_cf2d, render_field, render_intensity};
pub use sweep::{parse_values, sweep, thread_cap, SweepParam, SweepReport, SweepRow};
pub use units::{format_si, parse_quantity, Dimension, Quantity};
pub use vapor::DensityTable;

/// Process exit codes used by the CLI.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NUMERIC_GUARD: i32 = 3;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Lambda(#[from] LambdaError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("field dump: {0}")]
    Dump(#[from] Cf2dError),
    #[error(transparent)]
    Pgm(#[from] PgmError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for invalid input, 3 for numeric-guard failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        fn optics(e: &OpticsError) -> i32 {
            match e {
                OpticsError::NonFinite(_) | OpticsError::BorderEnergy { .. } => exit::NUMERIC_GUARD,
                OpticsError::InvalidGrid(_)
                | OpticsError::GridMismatch(_)
                | OpticsError::InvalidDistance(_) => exit::VALIDATION,
                OpticsError::Provider(_) => exit::OTHER,
            }
        }
        fn lambda(e: &LambdaError) -> i32 {
            match e {
                LambdaError::DegenerateSteadyState { .. } => exit::NUMERIC_GUARD,
                _ => exit::VALIDATION,
            }
        }
        match self {
            HarnessError::Config(_) | HarnessError::Dump(_) => exit::VALIDATION,
            HarnessError::Lambda(e) => lambda(e),
            HarnessError::Optics(e) => optics(e),
            HarnessError::Scene(SceneError::Lambda(e)) => lambda(e),
            HarnessError::Scene(SceneError::Optics(e)) => optics(e),
            HarnessError::Scene(_) => exit::VALIDATION,
            HarnessError::Io { .. }
            | HarnessError::Metrics(_)
            | HarnessError::Pgm(_)
            | HarnessError::Csv(_) => exit::OTHER,
        }
    }
}
