use thiserror::Error;

use crate::model::ValidationReport;
use crate::solver::SolverError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(ValidationReport),

    /// The harvested-energy requirement cannot be met with the available
    /// transmit power, or a subproblem had no strictly feasible point.
    #[error("scenario infeasible: {0}")]
    Infeasible(String),

    #[error("common-rate split sums to {split_sum} but the common rate is only {bound}")]
    CommonRateExceeded { split_sum: f64, bound: f64 },

    #[error("strategy {strategy} needs exactly 2 information receivers, scenario has {num_irs}")]
    UnsupportedStrategy { strategy: String, num_irs: usize },

    #[error("expansion point uses {power} W, above the {budget} W budget")]
    ExpansionPointInfeasible { power: f64, budget: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
