//! Crate-wide error type and exit-code classification.

use thiserror::Error;

/// Errors produced by configuration, analysis, and simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// A config document failed to parse or a field failed validation.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// A numerical routine failed to meet its tolerance or converge.
    /// Carries the best available estimate and an error bound when known.
    #[error("numerical failure in {context}: {message} (best estimate {best_estimate:?}, error bound {error_bound:?})")]
    Numerical {
        context: String,
        message: String,
        best_estimate: Option<f64>,
        error_bound: Option<f64>,
    },

    /// The communication tier is empty (lambda_c = 0 or no comm APs in the realization).
    #[error("no communication tier: {0}")]
    NoCommunicationTier(String),

    /// The sensing coverage probability is zero; the arrival process is degenerate.
    #[error("no arrivals: sensing coverage probability is zero")]
    NoArrivals,

    /// The service-time MGF denominator changes sign on the integration range.
    #[error(
        "unstable service: decoding-error pole inside the integration range at theta = {theta} 1/s"
    )]
    UnstableService { theta: f64 },

    /// The SNC bound is undefined at the requested Chernoff parameter.
    #[error("bound undefined at theta = {theta} 1/s: {reason}")]
    UnstableAtTheta { theta: f64, reason: String },

    /// No stable Chernoff parameter exists anywhere in the scanned range.
    #[error("infeasible: no stable theta found in {0}")]
    Infeasible(String),

    /// Invalid simulation inputs (budgets, trace lengths, negative times).
    #[error("simulation input error: {0}")]
    Simulation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn numerical(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Numerical {
            context: context.into(),
            message: message.into(),
            best_estimate: None,
            error_bound: None,
        }
    }

    /// Process exit code for the CLI: 2 config, 3 numerical, 4 infeasible.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::Simulation(_) => 2,
            Error::Numerical { .. }
            | Error::NoCommunicationTier(_)
            | Error::NoArrivals
            | Error::UnstableService { .. }
            | Error::UnstableAtTheta { .. } => 3,
            Error::Infeasible(_) => 4,
        }
    }

    /// Single-line machine-parseable code for CLI stderr.
    pub fn code_str(&self) -> &'static str {
        match self {
            Error::Config { .. } => "E_CONFIG",
            Error::Io(_) => "E_IO",
            Error::Json(_) => "E_JSON",
            Error::Csv(_) => "E_CSV",
            Error::Simulation(_) => "E_SIM_INPUT",
            Error::Numerical { .. } => "E_NUMERICAL",
            Error::NoCommunicationTier(_) => "E_NO_COMM_TIER",
            Error::NoArrivals => "E_NO_ARRIVALS",
            Error::UnstableService { .. } => "E_UNSTABLE_SERVICE",
            Error::UnstableAtTheta { .. } => "E_UNSTABLE_THETA",
            Error::Infeasible(_) => "E_INFEASIBLE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
