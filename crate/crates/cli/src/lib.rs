//! Command-line front end for `flexinfo-core`: analysis reports, figures,
//! and the seeded property suites behind `flexinfo verify`.

pub mod commands;
pub mod config;
pub mod output;
pub mod suites;
pub mod svg;

use flexinfo_core::Error;
use thiserror::Error as ThisError;

pub use config::RunConfig;

/// Failures mapped to process exit codes.
#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("construction not possible: {0}")]
    Inapplicable(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Inapplicable(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::MalformedInput(_)
            | Error::Precondition(_)
            | Error::Plausibility(_)
            | Error::Representation(_)
            | Error::NumericDomain(_) => CliError::Input(msg),
            Error::Inapplicable(_) | Error::SynthesisFailure(_) | Error::Infeasible(_) => CliError::Inapplicable(msg),
            Error::Numeric(_) => CliError::Numeric(msg),
        }
    }
}

/// Exit code for a verification suite that ran but found violations.
pub const EXIT_PROPERTY_VIOLATED: i32 = 1;
