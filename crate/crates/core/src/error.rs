use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("numeric domain error: {0}")]
    NumericDomain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("representation error: {0}")]
    Representation(String),
    #[error("distribution is not Bayes-plausible: {0}")]
    Plausibility(String),
    #[error("construction inapplicable: {0}")]
    Inapplicable(String),
    #[error("cost synthesis failed: {0}")]
    SynthesisFailure(String),
    #[error("linear program infeasible: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
