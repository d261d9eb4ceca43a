use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A payoff table violated a structural requirement (shape, finiteness).
    #[error("invalid game: {0}")]
    InvalidGame(String),

    /// A game exceeded the size supported by an algorithm.
    #[error("game size {rows}x{cols} exceeds the {cap}x{cap} cap for {what}")]
    SizeCap {
        rows: usize,
        cols: usize,
        cap: usize,
        what: &'static str,
    },

    /// A probability vector or belief violated the simplex constraints.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Scenario-level inconsistency (dimension mismatch, missing data).
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// A JSON input failed to parse; `field` names the offending field.
    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
