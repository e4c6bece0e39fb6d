use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    /// A symbol, vector or module was used with an algebra it does not belong to.
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid algebra or module data: {0}")]
    Invalid(String),

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    /// The K(0) action produced a component on the highest-weight line.
    #[error("internal consistency: action left the submodule ({0})")]
    LeftSubmodule(String),

    #[error("{generator} string exceeded cap {cap}")]
    Exceeded { generator: String, cap: usize },

    #[error("result is not annihilated: {0}")]
    NotSingular(String),

    #[error("zero vector not allowed here")]
    ZeroVector,

    #[error("fixture error: {0}")]
    Fixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
