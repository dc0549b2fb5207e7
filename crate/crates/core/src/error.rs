use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet size must be in 2..=256, got {0}")]
    InvalidAlphabet(u32),
    #[error("word length must be at least 1")]
    EmptyWord,
    #[error("digit {digit} out of range for alphabet of size {q}")]
    DigitOutOfRange { digit: u32, q: u32 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("duplicate codeword {0}")]
    DuplicateWord(String),
    #[error("code is empty")]
    EmptyCode,
    #[error("radius {r} out of range for length {n}")]
    RadiusOutOfRange { r: usize, n: usize },
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error(
        "enumeration budget exceeded: about {estimate:.3e} units of work, budget {budget:.3e}"
    )]
    BudgetExceeded { estimate: f64, budget: f64 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("pair is not a member of the covering family")]
    PairNotInFamily,
    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
