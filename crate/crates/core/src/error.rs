use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole: the Mobius denominator vanishes")]
    Pole,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("values from different quadratic fields Q(sqrt{0}) and Q(sqrt{1})")]
    MixedField(String, String),
    #[error("letter outside the alphabet: {0}")]
    Alphabet(String),
    #[error("word {0} is not in F")]
    NotInF(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("iteration limit reached: {0}")]
    IterationLimit(String),
    #[error("rewriting rule failed: {0}")]
    Rule(String),
    #[error("x = 0 has no finite digit")]
    ZeroDigit,
    #[error("degenerate orbit: {0}")]
    DegenerateOrbit(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

impl Error {
    /// Whether the error reports an exhausted budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded(_) | Error::IterationLimit(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
