use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument lies outside its admissible range.
    #[error("{name} = {value} is out of range: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// Derived exponents violate `xi*Q <= 1` or `xi*(Q+2) > 1`.
    #[error("inconsistent parameters (gamma = {gamma}, d = {d}): {reason}")]
    Consistency { gamma: f64, d: f64, reason: String },
    #[error("invalid grid: {0}")]
    Grid(String),
    /// A circle, ball or point leaves the measurement window.
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("target vertex ({0}, {1}) is unreachable")]
    Unreachable(usize, usize),
    #[error("vertex ({0}, {1}) does not satisfy the region predicate")]
    Predicate(usize, usize),
    #[error("degenerate design: {0}")]
    Degenerate(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
