use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is out of range")]
    BadModulus(u64),
    #[error("{a} is not a unit modulo {modulus}")]
    NonUnit { a: i64, modulus: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameters: m_{index} = {value} is not a unit modulo {r}")]
    NonUnitEntry { index: usize, value: i64, r: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("path enumeration exceeded its budget of {0} prefixes")]
    TooLarge(u64),
    #[error("enumeration of {needed} vectors exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not upper unitriangular: {0}")]
    NotUnitriangular(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("non-integer result: {0}")]
    NonIntegerResult(String),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("class count {phi} is below the proven lower bound {bound}")]
    LowerBoundViolated { phi: usize, bound: String },
    #[error("parse error: {0}")]
    Parse(String),
}
