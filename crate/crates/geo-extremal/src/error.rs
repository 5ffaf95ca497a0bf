//! Error type shared by all modules.

use core::fmt;

/// Errors reported by parameter validation and the computation paths.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A probability parameter lies outside (0, 1].
    InvalidProbability { name: &'static str, value: f64 },
    /// The operation requires a nondegenerate marginal (p < 1).
    DegenerateMarginal { name: &'static str },
    /// A uniform variate lies outside its required range.
    InvalidUniform { value: f64 },
    /// An argument lies outside the documented domain of the operation.
    OutOfDomain { what: &'static str },
    /// The exact-rational computation would exceed the denominator bit budget.
    BudgetExceeded { required_bits: u64, budget_bits: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidProbability { name, value } => {
                write!(f, "{name} = {value} is not a probability in (0, 1]")
            }
            Error::DegenerateMarginal { name } => {
                write!(f, "{name} = 1 gives a degenerate marginal (zero variance); correlation is undefined")
            }
            Error::InvalidUniform { value } => {
                write!(f, "uniform variate {value} outside its valid range")
            }
            Error::OutOfDomain { what } => write!(f, "{what}"),
            Error::BudgetExceeded { required_bits, budget_bits } => {
                write!(
                    f,
                    "exact computation needs ~{required_bits} denominator bits, budget is {budget_bits}"
                )
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
