use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in this crate.
///
/// Precondition violations (`Domain`, `Parameter`) are kept apart from
/// `Resource` trips and from `Guard`, which signals a broken internal
/// invariant and should never be observed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("factorial argument {n} outside the table range 0..={max}")]
    FactorialRange { n: u64, max: u64 },

    #[error("division by zero in F_{p}")]
    DivisionByZero { p: u32 },

    #[error("parameter {name} = {value} violates {bound}")]
    Parameter {
        name: &'static str,
        value: i64,
        bound: String,
    },

    #[error("arity mismatch: expected {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("coefficient rings differ")]
    RingMismatch,

    #[error("variable index {index} out of range 1..={num_vars}")]
    VariableIndex { index: usize, num_vars: usize },

    #[error("resource guard: {0}")]
    Resource(String),

    #[error("outside the formula's domain: {0}")]
    Domain(String),

    #[error("internal guard tripped: {0}")]
    Guard(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: i64, bound: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            value,
            bound: bound.into(),
        }
    }
}
