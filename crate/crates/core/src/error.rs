use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("{0} is a perfect square")]
    PerfectSquare(u64),
    /// A real-field operation was asked about an imaginary field.
    #[error("radicand {0} is not positive; no fundamental unit")]
    Signature(i64),
    #[error("factoring budget exhausted on {value}")]
    FactorBudget { value: String },
    /// Neither a solution nor a proof of absence within the search budget.
    #[error("norm equation x^2 - {d}y^2 = {c} undecided (needs {needed} steps, budget {budget})")]
    Undecided { d: i64, c: i64, needed: String, budget: u64 },
    /// The ε-witness is only defined for norm +1 units.
    #[error("no epsilon witness for d = {0}: fundamental unit has norm -1")]
    Inapplicable(u64),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Budget exhaustion rather than bad input.
    pub fn is_undecided(&self) -> bool {
        matches!(self, Error::Undecided { .. } | Error::FactorBudget { .. })
    }
}
