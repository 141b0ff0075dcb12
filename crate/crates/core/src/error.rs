use thiserror::Error;

/// Errors raised by hypermatrix algebra, hyperdeterminant evaluation and the
/// quantum-state layers built on top of them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("entry count {got} does not match shape (expected {expected})")]
    EntryCount { expected: usize, got: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("hypermatrix is not cuboid (dims {0:?})")]
    NotCuboid(Vec<usize>),

    #[error("operation requires even order, got order {0}")]
    OddOrder(usize),

    #[error("work budget exceeded: {terms} terms requested, budget is {budget}")]
    BudgetExceeded { terms: f64, budget: f64 },

    #[error("permutation enumeration refused: d = {d} exceeds guard {guard}")]
    FactorialGuard { d: usize, guard: usize },

    #[error("state is not normalized: norm² = {0}")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
