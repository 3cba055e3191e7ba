use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("valuation is indeterminate: value is zero to absolute precision {0}")]
    IndeterminateValuation(i64),
    #[error("insufficient precision: need {needed} digits, have {available}")]
    InsufficientPrecision { needed: i64, available: i64 },
    #[error("precision of {requested} digits exceeds the supported maximum {max} for this prime")]
    PrecisionTooLarge { requested: u32, max: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero angular class has no unit representative")]
    ZeroClass,
    #[error("invalid angular class: {0}")]
    InvalidAngularClass(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("root is ambiguous: {count} roots match the requested angular class")]
    AmbiguousRoot { count: usize },
    #[error("root extraction with p dividing the exponent {b} is not supported")]
    UnsupportedRamifiedRoot { b: u32 },
    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),
    #[error("derivative order {0} is not an integer")]
    NonIntegerOrder(String),
    #[error("function is constant; derivative order is undefined")]
    ConstantFunction,
    #[error("the 0-cell has no balls")]
    ZeroCellHasNoBalls,
    #[error("empty fiber: {0}")]
    EmptyFiber(String),
    #[error("empty point set")]
    EmptyDomain,
    #[error("point {0} has no nearest point in the set (closure point)")]
    NotClosed(String),
    #[error("invalid cell data: {0}")]
    InvalidCell(String),
    #[error("invalid prepared function: {0}")]
    InvalidFunction(String),
    #[error("function is not 1-Lipschitz on its fiber: {0}")]
    NotUnitLipschitz(String),
    #[error("lambda {0} is not an integer power of p")]
    UnsupportedLambda(String),
    #[error("extensions disagree on the shared domain at {0}")]
    DisagreementOnSharedDomain(String),
    #[error("no balls of the fiber lie in the window [{0}, {1}]")]
    EmptyWindow(i64, i64),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}

pub type Result<T> = std::result::Result<T, Error>;
