use alloc::string::String;

/// Errors raised by the core library.
///
/// Budget exhaustion is never folded into a mathematical answer: it always
/// surfaces as one of the `*Budget*` or `Inconclusive` variants.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("zero input where a nonzero value is required")]
    ZeroInput,
    #[error("not a square: {0}")]
    NotASquare(String),
    #[error("insufficient p-adic precision: {0}")]
    InsufficientPrecision(String),
    #[error("factorisation budget exceeded for {0}")]
    FactorBudget(String),
    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudget(String),
    #[error("inconclusive within budget: {0}")]
    Inconclusive(String),
    #[error("rank condition violated: {0}")]
    Rank(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("no local points: {0}")]
    NotLocallySoluble(String),
    #[error("invariant indeterminate: {0}")]
    Indeterminate(String),
    #[error("representations disagree: {0}")]
    RepresentationMismatch(String),
    #[error("theorem cross-check failed: {0}")]
    TheoremMismatch(String),
    #[error("witness construction failed: {0}")]
    Witness(String),
}

pub type Result<T> = core::result::Result<T, Error>;

#[macro_export]
#[doc(hidden)]
macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$variant(alloc::format!($($arg)*)))
    };
}
