use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports. [`Error::name`] gives the stable
/// kebab-case identifier printed by the command-line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degree {from} does not divide degree {to}")]
    DegreeNotMultiple { from: usize, to: usize },
    #[error("field degree {needed} exceeds the admitted maximum {m_max}")]
    MmaxExceeded { needed: usize, m_max: usize },
    #[error("exhaustive search over {size} elements exceeds the cap {cap}")]
    SearchTooLarge { size: u128, cap: u128 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("both arguments are zero")]
    BothZero,
    #[error("zero argument")]
    ZeroArgument,
    #[error("degree {degree} exceeds the bound {bound}")]
    DegreeBoundExceeded { degree: usize, bound: usize },
    #[error("{0} is not irreducible")]
    NotIrreducible(String),
    #[error("value is indeterminate at precision {0}")]
    Indeterminate(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("exponent denominator budget p^{k_max} exhausted")]
    DenominatorBudget { k_max: u32 },
    #[error("polynomial is not separable")]
    NotSeparable,
    #[error("target valuation {0} is not above theta")]
    ValuationNotPositive(String),
    #[error("no solution inside the tower up to degree {m_max}")]
    NoSolution { m_max: usize },
    #[error("closure check failed: {0}")]
    ClosureCheck(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no admissible extension element: {0}")]
    NoAdmissibleExtension(String),
    #[error("descriptor lacks an entry for {0}")]
    MissingEntry(String),
    #[error("descriptors have incomparable key ranges")]
    Incomparable,
    #[error("descriptor has no value-set tag")]
    MissingTag,
    #[error("descriptors are over different coefficient fields")]
    FieldMismatch,
    #[error("reduction leaves more than one free variable")]
    MultiVariable,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not-prime",
            Error::InvalidConfig(_) => "invalid-config",
            Error::DegreeNotMultiple { .. } => "degree-not-multiple",
            Error::MmaxExceeded { .. } => "m-max-exceeded",
            Error::SearchTooLarge { .. } => "search-too-large",
            Error::DivisionByZero => "division-by-zero",
            Error::BothZero => "both-zero",
            Error::ZeroArgument => "zero-argument",
            Error::DegreeBoundExceeded { .. } => "degree-bound-exceeded",
            Error::NotIrreducible(_) => "non-irreducible-input",
            Error::Indeterminate(_) => "indeterminate",
            Error::PrecisionExhausted(_) => "precision-exhausted",
            Error::DenominatorBudget { .. } => "denominator-budget-exhausted",
            Error::NotSeparable => "non-separable",
            Error::ValuationNotPositive(_) => "valuation-not-above-theta",
            Error::NoSolution { .. } => "m-max-exhausted",
            Error::ClosureCheck(_) => "closure-check-failed",
            Error::Precondition(_) => "precondition-failed",
            Error::NoAdmissibleExtension(_) => "no-admissible-extension",
            Error::MissingEntry(_) => "missing-entry",
            Error::Incomparable => "incomparable-key-ranges",
            Error::MissingTag => "missing-tags",
            Error::FieldMismatch => "field-mismatch",
            Error::MultiVariable => "multi-variable-residue",
            Error::Shape(_) => "shape-mismatch",
            Error::Parse { .. } => "parse-error",
        }
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
