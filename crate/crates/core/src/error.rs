use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("extension degree must be positive, got {0}")]
    BadExtension(u32),
    #[error("field F_{q}^{e} exceeds the supported size")]
    TooLarge { q: u32, e: u32 },
    #[error("cannot parse field element {0:?}")]
    BadElement(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series has no nonzero coefficient below its precision")]
    ZeroSeries,
    #[error("operation needs a finite precision bound")]
    PrecisionRequired,
    #[error("series live over different coefficient fields")]
    FieldMismatch,
    #[error("ramification index {0} is not of the form q^k (q-1)")]
    UnsupportedRamification(i64),
    #[error("exponent {0} is not divisible as required for an exact root")]
    RootObstruction(String),
    #[error("cannot parse series text: {0}")]
    Parse(String),
}

/// Errors raised by the curve, zeta, shtuka, drinfeld and special modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("singular curve")]
    SingularCurve,
    #[error("unsupported genus {0}")]
    UnsupportedGenus(u32),
    #[error("zero element has no degree or sign")]
    ZeroElement,
    #[error("ideal quotient did not stabilize up to degree {0}")]
    NotStabilized(usize),
    #[error("requested output precision {requested} cannot be certified (best {certified})")]
    UncertifiedPrecision { requested: String, certified: String },
    #[error("degree bound violated at coefficient {index}")]
    BoundViolated { index: i64 },
    #[error("no solution: first obstruction at order {order}")]
    NoSolution { order: String },
    #[error("solution space has dimension {dim} at full precision")]
    AmbiguousSolution { dim: usize },
    #[error("mismatch below precision at exponent {exponent}")]
    MismatchBelowPrec { exponent: String },
    #[error("coefficient {index} is not a q^{k}-th power")]
    RootObstruction { index: usize, k: u32 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("axiom violated: {0}")]
    AxiomViolation(String),
    #[error("cross validation mismatch: {0}")]
    CrossValidationMismatch(String),
    #[error("identity violated: {0}")]
    IdentityViolated(String),
    #[error("leading coefficient is not a unit: {0}")]
    NonUnitLeading(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
