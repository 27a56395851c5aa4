use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed value: {0}")]
    Malformed(String),
    #[error("variable index {index} is outside a registry of {len} variables")]
    RegistryMismatch { index: usize, len: usize },
    #[error("variable `{0}` has no binding")]
    UnboundVariable(String),
    #[error("non-finite float result")]
    NonFinite,
    #[error("signature mismatch: `{left}` vs `{right}`")]
    SignatureMismatch { left: String, right: String },
    #[error("dimension {0} exceeds the supported maximum of 63 generators")]
    DimensionTooLarge(usize),
    #[error("generator index {index} out of range for dimension {dim}")]
    GeneratorOutOfRange { index: usize, dim: usize },
    #[error("expected a homogeneous element of grade {expected}, found grades {found:?}")]
    GradeMismatch { expected: usize, found: Vec<usize> },
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("matrix is singular")]
    Singular,
    #[error("square root of {0} is not rational")]
    IrrationalSqrt(String),
    #[error("rotor normalization violated: R R~ = {0}")]
    NotARotor(String),
    #[error("bivector squares to a non-scalar; closed form unavailable")]
    NonScalarSquare,
    #[error("series did not converge within {0} terms")]
    SeriesDiverged(usize),
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("commutator of generators {0} and {1} leaves the span")]
    NotClosed(usize, usize),
    #[error("parity of `{0}` is not homogeneous")]
    MixedParity(String),
    #[error("expected a quadratic polynomial: {0}")]
    NotQuadratic(String),
    #[error("outside chart domain at {0:?}")]
    OutsideDomain(Vec<f64>),
    #[error("degenerate metric at {0:?}")]
    DegenerateMetric(Vec<f64>),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("integration diverged at step {step}")]
    Diverged { step: usize },
}
