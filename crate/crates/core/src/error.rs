use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point {point:?} lies outside the domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("non-finite coordinate in {0:?}")]
    NonFinite(Vec<f64>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Both segment endpoints fall on the same side of the target intensity.
    #[error("crossing not bracketed: endpoints classify as {start} and {end}")]
    Bracket { start: String, end: String },

    #[error("ordering precondition violated: {0}")]
    Ordering(String),

    /// A construction post-condition failed; the oracle is not representable
    /// or its tolerance is too coarse for the requested precision.
    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("archimedean stepping exceeded cap of {cap} steps")]
    ArchimedeanCap { cap: usize },

    #[error("anchor {point:?} does not lie on the reference segment")]
    AnchorOffSegment { point: Vec<f64> },

    #[error("oracle is not preference-monotone along the reference path: {0}")]
    NotMonotone(String),

    #[error("degenerate affine fit: {0}")]
    DegenerateFit(String),

    #[error("point {point:?} is not bracketed by the calibration path")]
    CalibrationRange { point: Vec<f64> },

    #[error("point {point:?} is closer than {margin} to the domain boundary")]
    MarginViolation { point: Vec<f64>, margin: f64 },

    #[error("reconstruction depth {depth} below required {required} for second derivatives")]
    ShallowReconstruction { depth: u32, required: u32 },

    #[error("expression error: {0}")]
    Expression(String),

    #[error("axiom `{0}` witnesses cannot be replayed from the oracle alone")]
    NotReplayable(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}
