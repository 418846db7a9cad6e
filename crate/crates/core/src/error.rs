use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the engines can report.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("assignment is missing variable `{0}`")]
    MissingVariable(String),
    #[error("polynomial has degree zero in `{0}`")]
    DegreeZero(String),
    #[error("degree {degree} in `{var}` is too low (need at least {need})")]
    DegreeTooLow { var: String, degree: u32, need: u32 },
    #[error("center {0} is a pole or branch point")]
    SingularCenter(Complex64),
    #[error("new center at distance {distance} lies outside the estimated disc of radius {radius}")]
    OutsideDisc { distance: f64, radius: f64 },
    #[error("radius estimate needs at least 8 nonzero coefficients, found {0}")]
    TooFewCoefficients(usize),
    #[error("series centers differ")]
    CenterMismatch,
    #[error("divisor series is zero to the available order")]
    DivisionByZeroSeries,
    #[error("series has a polar part and cannot be re-centered")]
    NotHolomorphic,
    #[error("leading coefficient indistinguishable from zero at working order {0}")]
    OrderExhausted(usize),
    #[error("elimination step {0} produced an identically zero resultant")]
    DegreeCollapse(usize),
    #[error("root finding failed for {0}")]
    RootFindingFailure(String),
    #[error("repeated root persists at every order: curve is not square-free")]
    NotSquareFree,
    #[error("path passes within clearance of a singular point near {0}")]
    NearSingular(Complex64),
    #[error("corrector diverged near u = {0} (step floor reached)")]
    CorrectionDiverged(Complex64),
    #[error("monodromy matching is ambiguous for branch {0}")]
    AmbiguousMatching(usize),
    #[error("base point {0} is singular for the function")]
    SingularBasePoint(Complex64),
    #[error("order {order} must exceed deg G = {degree}")]
    OrderTooLowForDegree { order: usize, degree: u32 },
    #[error("order {order} too low, need at least {required}")]
    OrderTooLow { order: usize, required: usize },
    #[error("Koebe chain collapsed at step `{0}`")]
    ChainCollapse(&'static str),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("shift k = 0 is degenerate")]
    ShiftDegenerate,
    #[error("found {found} roots, wanted {want}")]
    InsufficientRoots { found: usize, want: usize },
    #[error("derivative vanishes at every seed")]
    DerivativeVanishes,
    #[error("no pair of equal values after retries")]
    NoEqualPair,
    #[error("every sample point was singular")]
    AllPointsSingular,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("schema error at line {line}, column {column}: {msg}")]
    Schema { line: usize, column: usize, msg: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-finite value")]
    NonFinite,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// The variant name, for structured reports.
    pub fn kind(&self) -> String {
        let s = format!("{:?}", self);
        s.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
    }
}
