use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("atom space is empty")]
    EmptySpace,
    #[error("atom weight at index {index} is not positive and finite: {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("duplicate atom identifier {0}")]
    DuplicateAtom(String),
    #[error("mask length {got} does not match atom count {expected}")]
    MaskLength { expected: usize, got: usize },
    #[error("degenerate interval [{lower}, {upper})")]
    DegenerateInterval { lower: f64, upper: f64 },
    #[error("cell count must be positive")]
    NonPositiveCells,
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("time {time} is not on the grid")]
    OffGrid { time: f64 },
    #[error("invalid probe: {0}")]
    InvalidProbe(String),
    #[error("modulus must be positive and finite, got {0}")]
    InvalidModulus(f64),
    #[error("fiber coordinate {v} outside [0, {q})")]
    FiberOutOfRange { v: f64, q: f64 },
    #[error("atom index {0} out of range")]
    AtomOutOfRange(usize),
    #[error("special flow orbit search exceeded {0} roof crossings")]
    SearchBoundExceeded(usize),
    #[error("map is not a bijection on the atom indices")]
    NotBijection,
    #[error("atom {0} is a fixed point of the flow")]
    FixedPointPresent(usize),
    #[error("atom {0} is not periodic within the order bound")]
    NonperiodicPointPresent(usize),
    #[error("flow does not act on discrete atoms")]
    NotAtomic,
    #[error("fiber shift of {shift} cells is not an integer (fiber of base atom {atom} is incommensurate with the time grid)")]
    Incommensurate { atom: usize, shift: f64 },
    #[error("invalid kernel specification: {0}")]
    InvalidSpec(String),
    #[error("field mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("moving-average taps are all zero")]
    ZeroTaps,
    #[error("speed is zero at base atom {0}")]
    ZeroSpeed(usize),
    #[error("atom {0} has an all-zero kernel column")]
    SupportViolation(usize),
    #[error("kernel contains non-finite values")]
    NonFinite,
    #[error("alpha must lie in (0, 2), got {0}")]
    InvalidAlpha(f64),
    #[error("cocycle law violated with discrepancy {0}")]
    CocycleViolation(f64),
    #[error("kernel has zero total mass")]
    DegenerateKernel,
    #[error("invalid simulation configuration: {0}")]
    InvalidSimulation(String),
    #[error("{} atoms could not be classified: {atoms:?}", atoms.len())]
    Undecided { atoms: Vec<usize> },
    #[error("component inclusion violated: {0}")]
    InclusionViolation(String),
    #[error("additivity residual {0} exceeds threshold")]
    AdditivityResidual(f64),
    #[error("representation is not minimal: atoms {0} and {1} are not ratio-separated")]
    NotMinimal(usize, usize),
    #[error("fixed-point cross-check failed at atom {atom} (residual {residual})")]
    FixedCrossCheck { atom: usize, residual: f64 },
    #[error("unknown kernel family `{0}`")]
    UnknownFamily(String),
    #[error("family `{family}`: {message}")]
    FamilyParams { family: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}
