use thiserror::Error;

/// Errors raised while building grids, states and operators, or while solving.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spacing must be positive and finite, got {0}")]
    NonPositiveSpacing(f64),
    #[error("window [{a}, {b}] is not an integer number of steps of {spacing}")]
    NonCommensurateWindow { a: f64, b: f64, spacing: f64 },
    #[error("a circle grid needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("ratio q must lie in (0, 1), got {0}")]
    BadRatio(f64),
    #[error("invalid grid parameter: {0}")]
    InvalidGrid(String),
    #[error("coordinate {x} lies outside the window [{a}, {b}]")]
    OutsideWindow { x: f64, a: f64, b: f64 },
    #[error("support [{lo}, {hi}] is not contained in the window")]
    SupportOutsideWindow { lo: f64, hi: f64 },
    #[error("halfwidth {0} must be smaller than pi on the circle")]
    SupportTooWide(f64),
    #[error("halfwidth {halfwidth} is below half the grid spacing {spacing}")]
    SupportBelowResolution { halfwidth: f64, spacing: f64 },
    #[error("density samples are all zero")]
    ZeroDensity,
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("shift {shift} is not a multiple of the spacing {spacing}")]
    NonLatticeShift { shift: f64, spacing: f64 },
    #[error("shift moves mass outside the window")]
    ShiftLeavesWindow,
    #[error("operation not supported on a {0} grid")]
    UnsupportedTopology(&'static str),
    #[error("operator {op} cannot be compiled on this grid: {reason}")]
    IncompatibleGridOperator { op: &'static str, reason: String },
    #[error("operator {0} has no pairwise-bound representation")]
    NotCompilable(&'static str),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("invalid constraint graph: {0}")]
    InvalidGraph(String),
    #[error("expected {expected} samples, got {got}")]
    SampleLengthMismatch { expected: usize, got: usize },
    #[error("states and graph do not live on the same grid")]
    GridMismatch,
    #[error("constraint graph is not a simple path")]
    NotAPathGraph,
    #[error("operation requires a circle grid")]
    NotCircle,
    #[error("weights are not multiples of 1/{0}")]
    NotQuantized(usize),
    #[error("brute force limited to {max} quanta, got {got}")]
    TooLarge { got: usize, max: usize },
    #[error("point {x} outside the sampled range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("sampled G must be strictly positive")]
    NonPositiveG,
    #[error("argument outside the formula's domain: {0}")]
    OutOfDomain(String),
    #[error("flow solver did not converge after {0} augmentations")]
    SolverStalled(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
