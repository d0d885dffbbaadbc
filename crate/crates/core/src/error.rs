use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("odd mode count {count} on axis {axis}")]
    OddModeCount { axis: usize, count: usize },

    #[error("mode count {count} on axis {axis} is below the minimum of 4")]
    TooFewModes { axis: usize, count: usize },

    #[error("non-positive period {period} on axis {axis}")]
    NonPositivePeriod { axis: usize, period: f64 },

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("lattice too small for dealiasing: axis {axis} retains {retained} modes, need at least 4")]
    LatticeTooSmall { axis: usize, retained: usize },

    #[error("dyadic block {j} outside partition range [{j_min}, {j_max}]")]
    BlockOutOfRange { j: i32, j_min: i32, j_max: i32 },

    #[error("invalid Besov parameters: {0}")]
    InvalidBesov(String),

    #[error("times must be strictly increasing (violation at index {index})")]
    UnorderedTimes { index: usize },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("third component of the initial datum is nonzero (max |û³| = {0:e})")]
    NonzeroVerticalComponent(f64),

    #[error("epsilon {eps} outside (0, {max}]")]
    EpsilonOutOfRange { eps: f64, max: f64 },

    #[error("resolution too coarse: spacing {spacing} exceeds required {required}")]
    ResolutionTooCoarse { spacing: f64, required: f64 },

    #[error("lattice cannot hold the datum: {0}")]
    InsufficientLattice(String),

    #[error("empty epsilon list")]
    EmptyEpsilonList,

    #[error("epsilon list must be strictly decreasing")]
    EpsilonListNotDecreasing,

    #[error("support condition |ξ| ≥ 1 violated at ξ = ({:.6}, {:.6}, {:.6})", .0[0], .0[1], .0[2])]
    SupportViolation([f64; 3]),

    #[error("field is not band-limited inside the dealiased region; no certified tail")]
    NotBandLimited,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time step {dt:e} exceeds the CFL limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("non-finite value detected at t = {0}")]
    NonFinite(f64),

    #[error("snapshot schedules differ")]
    ScheduleMismatch,

    #[error("run carries no linear companion; enable it to monitor the perturbation")]
    MissingLinearCompanion,

    #[error("malformed snapshot file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
