use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported operator order {0} (expected 2, 4 or 6)")]
    UnsupportedOrder(u32),
    #[error("grid too small: order {order} needs at least {required} nodes, got {nodes}")]
    GridTooSmall {
        order: u32,
        nodes: usize,
        required: usize,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("inadmissible state: {0}")]
    InadmissibleState(String),
    #[error("degenerate normal velocity for variant {variant}: |{quantity}| = {value:e} below threshold {threshold:e}")]
    Degenerate {
        variant: &'static str,
        quantity: &'static str,
        value: f64,
        threshold: f64,
    },
    #[error("variant {variant} is not available for system {system}")]
    IncompatibleVariant {
        variant: &'static str,
        system: &'static str,
    },
    #[error("frozen coefficients are not supported by variant {0}")]
    FrozenUnsupported(&'static str),
    #[error("mach number must be nonzero")]
    ZeroMach,
    #[error("boundary {face}: no condition given for the {regime} regime")]
    RegimeChange { face: String, regime: &'static str },
    #[error("boundary {face}: condition matrices do not match the characteristic split ({detail})")]
    SplitMismatch { face: String, detail: String },
    #[error("R is not strictly admissible (smallest eigenvalue of I - R^T R = {0:e}); inhomogeneous data cannot be bounded")]
    RNotStrict(f64),
    #[error("S is singular")]
    SingularS,
    #[error("strong imposition failed: {0}")]
    Reconstruction(String),
    #[error("imposition mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("unknown boundary preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value in solution at step {step} (t = {time:e})")]
    NonFinite { step: usize, time: f64 },
    #[error("time step collapsed to {dt:e} at step {step} (t = {time:e})")]
    StepCollapse { step: usize, time: f64, dt: f64 },
    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
