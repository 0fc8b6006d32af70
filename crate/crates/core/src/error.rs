use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length {len} is not divisible by {factor}")]
    NonDivisibleLength { len: usize, factor: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("m = {0} is even; the kernel structure is only characterized for odd m")]
    EvenM(usize),

    #[error("system is singular at grid indices {0:?}; extra samples are required")]
    SingularSystem(Vec<usize>),

    #[error("extended system is rank deficient at packets {0:?}")]
    RankDeficient(Vec<usize>),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("coincident nodes {i} and {j}")]
    CoincidentNodes { i: usize, j: usize },

    #[error("frequency {numer}/{denom} is not on the grid of length {grid}")]
    GridMiss {
        numer: usize,
        denom: usize,
        grid: usize,
    },

    #[error("dense oracle requested for L = {len}, above the cap of {cap}")]
    TooLarge { len: usize, cap: usize },

    #[error("periodization tail {tail:e} exceeds {threshold:e} at K = {k}")]
    TailTooLarge { tail: f64, threshold: f64, k: usize },

    #[error("no admissible n up to {n_max}; smallest violating differences {differences:?}")]
    NotFound { n_max: usize, differences: Vec<f64> },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonDivisibleLength { .. } => "non_divisible_length",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::InvalidSignal(_) => "invalid_signal",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::EvenM(_) => "even_m",
            Error::SingularSystem(_) => "singular_system",
            Error::RankDeficient(_) => "rank_deficient",
            Error::PreconditionViolated(_) => "precondition_violated",
            Error::HypothesisViolated(_) => "hypothesis_violated",
            Error::CoincidentNodes { .. } => "coincident_nodes",
            Error::GridMiss { .. } => "grid_miss",
            Error::TooLarge { .. } => "too_large",
            Error::TailTooLarge { .. } => "tail_too_large",
            Error::NotFound { .. } => "not_found",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
