use std::path::PathBuf;

/// Errors raised by the evaluators, detectors and the experiment runner.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite argument: {0}")]
    NonFinite(String),

    #[error("pole at {0}")]
    Pole(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("height {height:e} exceeds the supported maximum {max:e}")]
    HeightOverflow { height: f64, max: f64 },

    #[error("prefactor 1/(1-2^(1-z)) is singular at z = {re}+{im}i")]
    PrefactorSingularity { re: f64, im: f64 },

    #[error("denominator |{what}| = {value:e} is below the threshold {threshold:e}")]
    NearZeroDenominator {
        what: &'static str,
        value: f64,
        threshold: f64,
    },

    #[error("series of length {len} is too short, need at least {needed}")]
    InsufficientLength { len: usize, needed: usize },

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    #[error("grid of {requested} evaluations exceeds the cap of {cap}")]
    GridTooLarge { requested: u64, cap: u64 },

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
