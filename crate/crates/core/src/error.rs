use thiserror::Error;

/// Errors raised anywhere in the pipeline. Messages carry the module that
/// produced them so that CLI diagnostics can be traced back.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{module}: dimension mismatch (expected {expected}, got {got})")]
    DimensionMismatch {
        module: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{module}: invalid input: {message}")]
    Input {
        module: &'static str,
        message: String,
    },

    #[error("{module}: invalid configuration: {message}")]
    Config {
        module: &'static str,
        message: String,
    },

    #[error("kriging: correlation matrix is not positive definite even with nugget {nugget:e}")]
    Conditioning { nugget: f64 },

    #[error("kriging: regression basis of size {p} is not identifiable with {m} observations")]
    Identifiability { p: usize, m: usize },

    #[error("kriging: fit failed, every candidate length-scale vector was ill-conditioned")]
    FitFailure,

    #[error(
        "mcmc: shrinkage stalled after {contractions} contractions on coordinate {coordinate}"
    )]
    SamplerStall {
        coordinate: usize,
        contractions: usize,
    },

    #[error(
        "estimate: instrumental density vanishes at a failing point with positive nominal density"
    )]
    DominationViolation,

    #[error("{module}: estimation failed: {message}")]
    Estimation {
        module: &'static str,
        message: String,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    TomlDe(#[from] toml::de::Error),

    #[error("config: {0}")]
    TomlSer(#[from] toml::ser::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(module: &'static str, message: impl Into<String>) -> Self {
        Error::Input {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn config(module: &'static str, message: impl Into<String>) -> Self {
        Error::Config {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn estimation(module: &'static str, message: impl Into<String>) -> Self {
        Error::Estimation {
            module,
            message: message.into(),
        }
    }
}
