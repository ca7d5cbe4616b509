use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported modulation: {0}")]
    UnsupportedModulation(String),

    #[error("layout error: {0}")]
    Layout(String),

    #[error("clipping: peak {peak:.1} exceeds int16 range at scale {scale}")]
    Clipping { peak: f64, scale: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("undefined SNR: noise power is zero")]
    UndefinedSnr,

    #[error("insufficient input: need at least {needed}, got {got}")]
    InsufficientInput { needed: usize, got: usize },

    #[error(
        "degenerate histogram: mode at bin {mode_bin} (need >= 2); input is empty or signal-dominated"
    )]
    DegenerateHistogram { mode_bin: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error("unpaired masks (no matching record): {}", orphans.join(", "))]
    Pairing { orphans: Vec<String> },

    #[error("config error: {0}")]
    Config(String),

    #[error("pipeline failed at snr {snr_db} dB, trial {trial}, seed {seed:#018x}: {source}")]
    Pipeline {
        snr_db: f64,
        trial: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Innermost error, looking through sweep context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Pipeline { source, .. } => source.root(),
            e => e,
        }
    }
}
