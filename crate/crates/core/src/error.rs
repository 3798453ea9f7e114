use std::path::PathBuf;

/// Errors raised by the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector or matrix dimensions do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A channel vanished where a beamformer must be normalized.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(&'static str),

    /// A configuration entry could not be accepted.
    #[error("{}key `{key}`: {message}", at_line(.line))]
    Config {
        /// 1-based line in the config text; `None` for overrides and
        /// defaults.
        line: Option<usize>,
        key: String,
        message: String,
    },

    /// Too many drops had to be redrawn.
    #[error("{resampled} of {drops} drops needed a resample (limit {limit})")]
    TooManyResamples {
        resampled: usize,
        drops: usize,
        limit: usize,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A results file exists but could not be understood.
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for configuration problems (as opposed to runtime failures).
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}

fn at_line(line: &Option<usize>) -> String {
    line.map(|l| format!("config line {l}: ")).unwrap_or_default()
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
