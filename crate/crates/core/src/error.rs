use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graph is not bipartite: odd cycle through vertex {0}")]
    NotBipartite(usize),

    #[error("improper two-coloring: edge ({0}, {1}) is monochromatic")]
    ImproperColoring(usize, usize),

    #[error("instance generation stuck after {0} consecutive rejections")]
    GenerationStuck(u64),

    #[error("graph has {size} vertices, exhaustive search is limited to {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("degenerate energy spectrum: e_min = e_max = {0}")]
    DegenerateSpectrum(f64),

    #[error("no candidate solutions available")]
    NoCandidates,

    #[error("format error (line {line}): {message}")]
    Format { line: usize, message: String },

    #[error("stored energies disagree with the problem on lines {0:?}")]
    EnergyMismatch(Vec<usize>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: msg.into(),
        }
    }

    /// True for errors caused by the filesystem rather than by the input data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
            || matches!(self, Error::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::Dimension { expected, actual });
    }
    Ok(())
}
