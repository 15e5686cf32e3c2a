use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("map is not a contraction (contractivity {0} >= 1)")]
    NotContraction(f64),

    #[error("map {index} does not send the domain into itself")]
    NotInvariant { index: usize },

    #[error("arity mismatch: {0} maps vs {1} maps")]
    ArityMismatch(usize, usize),

    #[error("IFSs live on different domains")]
    DomainMismatch,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("point outside the domain")]
    OutsideDomain,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("point count {count} exceeds the cap of {cap}; increase the resolution delta or lower the depth")]
    ResourceCap { count: usize, cap: usize },

    #[error("slot {slot}: sequence of contractivity factors is not eventually decreasing")]
    NotEventuallyDecreasing { slot: usize },

    #[error("slot {slot}: sequence is not Cauchy at eps = {eps}")]
    NotCauchy { slot: usize, eps: f64 },

    #[error("frame {frame}: {source}")]
    Frame {
        frame: usize,
        #[source]
        source: Box<Error>,
    },

    /// `line` is 1-based; 0 when the problem is not tied to a line.
    #[error("{}", parse_message(path, *line, msg))]
    Parse { path: String, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Strips `Frame` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Frame { source, .. } => source.root(),
            e => e,
        }
    }
}

fn parse_message(path: &str, line: usize, msg: &str) -> String {
    if line == 0 {
        format!("{path}: {msg}")
    } else {
        format!("{path}:{line}: {msg}")
    }
}
