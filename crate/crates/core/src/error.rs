use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("inadmissible simple factor {family}{rank}: {reason}")]
    Inadmissible {
        family: char,
        rank: usize,
        reason: &'static str,
    },

    #[error("malformed factor {0:?} (expected e.g. \"A2\", \"G2\")")]
    BadFactor(String),

    #[error("inconsistent structure data: {0}")]
    Structure(String),

    #[error("odd rank {0}: no complex structure on the torus")]
    OddRank(usize),

    #[error("torus complex structure does not square to -1")]
    NotComplexStructure,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("nonpositive parameter {name} = {value}")]
    Nonpositive { name: String, value: String },

    #[error("metric is not compatible with J: defect at basis pair ({0}, {1})")]
    Incompatible(usize, usize),

    #[error("form degree {degree} exceeds dimension {dim}")]
    DegreeTooLarge { degree: usize, dim: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("simple roots {0:?} are not in I_max")]
    NotInIMax(Vec<String>),

    #[error("unknown simple root label {0:?}")]
    UnknownRoot(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
