use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("bad input: {0}")]
    Input(String),
    #[error("invalid cluster picture: {0}")]
    InvalidPicture(String),
    #[error("valuation of zero")]
    ValuationOfZero,
    #[error("not a surd, normalize first")]
    NotSurd,
    #[error("not semistable: {0}")]
    NotSemistable(String),
    #[error("epsilon sign unknown for clusters {0:?}; supply them in the input")]
    UnknownSign(Vec<String>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Input-format problems map to exit code 1, everything else to 2.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Input(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } | Error::Input(_) => "parse",
            Error::InvalidPicture(_) => "invalid-picture",
            Error::ValuationOfZero | Error::NotSurd => "arithmetic",
            Error::NotSemistable(_) => "not-semistable",
            Error::UnknownSign(_) => "unknown-sign",
            Error::Precondition(_) => "precondition",
            Error::Unsupported(_) => "unsupported",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
