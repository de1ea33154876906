use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: selector syntax, bad file contents, empty sample lists.
    #[error("input error: {0}")]
    Input(String),

    /// A request outside the range covered by the data at hand.
    #[error("range error: {0}")]
    Range(String),

    /// Evaluation point outside the half-plane where the series is summed.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation at the pole s = 1")]
    Pole,

    /// The semigroup was generated up to `available`, but `needed` terms are required.
    #[error("semigroup generated up to {available}, but {} terms are required", terms(*.needed))]
    InsufficientSemigroup { needed: u64, available: u64 },

    #[error("construction error at k = {k}: quota {quota} exceeds the {available} primes available")]
    Construction { k: u32, quota: u64, available: u64 },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Range(_) => "range",
            Error::Domain(_) => "domain",
            Error::Pole => "pole",
            Error::InsufficientSemigroup { .. } => "insufficient-semigroup",
            Error::Construction { .. } => "construction",
            Error::Numeric(_) => "numeric",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

fn terms(needed: u64) -> String {
    if needed == u64::MAX {
        "more than 2^64".to_string()
    } else {
        needed.to_string()
    }
}
