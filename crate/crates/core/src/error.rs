use thiserror::Error;

/// Errors produced by the model, integrators and data routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WadeError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("series is not sampled on the expected grid ({0})")]
    GridMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Price too close to the reference price for the closed forms to be evaluated.
    #[error("singular price {price} at t = {t}{}: within {band} of reference price {pivot}",
        .index.map(|i| format!(" (node {i})")).unwrap_or_default())]
    SingularPrice {
        index: Option<usize>,
        t: f64,
        price: f64,
        pivot: f64,
        band: f64,
    },

    #[error("no real {degree}-th root of negative value {radicand}")]
    NonRealRoot { radicand: f64, degree: u32 },

    #[error("sweep index k = {k} outside [{lo}, {hi}]")]
    IndexOutOfRange { k: i64, lo: f64, hi: f64 },

    #[error("sweep entry k = {k}: {source}")]
    Sweep {
        k: i64,
        #[source]
        source: Box<WadeError>,
    },

    #[error("grid [{t_start}, {t_end}] lies outside the data span [{first}, {last}]")]
    OutsideDataSpan {
        t_start: f64,
        t_end: f64,
        first: f64,
        last: f64,
    },

    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error("line {line}: duplicate year {year}")]
    DuplicateYear { line: u64, year: i64 },

    #[error("line {line}: year {year} does not follow {previous}")]
    NonIncreasingYear { line: u64, year: i64, previous: i64 },

    #[error("invalid plot: {0}")]
    InvalidPlot(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for WadeError {
    fn from(err: std::io::Error) -> Self {
        WadeError::Io(err.to_string())
    }
}

pub type Result<T, E = WadeError> = std::result::Result<T, E>;
