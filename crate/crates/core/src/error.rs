use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("root iteration did not converge for degree {degree} at {bits} bits (worst residual {residual:e})")]
    NonConvergence { degree: usize, bits: u32, residual: f64 },

    #[error("leading coefficient {0:e} is below the underflow floor")]
    DegenerateLeading(f64),

    #[error("polynomial value near {distance:e} of the contour at w = {re} + {im}i")]
    ContourTooClose { distance: f64, re: f64, im: f64 },

    #[error("contour integral {re} + {im}i does not settle near an integer")]
    NoSnap { re: f64, im: f64 },

    #[error("R_n(i/(2x)) is numerically zero (|R_n| / scale = {0:e})")]
    NearZeroDenominator(f64),

    #[error("root path lost at eta = {eta}: {reason}")]
    PathLoss { eta: f64, reason: String },

    #[error("{what} = {value} is out of range ({expected})")]
    OutOfRange { what: &'static str, value: f64, expected: &'static str },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("mode {n}, gamma {gamma}: {source}")]
    Mode { n: usize, gamma: f64, source: Box<Error> },

    #[error("epsilon {eps}: {source}")]
    Homotopy { eps: f64, source: Box<Error> },
}

impl Error {
    /// Tag with the mode and boundary parameter it occurred in.
    pub fn in_mode(self, n: usize, gamma: f64) -> Self {
        Error::Mode { n, gamma, source: Box::new(self) }
    }

    /// The innermost error once (n, γ) or ε tags are stripped.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Mode { source, .. } | Error::Homotopy { source, .. } => source.root_cause(),
            other => other,
        }
    }
}
