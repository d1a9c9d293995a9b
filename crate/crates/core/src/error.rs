use thiserror::Error;

/// Errors raised by the ringlab library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the support of a potential.
    #[error("{quantity} = {value} violates {bound}")]
    Domain {
        quantity: &'static str,
        value: f64,
        bound: String,
    },

    /// The potential kind has no closed form at complex argument.
    #[error("the {kind} potential cannot be evaluated at a complex argument")]
    Unsupported { kind: String },

    /// No admissible ring can hold all N eigenvalues.
    #[error("no admissible ring holds the spectrum: cumulative mass reached {achieved:.6} of {required}")]
    InfeasibleRing { achieved: f64, required: f64 },

    /// The orthogonality integral of order `l` does not converge.
    #[error("normalization integral for l = {l} diverges")]
    Divergent { l: usize },

    /// Adaptive quadrature did not reach the requested accuracy.
    #[error("quadrature on [{lo}, {hi}] stalled with error estimate {estimate:e}")]
    Quadrature { lo: f64, hi: f64, estimate: f64 },

    /// The dense eigensolver did not converge.
    #[error("eigensolver did not converge on a {dim}x{dim} matrix ({detail})")]
    Eigensolver { dim: usize, detail: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
