use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Structural problem with an input description (unknown label, bad rate, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// A required network element is missing (for example the mechanical waveguide port).
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The drift matrix has an eigenvalue with negative real part.
    #[error("unstable drift matrix: eigenvalue {re:+.6e} {im:+.6e}i has negative real part")]
    Unstable { re: f64, im: f64 },

    /// `M - i omega` could not be inverted to the required accuracy.
    #[error("susceptibility is singular at omega = {omega:e} (residual {residual:e})")]
    Singular { omega: f64, residual: f64 },

    /// Mode index outside the first Brillouin zone.
    #[error("mode index {index} outside the Brillouin zone [{lo}, {hi}]")]
    OutOfZone { index: i64, lo: i64, hi: i64 },

    /// A parameter lies outside the regime where a formula is defined.
    #[error("validity error: {0}")]
    Validity(String),

    /// Least-squares fit did not produce a usable result.
    #[error("fit failed: {0}")]
    Fit(String),

    /// Time integration gave up.
    #[error("integration failed at t = {t:e}: {reason}")]
    Integration { t: f64, reason: String },

    /// Quadrature did not reach the requested tolerance.
    #[error("quadrature failed on [{a:e}, {b:e}]: estimated error {error:e}")]
    Quadrature { a: f64, b: f64, error: f64 },

    /// Dark-state pulse synthesis failed.
    #[error("pulse design failed: {0}")]
    Design(String),

    /// Problem too large for the requested solver.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Formula evaluated on a resonance where it diverges.
    #[error("resonance: {0}")]
    Resonance(String),

    /// Inverse problem has no solution within the allowed bounds.
    #[error("solver failed: {message} (residual {residual:e})")]
    Solver { message: String, residual: f64 },

    /// Operands with incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::Configuration(_)
                | Error::OutOfZone { .. }
                | Error::Validity(_)
                | Error::Dimension { .. }
                | Error::Resource(_)
        )
    }
}
