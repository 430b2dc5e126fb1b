use thiserror::Error;

/// Errors raised by state, channel and measure construction.
///
/// Validation errors carry the measured defect so callers can report how far
/// an input is from satisfying the violated invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace is not one (|tr - 1| = {defect:.3e})")]
    TraceNotOne { defect: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subsystem index {index} out of range for {count} subsystems")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("expected a single-qubit state, got dims {0:?}")]
    NotQubit(Vec<usize>),
    #[error("Bloch vector norm {norm:.6} exceeds 1")]
    BlochNormExceeded { norm: f64 },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("channel is not trace preserving (||sum E^dag E - I|| = {defect:.3e})")]
    NotTracePreserving { defect: f64 },
    #[error("empty Kraus operator list")]
    EmptyKrausList,
    #[error("state is not normalized (| ||psi||^2 - 1 | = {defect:.3e})")]
    NotNormalized { defect: f64 },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("channel cannot create quantum correlations: {0}")]
    ChannelCannotCreate(String),
    #[error("no witness state found after {tried} candidates")]
    WitnessSearchExhausted { tried: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// True when `defect` exceeds `tol` or is NaN.
pub(crate) fn exceeds(defect: f64, tol: f64) -> bool {
    defect.is_nan() || defect > tol
}
