use num_complex::Complex64;
use thiserror::Error;

use crate::pathlift::Outcome;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("roots {first} and {second} are closer than {tolerance:e}")]
    DuplicateRoots {
        first: usize,
        second: usize,
        tolerance: f64,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(Complex64),

    #[error("declared degree {declared} does not match {found} supplied values")]
    DegreeMismatch { declared: usize, found: usize },

    #[error("derivative order {order} exceeds degree {degree}")]
    OrderTooHigh { order: usize, degree: usize },

    #[error("|f'(z)| = {0:e} is below the critical-point guard")]
    CriticalPointInput(f64),

    #[error("Newton orbit reached a critical point at step {0}")]
    CriticalPointEncountered(usize),

    #[error("singular starting point z0 = {z0} (f or f' vanishes)")]
    SingularStart { z0: Complex64 },

    #[error("run ended without a certificate: {0:?}")]
    NotCertified(Outcome),

    #[error("operation needs the roots, but the polynomial was given by coefficients only")]
    RootsUnknown,

    #[error("{0} is not a root (residual {1:e})")]
    NotARoot(Complex64, f64),

    #[error("root oracle failed: {0}")]
    OracleFailure(String),

    #[error("continuation stalled near {at} ({remaining:e} of the segment left)")]
    ContinuationStall { at: Complex64, remaining: f64 },

    #[error("profile was computed for a different polynomial")]
    ProfileMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed polynomial input: {0}")]
    Parse(String),
}
