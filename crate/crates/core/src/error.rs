use alloc::boxed::Box;
use alloc::string::String;

use crate::algebra::LieBasis;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failures raised by the numerical core.
///
/// Variants split into two families that callers (the CLI in particular)
/// treat differently: malformed input (`is_input_error`) versus physically
/// or mathematically infeasible requests.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate state: amplitude vector has zero norm")]
    DegenerateState,

    #[error("unphysical state: {0}")]
    UnphysicalState(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("vector length {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("{what} is not Hermitian (residual {residual:e})")]
    NotHermitian { what: &'static str, residual: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("levels not ordered: E1 = {e1} must lie below E2 = {e2}")]
    LevelsNotOrdered { e1: f64, e2: f64 },

    #[error("eigenbasis required: internal Hamiltonian is not diagonal")]
    EigenbasisRequired,

    #[error("level index {index} out of range for dimension {dim}")]
    LevelOutOfRange { index: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid rates: {0}")]
    InvalidRates(String),

    #[error("invalid control field: {0}")]
    InvalidField(String),

    #[error("time {t} outside field domain [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },

    #[error("operation requires a two-level system, got dimension {0}")]
    QubitRequired(usize),

    #[error("control system is not of the driven two-level form diag(E1,E2), d1*sx, d2*sy")]
    NotQubitFamily,

    #[error("population not conserved: trace functional residual {residual:e}")]
    PopulationNotConserved { residual: f64 },

    #[error("generator does not preserve Hermiticity (residual {residual:e})")]
    NotHermiticityPreserving { residual: f64 },

    #[error("closure not reached after depth {depth} (partial dimension {})", partial.dim())]
    ClosureNotReached { depth: usize, partial: Box<LieBasis> },

    #[error("element {index} is not an affine embedding (last row residual {residual:e})")]
    NotAffine { index: usize, residual: f64 },

    #[error("semigroup domain: evolution requested for negative time {0}")]
    SemigroupDomain(f64),

    #[error(
        "invalid state along trajectory at t = {time}: {reason} (worst offense {worst:e})"
    )]
    InvalidTrajectoryState {
        time: f64,
        reason: &'static str,
        worst: f64,
    },

    #[error("non-unique equilibrium: generator null space has dimension {nullity}")]
    NonUniqueEquilibrium { nullity: usize },

    #[error("insufficient samples: {given} given, at least {required} required")]
    InsufficientSamples { given: usize, required: usize },

    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}

impl Error {
    /// True when the error stems from malformed or inconsistent input rather
    /// than from the physics of a well-formed request.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::NotSquare { .. }
                | Error::NotPerfectSquare(_)
                | Error::NotHermitian { .. }
                | Error::NonFinite(_)
                | Error::LevelsNotOrdered { .. }
                | Error::LevelOutOfRange { .. }
                | Error::InvalidParameter(_)
                | Error::InvalidRates(_)
                | Error::InvalidField(_)
                | Error::TimeOutOfRange { .. }
                | Error::QubitRequired(_)
                | Error::NotQubitFamily
                | Error::InsufficientSamples { .. }
                | Error::DegenerateState
        )
    }
}
