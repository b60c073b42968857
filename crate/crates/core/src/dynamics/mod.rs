//! Forward-time evolution under `exp(L t)`, spectra of generators and
//! equilibrium points of the induced affine flow.

mod expm;
mod propagate;
mod spectrum;
mod steady;

use alloc::vec::Vec;

pub use expm::expm;
pub use propagate::{
    default_sample_dt, propagate, propagate_with, rk4_integrate, unitary_propagate,
    PropagationOptions, PROPAGATION_TOLERANCE,
};
pub use spectrum::{semigroup_spectrum, SpectralGenerator, SpectrumReport, SPECTRUM_TOLERANCE};
pub use steady::{
    fit_conic, steady_state, steady_state_from_generator, steady_state_sweep, ConicFit, ConicKind,
    PlaneFit, SweepReport, MIN_SWEEP_SAMPLES,
};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::liouville::{devectorize, vectorize, Superoperator};
use crate::states::CoherenceVector;

/// Time-stamped coherence vectors, starting at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<CoherenceVector>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<CoherenceVector>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: states.len(),
            });
        }
        if times.first().is_some_and(|&t| t != 0.0) {
            return Err(Error::InvalidParameter("trajectory must start at t = 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("trajectory times must increase strictly".into()));
        }
        Ok(Self { times, states })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[CoherenceVector] {
        &self.states
    }

    /// Density matrix of sample `i`, rebuilt from its coherence vector.
    pub fn density_at(&self, i: usize) -> CMatrix {
        self.states[i].to_operator()
    }

    pub fn last(&self) -> Option<(f64, &CoherenceVector)> {
        self.times.last().copied().zip(self.states.last())
    }
}

/// `exp(L t)` for a fixed generator and nonnegative duration.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    dim: usize,
    matrix: CMatrix,
    duration: f64,
}

impl Propagator {
    pub fn new(generator: &Superoperator, duration: f64) -> Result<Self> {
        if duration < 0.0 {
            return Err(Error::SemigroupDomain(duration));
        }
        Ok(Self {
            dim: generator.dim(),
            matrix: expm(generator.matrix(), duration)?,
            duration,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.nrows(),
            });
        }
        devectorize(&(&self.matrix * vectorize(rho)))
    }

    /// `self` after `earlier`.
    pub fn then(&self, earlier: &Propagator) -> Propagator {
        Propagator {
            dim: self.dim,
            matrix: &self.matrix * &earlier.matrix,
            duration: self.duration + earlier.duration,
        }
    }
}

/// `devec(exp(L t) vec(rho))` for `t >= 0`.
pub fn evolve(generator: &Superoperator, rho: &CMatrix, t: f64) -> Result<CMatrix> {
    Propagator::new(generator, t)?.apply(rho)
}
