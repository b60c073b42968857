//! Density matrices and coherence (Bloch) vectors.
//!
//! The coherence vector of an N-level state is taken with respect to the
//! generalized Gell-Mann matrices `lambda_a`, normalized so that
//! `tr(lambda_a lambda_b) = 2 delta_ab` and ordered symmetric, antisymmetric,
//! diagonal. For N = 2 this is the Pauli triple, so the components are
//!
//! ```text
//! x = rho_12 + rho_21,  y = i (rho_12 - rho_21),  z = rho_11 - rho_22
//! ```
//!
//! with the trace part `rho_11 + rho_22` carried alongside. The inverse map is
//! `rho = (trace / N) I + 1/2 sum_a v_a lambda_a`.

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMatrix, RVector};

/// Tolerance for Hermiticity, trace and positivity checks on constructed states.
pub const STATE_TOLERANCE: f64 = 1e-9;

/// Generalized Gell-Mann basis of traceless Hermitian N x N matrices.
pub fn gell_mann_basis(n: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = CMatrix::zeros(n, n);
            m[(j, k)] = cr(1.0);
            m[(k, j)] = cr(1.0);
            basis.push(m);
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = CMatrix::zeros(n, n);
            m[(j, k)] = c(0.0, -1.0);
            m[(k, j)] = c(0.0, 1.0);
            basis.push(m);
        }
    }
    for l in 1..n {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(n, n);
        for j in 0..l {
            m[(j, j)] = cr(scale);
        }
        m[(l, l)] = cr(-(l as f64) * scale);
        basis.push(m);
    }
    basis
}

/// Deviations of a candidate state from the density-matrix axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDefects {
    pub hermiticity: f64,
    pub trace: f64,
    /// `max(0, -lambda_min)`.
    pub negativity: f64,
}

impl StateDefects {
    pub fn of(m: &CMatrix) -> Self {
        let hermiticity = linalg::hermitian_residual(m);
        let trace = (linalg::trace(m) - cr(1.0)).norm();
        let lowest = linalg::hermitian_eigenvalues(m)
            .iter()
            .copied()
            .next()
            .unwrap_or(0.0);
        Self {
            hermiticity,
            trace,
            negativity: (-lowest).max(0.0),
        }
    }

    pub fn worst(&self) -> f64 {
        self.hermiticity.max(self.trace).max(self.negativity)
    }

    /// Name and size of the largest violation if any exceeds `tol`.
    pub fn violation(&self, tol: f64) -> Option<(&'static str, f64)> {
        [
            ("not Hermitian", self.hermiticity),
            ("trace not one", self.trace),
            ("negative eigenvalue", self.negativity),
        ]
        .into_iter()
        .filter(|(_, v)| *v > tol || v.is_nan())
        .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// A Hermitian, positive-semidefinite, unit-trace N x N matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        Self::with_tolerance(entries, STATE_TOLERANCE)
    }

    pub fn with_tolerance(entries: CMatrix, tol: f64) -> Result<Self> {
        let n = linalg::ensure_square(&entries)?;
        if n == 0 {
            return Err(Error::InvalidParameter("empty density matrix".into()));
        }
        if !linalg::all_finite(&entries) {
            return Err(Error::NonFinite("density matrix"));
        }
        if let Some((reason, size)) = StateDefects::of(&entries).violation(tol) {
            return Err(Error::UnphysicalState(format!("{reason} (by {size:e})")));
        }
        Ok(Self { entries })
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if amplitudes.is_empty() || !(norm_sq > 0.0) {
            return Err(Error::DegenerateState);
        }
        if !norm_sq.is_finite() {
            return Err(Error::NonFinite("amplitudes"));
        }
        let n = amplitudes.len();
        let entries =
            CMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj() / norm_sq);
        Ok(Self { entries })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            entries: CMatrix::identity(n, n).scale(1.0 / n as f64),
        }
    }

    /// Basis state `|k><k|` (zero-based level index).
    pub fn basis_state(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::LevelOutOfRange { index: k, dim: n });
        }
        let mut entries = CMatrix::zeros(n, n);
        entries[(k, k)] = cr(1.0);
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn to_coherence_vector(&self) -> CoherenceVector {
        CoherenceVector::of_operator(&self.entries)
    }
}

/// Real coordinates of a state: Gell-Mann components plus the trace part.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceVector {
    dim: usize,
    bloch: RVector,
    trace_part: f64,
}

impl CoherenceVector {
    pub fn new(dim: usize, bloch: RVector, trace_part: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if bloch.len() != dim * dim - 1 {
            return Err(Error::DimensionMismatch {
                expected: dim * dim - 1,
                found: bloch.len(),
            });
        }
        if !trace_part.is_finite() || bloch.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("coherence vector"));
        }
        Ok(Self {
            dim,
            bloch,
            trace_part,
        })
    }

    /// Qubit shorthand for `(x, y, z)` with unit trace.
    pub fn qubit(x: f64, y: f64, z: f64) -> Self {
        Self {
            dim: 2,
            bloch: RVector::from_vec(alloc::vec![x, y, z]),
            trace_part: 1.0,
        }
    }

    /// Coordinates of an arbitrary square operator. Imaginary parts, which
    /// vanish for Hermitian input, are discarded.
    pub fn of_operator(m: &CMatrix) -> Self {
        let n = m.nrows();
        let bloch = RVector::from_iterator(
            n * n - 1,
            gell_mann_basis(n)
                .iter()
                .map(|lambda| hilbert_schmidt(m, lambda).re),
        );
        Self {
            dim: n,
            bloch,
            trace_part: linalg::trace(m).re,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bloch(&self) -> &RVector {
        &self.bloch
    }

    pub fn trace_part(&self) -> f64 {
        self.trace_part
    }

    pub fn norm(&self) -> f64 {
        self.bloch.norm()
    }

    /// `(trace / N) I + 1/2 sum_a v_a lambda_a`, without any validity check.
    pub fn to_operator(&self) -> CMatrix {
        let n = self.dim;
        let mut m = CMatrix::identity(n, n).scale(self.trace_part / n as f64);
        for (v, lambda) in self.bloch.iter().zip(gell_mann_basis(n)) {
            m += lambda.scale(0.5 * v);
        }
        m
    }

    /// `tr(rho^2) = trace^2 / N + |v|^2 / 2`.
    pub fn purity(&self) -> f64 {
        self.trace_part * self.trace_part / self.dim as f64 + 0.5 * self.bloch.norm_squared()
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        self.to_density_matrix_with_tolerance(STATE_TOLERANCE)
    }

    pub fn to_density_matrix_with_tolerance(&self, tol: f64) -> Result<DensityMatrix> {
        if self.dim == 2 && self.norm() > self.trace_part + tol {
            return Err(Error::UnphysicalState(format!(
                "Bloch vector norm {} exceeds trace part {}",
                self.norm(),
                self.trace_part
            )));
        }
        DensityMatrix::with_tolerance(self.to_operator(), tol)
    }
}

/// `tr(a b)`.
pub(crate) fn hilbert_schmidt(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = cr(0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Entry point mirroring [`DensityMatrix::from_pure`].
pub fn from_pure(amplitudes: &[Complex64]) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(amplitudes)
}

pub fn to_coherence_vector(rho: &DensityMatrix) -> CoherenceVector {
    rho.to_coherence_vector()
}

pub fn from_coherence_vector(v: &CoherenceVector) -> Result<DensityMatrix> {
    v.to_density_matrix()
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}
