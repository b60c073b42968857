//! Affine flows on the coherence vector.
//!
//! A trace-preserving generator `L` acts on `rho = I/N + 1/2 sum_a v_a lambda_a`
//! as `dv/dt = A v + b`. The homogeneous part `A` is read off the images of
//! the basis directions `lambda_a / 2`, the translation `b` off the image of
//! the maximally mixed state.

use alloc::vec::Vec;
use core::ops::{Add, Mul};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMatrix, RMatrix, RVector};
use crate::liouville::{build_dissipator, Superoperator, TRACE_TOLERANCE};
use crate::model::DissipationSpec;
use crate::states::{gell_mann_basis, hilbert_schmidt, CoherenceVector};

/// `dv/dt = A v + b` on the N^2 - 1 Gell-Mann components.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineGenerator {
    dim: usize,
    a: RMatrix,
    b: RVector,
}

impl AffineGenerator {
    pub fn new(dim: usize, a: RMatrix, b: RVector) -> Result<Self> {
        let k = dim * dim - 1;
        if a.nrows() != k || a.ncols() != k || b.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: b.len(),
            });
        }
        Ok(Self { dim, a, b })
    }

    /// Hilbert-space dimension N.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// N^2 - 1.
    pub fn dim_real(&self) -> usize {
        self.b.len()
    }

    pub fn homogeneous(&self) -> &RMatrix {
        &self.a
    }

    pub fn translation(&self) -> &RVector {
        &self.b
    }

    pub fn derivative(&self, v: &RVector) -> RVector {
        &self.a * v + &self.b
    }

    /// `[[A, b], [0, 0]]`, whose commutators realize the affine bracket.
    pub fn embed(&self) -> RMatrix {
        let k = self.dim_real();
        let mut m = RMatrix::zeros(k + 1, k + 1);
        m.view_mut((0, 0), (k, k)).copy_from(&self.a);
        m.view_mut((0, k), (k, 1)).copy_from(&self.b);
        m
    }
}

impl Add for &AffineGenerator {
    type Output = AffineGenerator;

    fn add(self, rhs: &AffineGenerator) -> AffineGenerator {
        assert_eq!(self.dim, rhs.dim, "affine generator dimensions differ");
        AffineGenerator {
            dim: self.dim,
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Mul<f64> for &AffineGenerator {
    type Output = AffineGenerator;

    fn mul(self, rhs: f64) -> AffineGenerator {
        AffineGenerator {
            dim: self.dim,
            a: self.a.scale(rhs),
            b: self.b.scale(rhs),
        }
    }
}

/// Gell-Mann components of an operator, keeping the imaginary parts so the
/// caller can check they vanish.
fn components(x: &CMatrix, basis: &[CMatrix]) -> Vec<num_complex::Complex64> {
    basis.iter().map(|lambda| hilbert_schmidt(x, lambda)).collect()
}

pub fn to_affine(l: &Superoperator) -> Result<AffineGenerator> {
    let n = l.dim();
    let scale = linalg::max_abs(l.matrix()).max(1.0);
    let residual = l.trace_residual();
    if residual > TRACE_TOLERANCE * scale {
        return Err(Error::PopulationNotConserved { residual });
    }
    let residual = l.hermiticity_residual();
    if residual > TRACE_TOLERANCE * scale {
        return Err(Error::NotHermiticityPreserving { residual });
    }
    let basis = gell_mann_basis(n);
    let k = basis.len();

    let mixed = CMatrix::identity(n, n).scale(1.0 / n as f64);
    let image = l.apply(&mixed)?;
    let b = RVector::from_iterator(k, components(&image, &basis).into_iter().map(|z| z.re));

    let mut a = RMatrix::zeros(k, k);
    for (col, lambda) in basis.iter().enumerate() {
        let image = l.apply(&lambda.map(|z| z * cr(0.5)))?;
        for (row, z) in components(&image, &basis).into_iter().enumerate() {
            a[(row, col)] = z.re;
        }
    }
    Ok(AffineGenerator { dim: n, a, b })
}

/// Translation part of the dissipator's affine form. Vanishes for symmetric
/// population rates.
pub fn quasi_spin_translation(spec: &DissipationSpec) -> RVector {
    to_affine(&build_dissipator(spec))
        .expect("rate-matrix dissipators conserve trace and Hermiticity")
        .b
}

/// Outcome of checking that a trajectory stays in the set of valid states.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport {
    pub samples: usize,
    /// Samples whose excess exceeds the tolerance.
    pub violations: usize,
    /// Largest excess over the boundary: `|v| - trace` for qubits, the most
    /// negative eigenvalue (sign flipped) otherwise. Negative when every
    /// sample is strictly inside.
    pub worst_excess: f64,
    pub worst_time: f64,
}

impl ContainmentReport {
    pub fn contained(&self) -> bool {
        self.violations == 0
    }
}

/// Boundary excess of a single state; see [`ContainmentReport::worst_excess`].
pub fn boundary_excess(v: &CoherenceVector) -> f64 {
    if v.dim() == 2 {
        v.norm() - v.trace_part()
    } else {
        let lowest = linalg::hermitian_eigenvalues(&v.to_operator())[0];
        -lowest
    }
}

pub fn ball_containment(traj: &Trajectory, tol: f64) -> ContainmentReport {
    let mut report = ContainmentReport {
        samples: traj.len(),
        violations: 0,
        worst_excess: f64::NEG_INFINITY,
        worst_time: 0.0,
    };
    for (t, v) in traj.times().iter().zip(traj.states()) {
        let excess = boundary_excess(v);
        if excess > tol || excess.is_nan() {
            report.violations += 1;
        }
        if excess > report.worst_excess || excess.is_nan() {
            report.worst_excess = excess;
            report.worst_time = *t;
        }
    }
    report
}
