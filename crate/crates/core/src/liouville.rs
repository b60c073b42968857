//! Liouville-space superoperators.
//!
//! Operators are vectorized by stacking rows, so for N = 2
//! `vec(rho) = (rho_11, rho_12, rho_21, rho_22)` and the entry `(kn, k'n')`
//! of a superoperator lives at `(k N + n, k' N + n')`.

use alloc::vec::Vec;
use core::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMatrix, CVector};
use crate::model::{ControlSystem, DissipationSpec, HERMITIAN_TOLERANCE};

/// Tolerance on the trace-functional residual of emitted generators.
pub const TRACE_TOLERANCE: f64 = 1e-12;

/// An N^2 x N^2 matrix acting on row-stacked `vec(rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let size = linalg::ensure_square(&matrix)?;
        let dim = exact_sqrt(size).ok_or(Error::NotPerfectSquare(size))?;
        if !linalg::all_finite(&matrix) {
            return Err(Error::NonFinite("superoperator"));
        }
        Ok(Self { dim, matrix })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.map(|x| x * z),
        }
    }

    /// `devec(L vec(x))`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.nrows(),
            });
        }
        devectorize(&(&self.matrix * vectorize(x)))
    }

    /// Largest modulus of `sum_k L[(kk), j]` over columns `j`: zero exactly
    /// when the trace functional is a left null vector.
    pub fn trace_residual(&self) -> f64 {
        let n = self.dim;
        (0..n * n)
            .map(|col| (0..n).map(|k| self.matrix[(k * n + k, col)]).sum::<Complex64>().norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from `L(x^dagger) = L(x)^dagger` over the matrix units.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                // L(|a><b|)^dagger versus L(|b><a|)
                for i in 0..n {
                    for j in 0..n {
                        let lhs = self.matrix[(j * n + i, a * n + b)].conj();
                        let rhs = self.matrix[(i * n + j, b * n + a)];
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
        }
        worst
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;

    fn add(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Mul<f64> for &Superoperator {
    type Output = Superoperator;

    fn mul(self, rhs: f64) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: self.matrix.scale(rhs),
        }
    }
}

fn exact_sqrt(m: usize) -> Option<usize> {
    let mut r = 0usize;
    while r * r < m {
        r += 1;
    }
    (r * r == m).then_some(r)
}

/// Row-stacking vectorization.
pub fn vectorize(x: &CMatrix) -> CVector {
    let (rows, cols) = x.shape();
    CVector::from_fn(rows * cols, |idx, _| x[(idx / cols, idx % cols)])
}

pub fn devectorize(v: &CVector) -> Result<CMatrix> {
    let n = exact_sqrt(v.len()).ok_or(Error::NotPerfectSquare(v.len()))?;
    Ok(CMatrix::from_fn(n, n, |i, j| v[i * n + j]))
}

/// Matrix of `rho -> (1 / (i hbar)) [H, rho]`.
pub fn commutator_superop(h: &CMatrix, hbar: f64) -> Result<Superoperator> {
    let n = linalg::ensure_square(h)?;
    let residual = linalg::hermitian_residual(h);
    if residual > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian {
            what: "Hamiltonian",
            residual,
        });
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter("hbar must be positive".into()));
    }
    Ok(Superoperator {
        dim: n,
        matrix: raw_commutator(h).map(|z| z / c(0.0, hbar)),
    })
}

/// Matrix of `rho -> H rho - rho H`, i.e. `H (x) I - I (x) H^T` for row stacking.
fn raw_commutator(h: &CMatrix) -> CMatrix {
    let n = h.nrows();
    let mut m = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                m[(row, k * n + j)] += h[(i, k)];
                m[(row, i * n + k)] -= h[(k, j)];
            }
        }
    }
    m
}

/// Rate-matrix dissipator: `(kn,kn) = -Gamma_kn`, `(nn,kk) = +gamma_nk`,
/// `(nn,nn) = -sum_k gamma_kn`; every other entry is zero.
pub fn build_dissipator(spec: &DissipationSpec) -> Superoperator {
    let n = spec.dim();
    let mut m = CMatrix::zeros(n * n, n * n);
    for k in 0..n {
        for l in 0..n {
            if k == l {
                continue;
            }
            m[(k * n + l, k * n + l)] = cr(-spec.dephasing()[(k, l)]);
            m[(l * n + l, k * n + k)] = cr(spec.relaxation()[(l, k)]);
        }
        m[(k * n + k, k * n + k)] = cr(-spec.decay_rate(k));
    }
    Superoperator { dim: n, matrix: m }
}

/// The four 4x4 matrices of the driven two-level system, with the coherent
/// parts left unscaled: the generator is `(1/(i hbar))(L0 + f1 L1 + f2 L2) + LD`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitSuperoperators {
    pub l0: Superoperator,
    pub l1: Superoperator,
    pub l2: Superoperator,
    pub ld: Superoperator,
}

/// Parameters recovered from a system built by [`ControlSystem::qubit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParameters {
    /// `hbar omega = E2 - E1`
    pub hbar_omega: f64,
    pub d1: f64,
    pub d2: f64,
}

impl QubitParameters {
    pub fn of(sys: &ControlSystem) -> Result<Self> {
        if sys.dim() != 2 {
            return Err(Error::QubitRequired(sys.dim()));
        }
        let h0 = sys.h0();
        let tol = HERMITIAN_TOLERANCE;
        if h0[(0, 1)].norm() > tol || h0[(1, 0)].norm() > tol {
            return Err(Error::EigenbasisRequired);
        }
        let [h1, h2] = sys.controls() else {
            return Err(Error::NotQubitFamily);
        };
        let d1 = h1[(0, 1)].re;
        let d2 = -h2[(0, 1)].im;
        let expected_h1 = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(d1), cr(d1), cr(0.0)]);
        let expected_h2 = CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -d2), c(0.0, d2), cr(0.0)]);
        if linalg::max_abs(&(h1 - expected_h1)) > tol || linalg::max_abs(&(h2 - expected_h2)) > tol {
            return Err(Error::NotQubitFamily);
        }
        Ok(Self {
            hbar_omega: h0[(1, 1)].re - h0[(0, 0)].re,
            d1,
            d2,
        })
    }
}

/// Builds the two-level matrices entry by entry from the closed-form display,
/// independently of [`commutator_superop`] and [`build_dissipator`].
pub fn qubit_superoperators(sys: &ControlSystem, spec: &DissipationSpec) -> Result<QubitSuperoperators> {
    let p = QubitParameters::of(sys)?;
    if spec.dim() != 2 {
        return Err(Error::QubitRequired(spec.dim()));
    }
    let gamma = spec.dephasing()[(0, 1)];
    let g12 = spec.relaxation()[(0, 1)];
    let g21 = spec.relaxation()[(1, 0)];
    let z = cr(0.0);
    let w = p.hbar_omega;

    let l0 = CMatrix::from_diagonal(&CVector::from_vec(alloc::vec![z, cr(-w), cr(w), z]));
    #[rustfmt::skip]
    let l1 = CMatrix::from_row_slice(4, 4, &[
        z,        cr(-1.0), cr(1.0),  z,
        cr(-1.0), z,        z,        cr(1.0),
        cr(1.0),  z,        z,        cr(-1.0),
        z,        cr(1.0),  cr(-1.0), z,
    ]).scale(p.d1);
    let (pi, mi) = (c(0.0, 1.0), c(0.0, -1.0));
    #[rustfmt::skip]
    let l2 = CMatrix::from_row_slice(4, 4, &[
        z,  mi, mi, z,
        pi, z,  z,  mi,
        pi, z,  z,  mi,
        z,  pi, pi, z,
    ]).scale(p.d2);
    #[rustfmt::skip]
    let ld = CMatrix::from_row_slice(4, 4, &[
        cr(-g21), z,           z,           cr(g12),
        z,        cr(-gamma),  z,           z,
        z,        z,           cr(-gamma),  z,
        cr(g21),  z,           z,           cr(-g12),
    ]);
    let wrap = |matrix| Superoperator { dim: 2, matrix };
    Ok(QubitSuperoperators {
        l0: wrap(l0),
        l1: wrap(l1),
        l2: wrap(l2),
        ld: wrap(ld),
    })
}

/// `(1/(i hbar)) [H0 + sum_m f_m H_m, .] + LD`.
pub fn total_generator(sys: &ControlSystem, spec: &DissipationSpec, f: &[f64]) -> Result<Superoperator> {
    if spec.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: spec.dim(),
        });
    }
    let h = sys.hamiltonian(f)?;
    let coherent = commutator_superop(&h, sys.hbar())?;
    Ok(&coherent + &build_dissipator(spec))
}

/// Coherent generators `(1/(i hbar)) [H_m, .]` of each control Hamiltonian.
pub fn control_superoperators(sys: &ControlSystem) -> Result<Vec<Superoperator>> {
    sys.controls()
        .iter()
        .map(|h| commutator_superop(h, sys.hbar()))
        .collect()
}

/// Entries where a control superoperator and the dissipator are both nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    /// `(row, col)` Liouville indices present in both supports.
    pub pairs: Vec<(usize, usize)>,
    /// Size of the union of control supports.
    pub control_support: usize,
    pub dissipator_support: usize,
}

impl OverlapReport {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Disjoint supports with a nonzero dissipator: no choice of control
    /// amplitudes can make the controls cancel the dissipative terms.
    pub fn cancellation_infeasible(&self) -> bool {
        self.is_empty() && self.dissipator_support > 0
    }
}

pub fn support_overlap(
    controls: &[Superoperator],
    dissipator: &Superoperator,
    threshold: f64,
) -> Result<OverlapReport> {
    let size = dissipator.matrix.nrows();
    for ctl in controls {
        if ctl.matrix.nrows() != size {
            return Err(Error::DimensionMismatch {
                expected: dissipator.dim,
                found: ctl.dim,
            });
        }
    }
    let mut pairs = Vec::new();
    let mut control_support = 0;
    let mut dissipator_support = 0;
    for i in 0..size {
        for j in 0..size {
            let in_controls = controls.iter().any(|l| l.matrix[(i, j)].norm() > threshold);
            let in_dissipator = dissipator.matrix[(i, j)].norm() > threshold;
            control_support += in_controls as usize;
            dissipator_support += in_dissipator as usize;
            if in_controls && in_dissipator {
                pairs.push((i, j));
            }
        }
    }
    Ok(OverlapReport {
        pairs,
        control_support,
        dissipator_support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RMatrix;
    use proptest::prelude::*;

    fn mat4(entries: [f64; 16]) -> CMatrix {
        CMatrix::from_iterator(4, 4, entries.iter().map(|&x| cr(x))).transpose()
    }

    #[test]
    fn vectorize_row_order() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(2.0), cr(3.0), cr(4.0)]);
        assert_eq!(vectorize(&m).as_slice(), &[cr(1.0), cr(2.0), cr(3.0), cr(4.0)]);
        let half = CMatrix::identity(2, 2).scale(0.5);
        assert_eq!(vectorize(&half).as_slice(), &[cr(0.5), cr(0.0), cr(0.0), cr(0.5)]);
        assert_eq!(devectorize(&CVector::zeros(3)), Err(Error::NotPerfectSquare(3)));
    }

    #[test]
    fn zero_hamiltonian_gives_zero_superoperator() {
        let l = commutator_superop(&CMatrix::zeros(3, 3), 1.0).unwrap();
        assert_eq!(l, Superoperator::zero(3));
    }

    #[test]
    fn internal_hamiltonian_matches_display() {
        let h0 = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(0.0), cr(1.0)]);
        let l = commutator_superop(&h0, 1.0).unwrap();
        let scaled = l.scale(c(0.0, 1.0));
        let expected = mat4([0., 0., 0., 0., 0., -1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0.]);
        assert!(linalg::max_abs(&(scaled.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        let h = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
        assert!(matches!(commutator_superop(&h, 1.0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn qubit_dissipator_display() {
        let spec = DissipationSpec::qubit(0.1, 0.2, 0.0).unwrap();
        let ld = build_dissipator(&spec);
        let expected = mat4([
            0., 0., 0., 0.2, //
            0., -0.1, 0., 0., //
            0., 0., -0.1, 0., //
            0., 0., 0., -0.2,
        ]);
        assert_eq!(ld.matrix(), &expected);
        assert_eq!(build_dissipator(&DissipationSpec::none(3)), Superoperator::zero(3));
    }

    #[test]
    fn three_level_dissipator_entries() {
        // gamma_13 only: decay |3> -> |1>
        let mut relax = RMatrix::zeros(3, 3);
        relax[(0, 2)] = 0.7;
        let spec = DissipationSpec::new(RMatrix::zeros(3, 3), relax).unwrap();
        let ld = build_dissipator(&spec);
        let idx = |k: usize, n: usize| k * 3 + n;
        let mut expected = CMatrix::zeros(9, 9);
        expected[(idx(0, 0), idx(2, 2))] = cr(0.7);
        expected[(idx(2, 2), idx(2, 2))] = cr(-0.7);
        assert_eq!(ld.matrix(), &expected);
        assert!(ld.trace_residual() < 1e-15);
    }

    #[test]
    fn qubit_display_requires_two_levels() {
        let sys = ControlSystem::new(CMatrix::identity(3, 3), alloc::vec![], 1.0).unwrap();
        assert_eq!(
            qubit_superoperators(&sys, &DissipationSpec::none(3)),
            Err(Error::QubitRequired(3))
        );
    }

    #[test]
    fn qubit_display_matches_commutator_route() {
        let sys = ControlSystem::qubit(-0.3, 1.7, 0.8, -1.1, 1.3).unwrap();
        let spec = DissipationSpec::qubit(0.4, 0.3, 0.05).unwrap();
        let q = qubit_superoperators(&sys, &spec).unwrap();
        let i_hbar = c(0.0, sys.hbar());
        let l0 = commutator_superop(sys.h0(), sys.hbar()).unwrap().scale(i_hbar);
        let l1 = commutator_superop(&sys.controls()[0], sys.hbar()).unwrap().scale(i_hbar);
        let l2 = commutator_superop(&sys.controls()[1], sys.hbar()).unwrap().scale(i_hbar);
        for (a, b) in [(&q.l0, &l0), (&q.l1, &l1), (&q.l2, &l2), (&q.ld, &build_dissipator(&spec))] {
            assert!(linalg::max_abs(&(a.matrix() - b.matrix())) <= 1e-14);
        }
    }

    #[test]
    fn qubit_overlap_is_empty() {
        let sys = ControlSystem::qubit(0.0, 1.0, 0.7, 1.3, 1.0).unwrap();
        let spec = DissipationSpec::qubit(0.1, 0.2, 0.05).unwrap();
        let report = support_overlap(
            &control_superoperators(&sys).unwrap(),
            &build_dissipator(&spec),
            0.0,
        )
        .unwrap();
        assert!(report.is_empty());
        assert!(report.cancellation_infeasible());
    }

    #[test]
    fn artificial_dissipator_overlaps_everywhere() {
        let sys = ControlSystem::qubit(0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let controls = control_superoperators(&sys).unwrap();
        let report = support_overlap(&controls[..1], &controls[0], 0.0).unwrap();
        assert_eq!(report.pairs.len(), 8);
        assert_eq!(report.control_support, 8);
    }

    #[test]
    fn total_generator_is_trace_preserving() {
        let sys = ControlSystem::qubit(0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let spec = DissipationSpec::qubit(0.1, 0.2, 0.0).unwrap();
        let l = total_generator(&sys, &spec, &[0.3, -0.2]).unwrap();
        assert!(l.trace_residual() <= TRACE_TOLERANCE);
        assert!(l.hermiticity_residual() < 1e-15);
        assert!(total_generator(&sys, &spec, &[0.3]).is_err());
    }

    fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
            let a = CMatrix::from_iterator(n, n, v.into_iter().map(|(re, im)| c(re, im)));
            (&a + a.adjoint()).scale(0.5)
        })
    }

    proptest! {
        #[test]
        fn vectorize_round_trip(m in (1usize..5).prop_flat_map(hermitian)) {
            prop_assert_eq!(devectorize(&vectorize(&m)).unwrap(), m);
        }

        #[test]
        fn commutator_matches_direct_evaluation(
            (h, rho) in (1usize..5).prop_flat_map(|n| (hermitian(n), hermitian(n))),
            hbar in 0.1f64..3.0,
        ) {
            let l = commutator_superop(&h, hbar).unwrap();
            let direct = (&h * &rho - &rho * &h).map(|z| z / c(0.0, hbar));
            prop_assert!(linalg::max_abs(&(l.apply(&rho).unwrap() - direct)) <= 1e-12);
            prop_assert!(l.trace_residual() <= TRACE_TOLERANCE);
        }
    }
}
