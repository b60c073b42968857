//! Controlled dissipative systems: `H(f) = H0 + sum_m f_m H_m`, the rate
//! matrices of dephasing and population relaxation, and control fields.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMatrix, RMatrix};

/// Hermiticity tolerance for Hamiltonians.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSystem {
    h0: CMatrix,
    controls: Vec<CMatrix>,
    hbar: f64,
}

impl ControlSystem {
    pub fn new(h0: CMatrix, controls: Vec<CMatrix>, hbar: f64) -> Result<Self> {
        let n = linalg::ensure_square(&h0)?;
        if n == 0 {
            return Err(Error::InvalidParameter("empty Hamiltonian".into()));
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        check_hamiltonian(&h0, n, "internal Hamiltonian")?;
        for h in &controls {
            check_hamiltonian(h, n, "control Hamiltonian")?;
        }
        Ok(Self { h0, controls, hbar })
    }

    /// Driven two-level system: `H0 = diag(E1, E2)`, `H1 = d1 sigma_x`,
    /// `H2 = d2 sigma_y`.
    pub fn qubit(e1: f64, e2: f64, d1: f64, d2: f64, hbar: f64) -> Result<Self> {
        if !(e1 < e2) {
            return Err(Error::LevelsNotOrdered { e1, e2 });
        }
        let h0 = CMatrix::from_row_slice(2, 2, &[cr(e1), cr(0.0), cr(0.0), cr(e2)]);
        let h1 = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(d1), cr(d1), cr(0.0)]);
        let h2 = CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -d2), c(0.0, d2), cr(0.0)]);
        Self::new(h0, alloc::vec![h1, h2], hbar)
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn h0(&self) -> &CMatrix {
        &self.h0
    }

    pub fn controls(&self) -> &[CMatrix] {
        &self.controls
    }

    pub fn num_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Total Hamiltonian for control amplitudes `f`.
    pub fn hamiltonian(&self, f: &[f64]) -> Result<CMatrix> {
        if f.len() != self.controls.len() {
            return Err(Error::DimensionMismatch {
                expected: self.controls.len(),
                found: f.len(),
            });
        }
        let mut h = self.h0.clone();
        for (fm, hm) in f.iter().zip(&self.controls) {
            h += hm.scale(*fm);
        }
        Ok(h)
    }

    /// `(E_n - E_k) / hbar` for zero-based level indices; requires a diagonal
    /// internal Hamiltonian.
    pub fn transition_frequency(&self, k: usize, n: usize) -> Result<f64> {
        let dim = self.dim();
        for index in [k, n] {
            if index >= dim {
                return Err(Error::LevelOutOfRange { index, dim });
            }
        }
        let off_diagonal = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .fold(0.0f64, |acc, (i, j)| acc.max(self.h0[(i, j)].norm()));
        if off_diagonal > HERMITIAN_TOLERANCE {
            return Err(Error::EigenbasisRequired);
        }
        Ok((self.h0[(n, n)].re - self.h0[(k, k)].re) / self.hbar)
    }
}

fn check_hamiltonian(h: &CMatrix, n: usize, what: &'static str) -> Result<()> {
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.nrows().max(h.ncols()),
        });
    }
    if !linalg::all_finite(h) {
        return Err(Error::NonFinite(what));
    }
    let residual = linalg::hermitian_residual(h);
    if residual > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { what, residual });
    }
    Ok(())
}

/// Dephasing rates `Gamma_kn` and relaxation rates `gamma_kn`, where
/// `gamma_kn` is the rate of the transition `|n> -> |k>`.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationSpec {
    dephasing: RMatrix,
    relaxation: RMatrix,
}

impl DissipationSpec {
    pub fn new(dephasing: RMatrix, relaxation: RMatrix) -> Result<Self> {
        let n = linalg::ensure_square(&dephasing)?;
        let m = linalg::ensure_square(&relaxation)?;
        if n != m {
            return Err(Error::DimensionMismatch { expected: n, found: m });
        }
        for (name, mat) in [("dephasing", &dephasing), ("relaxation", &relaxation)] {
            for i in 0..n {
                if mat[(i, i)] != 0.0 {
                    return Err(Error::InvalidRates(format!(
                        "{name} diagonal entry ({i},{i}) must be zero"
                    )));
                }
                for j in 0..n {
                    let r = mat[(i, j)];
                    if !r.is_finite() || r < 0.0 {
                        return Err(Error::InvalidRates(format!(
                            "{name} rate ({i},{j}) = {r} must be finite and nonnegative"
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if dephasing[(i, j)] != dephasing[(j, i)] {
                    return Err(Error::InvalidRates(format!(
                        "dephasing matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self {
            dephasing,
            relaxation,
        })
    }

    pub fn none(n: usize) -> Self {
        Self {
            dephasing: RMatrix::zeros(n, n),
            relaxation: RMatrix::zeros(n, n),
        }
    }

    /// Two-level rates: dephasing `gamma`, decay `gamma_12` (|2> -> |1>) and
    /// excitation `gamma_21` (|1> -> |2>).
    pub fn qubit(gamma: f64, gamma_12: f64, gamma_21: f64) -> Result<Self> {
        let dephasing = RMatrix::from_row_slice(2, 2, &[0.0, gamma, gamma, 0.0]);
        let relaxation = RMatrix::from_row_slice(2, 2, &[0.0, gamma_12, gamma_21, 0.0]);
        Self::new(dephasing, relaxation)
    }

    pub fn dim(&self) -> usize {
        self.dephasing.nrows()
    }

    pub fn dephasing(&self) -> &RMatrix {
        &self.dephasing
    }

    pub fn relaxation(&self) -> &RMatrix {
        &self.relaxation
    }

    /// Total population loss rate of level `n`: `sum_{k != n} gamma_kn`.
    pub fn decay_rate(&self, n: usize) -> f64 {
        self.relaxation.column(n).sum()
    }

    /// Symmetric population rates (`gamma_kn = gamma_nk`).
    pub fn is_quasi_spin(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.relaxation[(i, j)] == self.relaxation[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.dephasing.iter().chain(self.relaxation.iter()).all(|&r| r == 0.0)
    }

    /// Largest shortfall `(Lambda_k + Lambda_n) / 2 - Gamma_kn` over level
    /// pairs, where `Lambda_n` is the decay rate of level n. Positive values
    /// mean coherences outlive the populations they couple, which lets states
    /// leave the Bloch ball; for N = 2 a nonpositive value is also sufficient
    /// for positivity.
    pub fn decay_bound_shortfall(&self) -> f64 {
        let n = self.dim();
        let mut worst = f64::NEG_INFINITY;
        for k in 0..n {
            for m in (k + 1)..n {
                let bound = 0.5 * (self.decay_rate(k) + self.decay_rate(m));
                worst = worst.max(bound - self.dephasing[(k, m)]);
            }
        }
        if worst == f64::NEG_INFINITY {
            0.0
        } else {
            worst
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Constant within each segment.
    PiecewiseConstant,
    /// Linear interpolation between the values at segment starts; the last
    /// value is held over the final segment.
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub values: Vec<f64>,
}

/// Real control amplitudes `f_m(t)` over a finite time window starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlField {
    kind: FieldKind,
    segments: Vec<Segment>,
    ends: Vec<f64>,
}

impl ControlField {
    pub fn new(kind: FieldKind, segments: Vec<Segment>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::InvalidField("at least one segment required".into()));
        };
        let m = first.values.len();
        let mut ends = Vec::with_capacity(segments.len());
        let mut t = 0.0;
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.duration > 0.0) || !seg.duration.is_finite() {
                return Err(Error::InvalidField(format!(
                    "segment {i} duration {} must be positive",
                    seg.duration
                )));
            }
            if seg.values.len() != m {
                return Err(Error::InvalidField(format!(
                    "segment {i} has {} values, expected {m}",
                    seg.values.len()
                )));
            }
            if seg.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidField(format!("segment {i} has non-finite values")));
            }
            t += seg.duration;
            ends.push(t);
        }
        Ok(Self {
            kind,
            segments,
            ends,
        })
    }

    pub fn piecewise_constant(segments: Vec<Segment>) -> Result<Self> {
        Self::new(FieldKind::PiecewiseConstant, segments)
    }

    pub fn sampled(segments: Vec<Segment>) -> Result<Self> {
        Self::new(FieldKind::Sampled, segments)
    }

    /// A single constant segment.
    pub fn constant(values: Vec<f64>, duration: f64) -> Result<Self> {
        Self::piecewise_constant(alloc::vec![Segment { duration, values }])
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn num_controls(&self) -> usize {
        self.segments[0].values.len()
    }

    pub fn total_duration(&self) -> f64 {
        *self.ends.last().expect("nonempty")
    }

    /// Segment end times (cumulative durations).
    pub fn segment_ends(&self) -> &[f64] {
        &self.ends
    }

    pub fn segment_start(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.ends[i - 1]
        }
    }

    /// Index of the segment governing time `t`. Segments are left-closed, so
    /// at a shared endpoint the later segment applies.
    pub fn segment_index(&self, t: f64) -> Result<usize> {
        let total = self.total_duration();
        if !(t >= 0.0) || t > total * (1.0 + 1e-12) {
            return Err(Error::TimeOutOfRange { t, total });
        }
        Ok(self
            .ends
            .iter()
            .position(|&end| t < end)
            .unwrap_or(self.segments.len() - 1))
    }

    pub fn field_at(&self, t: f64) -> Result<Vec<f64>> {
        let i = self.segment_index(t)?;
        let seg = &self.segments[i];
        match self.kind {
            FieldKind::PiecewiseConstant => Ok(seg.values.clone()),
            FieldKind::Sampled => match self.segments.get(i + 1) {
                None => Ok(seg.values.clone()),
                Some(next) => {
                    let s = ((t - self.segment_start(i)) / seg.duration).clamp(0.0, 1.0);
                    Ok(seg
                        .values
                        .iter()
                        .zip(&next.values)
                        .map(|(a, b)| a + s * (b - a))
                        .collect())
                }
            },
        }
    }
}

pub fn qubit_system(e1: f64, e2: f64, d1: f64, d2: f64, hbar: f64) -> Result<ControlSystem> {
    ControlSystem::qubit(e1, e2, d1, d2, hbar)
}

pub fn transition_frequency(sys: &ControlSystem, k: usize, n: usize) -> Result<f64> {
    sys.transition_frequency(k, n)
}

pub fn field_at(field: &ControlField, t: f64) -> Result<Vec<f64>> {
    field.field_at(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn qubit_matrices_match_display() {
        let sys = qubit_system(0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(sys.h0(), &CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(0.0), cr(1.0)]));
        assert_eq!(
            sys.controls()[0],
            CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
        );
        assert_eq!(
            sys.controls()[1],
            CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)])
        );
    }

    #[test]
    fn zero_dipoles_give_zero_controls() {
        let sys = qubit_system(0.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert!(sys.controls().iter().all(|h| h.iter().all(|z| z.norm() == 0.0)));
    }

    #[test]
    fn unordered_levels_rejected() {
        assert_eq!(
            qubit_system(1.0, 0.0, 1.0, 1.0, 1.0),
            Err(Error::LevelsNotOrdered { e1: 1.0, e2: 0.0 })
        );
        assert!(qubit_system(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn transition_frequency_scales_with_hbar() {
        let sys = qubit_system(0.0, 1.0, 0.3, 0.2, 1.0).unwrap();
        assert_eq!(sys.transition_frequency(0, 1).unwrap(), 1.0);
        let sys = qubit_system(0.0, 1.0, 0.3, 0.2, 2.0).unwrap();
        assert_eq!(sys.transition_frequency(0, 1).unwrap(), 0.5);
        assert_eq!(sys.transition_frequency(1, 0).unwrap(), -0.5);
    }

    #[test]
    fn transition_frequency_needs_eigenbasis() {
        let h0 = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.5), cr(0.5), cr(1.0)]);
        let sys = ControlSystem::new(h0, alloc::vec![], 1.0).unwrap();
        assert_eq!(sys.transition_frequency(0, 1), Err(Error::EigenbasisRequired));
    }

    #[test]
    fn non_hermitian_control_rejected() {
        let h0 = CMatrix::identity(2, 2);
        let bad = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
        assert!(matches!(
            ControlSystem::new(h0, alloc::vec![bad], 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rates_validated() {
        assert!(DissipationSpec::qubit(-0.1, 0.0, 0.0).is_err());
        let asym = RMatrix::from_row_slice(2, 2, &[0.0, 0.1, 0.2, 0.0]);
        assert!(DissipationSpec::new(asym, RMatrix::zeros(2, 2)).is_err());
        let diag = RMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.0]);
        assert!(DissipationSpec::new(RMatrix::zeros(2, 2), diag).is_err());
        assert!(DissipationSpec::qubit(0.1, 0.2, 0.2).unwrap().is_quasi_spin());
        assert!(!DissipationSpec::qubit(0.1, 0.2, 0.0).unwrap().is_quasi_spin());
    }

    #[test]
    fn decay_bound() {
        assert_eq!(DissipationSpec::qubit(0.1, 0.2, 0.0).unwrap().decay_bound_shortfall(), 0.0);
        assert!(DissipationSpec::qubit(0.05, 0.2, 0.0).unwrap().decay_bound_shortfall() > 0.0);
    }

    #[test]
    fn field_lookup() {
        let f = ControlField::piecewise_constant(alloc::vec![
            Segment { duration: 1.0, values: alloc::vec![0.5, 0.0] },
            Segment { duration: 1.0, values: alloc::vec![-1.0, 2.0] },
        ])
        .unwrap();
        assert_eq!(f.field_at(0.3).unwrap(), alloc::vec![0.5, 0.0]);
        assert_eq!(f.field_at(1.0).unwrap(), alloc::vec![-1.0, 2.0]);
        assert_eq!(f.field_at(2.0).unwrap(), alloc::vec![-1.0, 2.0]);
        assert!(matches!(f.field_at(2.5), Err(Error::TimeOutOfRange { .. })));
        assert!(f.field_at(-0.1).is_err());
    }

    #[test]
    fn sampled_field_interpolates() {
        let f = ControlField::sampled(alloc::vec![
            Segment { duration: 2.0, values: alloc::vec![0.0] },
            Segment { duration: 1.0, values: alloc::vec![1.0] },
        ])
        .unwrap();
        assert_eq!(f.field_at(0.5).unwrap(), alloc::vec![0.25]);
        assert_eq!(f.field_at(2.5).unwrap(), alloc::vec![1.0]);
    }

    #[test]
    fn bad_segments_rejected() {
        assert!(ControlField::piecewise_constant(alloc::vec![]).is_err());
        assert!(ControlField::constant(alloc::vec![1.0], 0.0).is_err());
        assert!(ControlField::piecewise_constant(alloc::vec![
            Segment { duration: 1.0, values: alloc::vec![1.0] },
            Segment { duration: 1.0, values: alloc::vec![1.0, 2.0] },
        ])
        .is_err());
    }

    proptest! {
        #[test]
        fn qubit_family_is_hermitian(e1 in -5.0f64..5.0, gap in 0.01f64..5.0, d1 in -3.0f64..3.0, d2 in -3.0f64..3.0) {
            let sys = qubit_system(e1, e1 + gap, d1, d2, 1.0).unwrap();
            prop_assert_eq!(sys.controls()[0][(0, 1)], cr(d1));
            prop_assert_eq!(sys.controls()[1][(0, 1)], c(0.0, -d2));
            prop_assert_eq!(sys.controls()[1][(1, 0)], c(0.0, d2));
            for h in core::iter::once(sys.h0()).chain(sys.controls()) {
                prop_assert_eq!(linalg::hermitian_residual(h), 0.0);
            }
            let w = sys.transition_frequency(0, 1).unwrap();
            prop_assert_eq!(w, -sys.transition_frequency(1, 0).unwrap());
        }
    }
}
