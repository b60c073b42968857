//! Equilibria of the affine flow and the conic traced by them under a
//! constant-control sweep.

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use alloc::vec::Vec;

use nalgebra::SVD;

use crate::bloch::{boundary_excess, to_affine, AffineGenerator};
use crate::error::{Error, Result};
use crate::linalg::{self, RMatrix, RVector};
use crate::liouville::total_generator;
use crate::model::{ControlSystem, DissipationSpec};
use crate::states::CoherenceVector;

/// Relative singular-value threshold below which `A` counts as singular.
const SINGULAR_TOLERANCE: f64 = 1e-10;

/// Fewest sweep points accepted for a conic fit.
pub const MIN_SWEEP_SAMPLES: usize = 6;

/// Unique fixed point `v* = -A^{-1} b` of a generator's affine flow, falling
/// back to the null space of the full generator when `A` is singular.
pub fn steady_state_from_generator(g: &AffineGenerator) -> Result<CoherenceVector> {
    let a = g.homogeneous();
    let b = g.translation();
    let sv = linalg::singular_values(a);
    let top = sv.iter().copied().fold(0.0, f64::max);
    let bottom = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if top > 0.0 && bottom > SINGULAR_TOLERANCE * top {
        let v = a
            .clone()
            .lu()
            .solve(&(-b))
            .ok_or(Error::Numerical("singular homogeneous part"))?;
        return CoherenceVector::new(g.dim(), v, 1.0);
    }

    // Full generator in (trace, v) coordinates: [[0, 0], [b, A]].
    let k = g.dim_real();
    let mut full = RMatrix::zeros(k, k + 1);
    full.view_mut((0, 0), (k, 1)).copy_from(b);
    full.view_mut((0, 1), (k, k)).copy_from(a);
    let null = linalg::null_space(&full, SINGULAR_TOLERANCE);
    let nullity = null.ncols();
    if nullity == 1 {
        let trace = null[(0, 0)];
        if trace.abs() > SINGULAR_TOLERANCE {
            let v = RVector::from_iterator(k, (1..=k).map(|i| null[(i, 0)] / trace));
            return CoherenceVector::new(g.dim(), v, 1.0);
        }
    }
    Err(Error::NonUniqueEquilibrium { nullity })
}

/// Equilibrium under constant control amplitudes `f`.
pub fn steady_state(sys: &ControlSystem, spec: &DissipationSpec, f: &[f64]) -> Result<CoherenceVector> {
    steady_state_from_generator(&to_affine(&total_generator(sys, spec, f)?)?)
}

/// Best-fit 2-plane through a point cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneFit {
    pub centroid: RVector,
    /// Orthonormal in-plane directions.
    pub axes: [RVector; 2],
    /// Largest distance of a point from the plane.
    pub max_distance: f64,
    /// Typical distance from the centroid, used to normalize plane coordinates.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicKind {
    Ellipse,
    Parabola,
    Hyperbola,
}

/// Least-squares conic `a s^2 + b s w + c w^2 + d s + e w + f = 0` in
/// normalized plane coordinates `(s, w) = axes . (p - centroid) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicFit {
    pub plane: PlaneFit,
    /// `[a, b, c, d, e, f]`, unit Euclidean norm.
    pub coefficients: [f64; 6],
    /// RMS algebraic residual over the points.
    pub residual: f64,
    /// `b^2 - 4 a c`.
    pub discriminant: f64,
    pub kind: ConicKind,
}

/// Fits a conic through points lying (approximately) in a 2-plane. Returns
/// `None` when the points are collinear or too few to pin down a unique conic.
pub fn fit_conic(points: &[RVector]) -> Option<ConicFit> {
    let n = points.len();
    let dim = points.first()?.len();
    if n < 5 || dim < 2 {
        return None;
    }
    let centroid = points.iter().fold(RVector::zeros(dim), |acc, p| acc + p) / n as f64;
    let centered = RMatrix::from_fn(n, dim, |i, j| points[i][j] - centroid[j]);
    let scale = (centered.norm_squared() / n as f64).sqrt();
    if !(scale > 0.0) {
        return None;
    }
    let (vals, vecs) = linalg::symmetric_eigen(&(centered.transpose() * &centered));
    let top = vals[dim - 1];
    // Eigenvalues of the scatter matrix are squared singular values.
    if !(vals[dim - 2] > 1e-18 * top) {
        return None;
    }
    let u = vecs.column(dim - 1).into_owned();
    let w = vecs.column(dim - 2).into_owned();
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let row = centered.row(i).transpose();
            (row.dot(&u) / scale, row.dot(&w) / scale)
        })
        .collect();
    let max_distance = (0..n)
        .map(|i| {
            let row = centered.row(i).transpose();
            let (s, t) = coords[i];
            (row - u.scale(s * scale) - w.scale(t * scale)).norm()
        })
        .fold(0.0, f64::max);

    let design = RMatrix::from_fn(n, 6, |i, j| {
        let (s, t) = coords[i];
        [s * s, s * t, t * t, s, t, 1.0][j]
    });
    let svd = SVD::new(design.clone(), false, true);
    let v_t = svd.v_t?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));
    if order.len() < 6 {
        return None;
    }
    let (smallest, second) = (order[0], order[1]);
    let largest = sv[order[5]];
    if sv[second] <= 1e-9 * largest {
        return None;
    }
    let mut coefficients = [0.0; 6];
    for (j, c) in coefficients.iter_mut().enumerate() {
        *c = v_t[(smallest, j)];
    }
    let [a, b, c, ..] = coefficients;
    let discriminant = b * b - 4.0 * a * c;
    let kind = if discriminant < -1e-12 {
        ConicKind::Ellipse
    } else if discriminant > 1e-12 {
        ConicKind::Hyperbola
    } else {
        ConicKind::Parabola
    };
    Some(ConicFit {
        plane: PlaneFit {
            centroid,
            axes: [u, w],
            max_distance,
            scale,
        },
        coefficients,
        // Measured rather than read off the singular value, which deflation
        // can round to exactly zero.
        residual: (&design * RVector::from_row_slice(&coefficients)).norm() / (n as f64).sqrt(),
        discriminant,
        kind,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub control_index: usize,
    pub amplitudes: Vec<f64>,
    pub points: Vec<CoherenceVector>,
    /// `None` when the equilibria are degenerate (a single point or a line).
    pub conic: Option<ConicFit>,
    /// Largest `|v|` over the sweep.
    pub max_norm: f64,
    /// Largest boundary excess over the sweep; negative when every
    /// equilibrium is a full-rank state.
    pub worst_excess: f64,
}

impl SweepReport {
    /// Every equilibrium lies strictly inside the state space.
    pub fn strictly_inside(&self) -> bool {
        self.worst_excess < 0.0
    }

    pub fn is_ellipse(&self) -> bool {
        self.conic.as_ref().is_some_and(|c| c.kind == ConicKind::Ellipse)
    }
}

/// Equilibria for `f_m = amplitude` (other controls zero) and the conic
/// through them.
pub fn steady_state_sweep(
    sys: &ControlSystem,
    spec: &DissipationSpec,
    control_index: usize,
    amplitudes: &[f64],
) -> Result<SweepReport> {
    if amplitudes.len() < MIN_SWEEP_SAMPLES {
        return Err(Error::InsufficientSamples {
            given: amplitudes.len(),
            required: MIN_SWEEP_SAMPLES,
        });
    }
    if control_index >= sys.num_controls() {
        return Err(Error::InvalidParameter(alloc::format!(
            "control index {control_index} out of range for {} controls",
            sys.num_controls()
        )));
    }
    let mut f = alloc::vec![0.0; sys.num_controls()];
    let mut points = Vec::with_capacity(amplitudes.len());
    for &amp in amplitudes {
        f[control_index] = amp;
        points.push(steady_state(sys, spec, &f)?);
    }
    let bloch: Vec<RVector> = points.iter().map(|p| p.bloch().clone()).collect();
    Ok(SweepReport {
        control_index,
        amplitudes: amplitudes.to_vec(),
        max_norm: points.iter().map(CoherenceVector::norm).fold(0.0, f64::max),
        worst_excess: points.iter().map(boundary_excess).fold(f64::NEG_INFINITY, f64::max),
        conic: fit_conic(&bloch),
        points,
    })
}
