//! Dynamical Lie algebras by commutator closure.
//!
//! Elements are kept orthonormal in the Frobenius inner product, so the
//! returned basis spans the algebra but does not retain the generators
//! themselves.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::bloch::to_affine;
use crate::error::{Error, Result};
use crate::linalg::{self, c, commutator, frobenius_dot, realify, RMatrix};
use crate::liouville::{build_dissipator, commutator_superop};
use crate::model::{ControlSystem, DissipationSpec};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct LieBasis {
    ambient_dim: usize,
    elements: Vec<RMatrix>,
    tol: f64,
}

impl LieBasis {
    fn empty(ambient_dim: usize, tol: f64) -> Self {
        Self {
            ambient_dim,
            elements: Vec::new(),
            tol,
        }
    }

    /// Side length of the (square) element matrices.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn elements(&self) -> &[RMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Adds the component of `m` orthogonal to the current span if its norm
    /// exceeds the tolerance. Returns whether the span grew.
    fn try_adjoin(&mut self, m: &RMatrix) -> bool {
        let mut residual = m.clone();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for e in &self.elements {
                let overlap = frobenius_dot(e, &residual);
                residual -= e.scale(overlap);
            }
        }
        let norm = residual.norm();
        if norm > self.tol {
            self.elements.push(residual.unscale(norm));
            true
        } else {
            false
        }
    }

    /// Rank of the vectorized elements by singular values.
    pub fn rank(&self) -> usize {
        linalg::numerical_rank(&self.stacked(|m| m.clone()), self.tol)
    }

    /// Largest distance of a pairwise commutator from the span.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.elements {
            for b in &self.elements {
                let mut r = commutator(a, b);
                for e in &self.elements {
                    let overlap = frobenius_dot(e, &r);
                    r -= e.scale(overlap);
                }
                worst = worst.max(r.norm());
            }
        }
        worst
    }

    /// Matrix whose columns are `f(e)` flattened, one per element.
    fn stacked(&self, f: impl Fn(&RMatrix) -> RMatrix) -> RMatrix {
        let cols: Vec<RMatrix> = self.elements.iter().map(f).collect();
        let len = cols.first().map_or(0, |m| m.len());
        RMatrix::from_fn(len, cols.len(), |i, j| cols[j].as_slice()[i])
    }
}

/// Span of the generators closed under commutators.
///
/// Generators are normalized before the independence test; commutators are
/// formed between orthonormal elements, so their norms stay bounded and a
/// single threshold `tol` (relative to unit-norm elements) decides rank.
pub fn lie_closure(generators: &[RMatrix], tol: f64, max_depth: usize) -> Result<LieBasis> {
    let Some(first) = generators.first() else {
        return Ok(LieBasis::empty(0, tol));
    };
    let n = linalg::ensure_square(first)?;
    for g in generators {
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.nrows(),
            });
        }
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("closure tolerance must be positive".into()));
    }

    let mut basis = LieBasis::empty(n, tol);
    for g in generators {
        let norm = g.norm();
        if norm > 0.0 {
            basis.try_adjoin(&g.unscale(norm));
        }
    }
    let mut frontier: Vec<usize> = (0..basis.dim()).collect();
    let mut depth = 0;
    while !frontier.is_empty() {
        if depth == max_depth {
            return Err(Error::ClosureNotReached {
                depth,
                partial: Box::new(basis),
            });
        }
        depth += 1;
        let mut next = Vec::new();
        for &i in &frontier {
            let mut j = 0;
            while j < basis.dim() {
                if j != i {
                    let bracket = commutator(&basis.elements[j], &basis.elements[i]);
                    if basis.try_adjoin(&bracket) {
                        next.push(basis.dim() - 1);
                    }
                }
                j += 1;
            }
        }
        frontier = next;
    }
    Ok(basis)
}

/// `i H0 / hbar` and `i H_m / hbar`, realified as 2N x 2N real matrices.
pub fn hamiltonian_generators(sys: &ControlSystem) -> Vec<RMatrix> {
    core::iter::once(sys.h0())
        .chain(sys.controls())
        .map(|h| realify(&h.map(|z| z * c(0.0, 1.0 / sys.hbar()))))
        .collect()
}

/// Closure of [`hamiltonian_generators`].
pub fn hamiltonian_algebra(sys: &ControlSystem) -> Result<LieBasis> {
    lie_closure(&hamiltonian_generators(sys), DEFAULT_TOLERANCE, DEFAULT_MAX_DEPTH)
}

/// Affine embeddings of the coherent control generators only.
pub fn control_generators(sys: &ControlSystem) -> Result<Vec<RMatrix>> {
    sys.controls()
        .iter()
        .map(|h| Ok(to_affine(&commutator_superop(h, sys.hbar())?)?.embed()))
        .collect()
}

/// Affine embeddings of the drift `[H0, .]`, each control and the dissipator.
pub fn dissipative_generators(sys: &ControlSystem, spec: &DissipationSpec) -> Result<Vec<RMatrix>> {
    if spec.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: spec.dim(),
        });
    }
    let mut gens = Vec::with_capacity(sys.num_controls() + 2);
    gens.push(to_affine(&commutator_superop(sys.h0(), sys.hbar())?)?.embed());
    gens.extend(control_generators(sys)?);
    gens.push(to_affine(&build_dissipator(spec))?.embed());
    Ok(gens)
}

/// Closure of [`dissipative_generators`].
pub fn dissipative_algebra(sys: &ControlSystem, spec: &DissipationSpec) -> Result<LieBasis> {
    lie_closure(&dissipative_generators(sys, spec)?, DEFAULT_TOLERANCE, DEFAULT_MAX_DEPTH)
}

/// Split of an affine algebra into its linear (gl) and translation parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InhomogeneousSplit {
    /// Rank of the projection onto the linear block.
    pub homogeneous_dim: usize,
    /// Dimension of the ideal of pure translations (kernel of that projection).
    pub translation_dim: usize,
    /// Rank of the projection onto the translation column.
    pub translation_rank: usize,
}

pub fn decompose_inhomogeneous(basis: &LieBasis) -> Result<InhomogeneousSplit> {
    let n = basis.ambient_dim();
    if basis.dim() == 0 {
        return Ok(InhomogeneousSplit {
            homogeneous_dim: 0,
            translation_dim: 0,
            translation_rank: 0,
        });
    }
    for (index, e) in basis.elements().iter().enumerate() {
        let residual = e.row(n - 1).amax();
        if residual > basis.tolerance() {
            return Err(Error::NotAffine { index, residual });
        }
    }
    let k = n - 1;
    let linear = basis.stacked(|e| e.view((0, 0), (k, k)).into_owned());
    let translation = basis.stacked(|e| e.view((0, k), (k, 1)).into_owned());
    let homogeneous_dim = linalg::numerical_rank(&linear, basis.tolerance());
    Ok(InhomogeneousSplit {
        homogeneous_dim,
        translation_dim: basis.dim() - homogeneous_dim,
        translation_rank: linalg::numerical_rank(&translation, basis.tolerance()),
    })
}
