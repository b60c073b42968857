//! Dense matrix aliases and the handful of decompositions the physics modules
//! lean on. Storage is always dynamic: the design envelope is N <= ~10, so
//! Liouville-space matrices stay at or below 100x100.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = DVector<Complex64>;
pub type RVector = DVector<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn ensure_square<T>(m: &DMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Largest entrywise modulus of `m - m^dagger`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Induced 1-norm (maximum absolute column sum).
pub fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> RVector {
    // Symmetrize so round-off in the input cannot leak into the solver.
    let h = (m + m.adjoint()).scale(0.5);
    let mut vals: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    RVector::from_vec(vals)
}

/// Eigenvalues of a real symmetric matrix with their eigenvectors, ascending.
pub fn symmetric_eigen(m: &RMatrix) -> (RVector, RMatrix) {
    let h = (m + m.transpose()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = RVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let vecs = RMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Eigenvalues of a general complex matrix, read off the diagonal of its
/// complex Schur form.
pub fn complex_eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    ensure_square(m)?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or(Error::Numerical("Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues of a real square matrix (possibly complex pairs).
pub fn real_matrix_eigenvalues(m: &RMatrix) -> Result<Vec<Complex64>> {
    complex_eigenvalues(&m.map(cr))
}

/// Singular values in descending order.
pub fn singular_values(m: &RMatrix) -> RVector {
    if m.nrows() == 0 || m.ncols() == 0 {
        return RVector::zeros(0);
    }
    let mut sv: Vec<f64> = SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    RVector::from_vec(sv)
}

/// Numerical rank with threshold `rel_tol * sigma_max`.
pub fn numerical_rank(m: &RMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.iter().copied().next() {
        None => 0,
        Some(top) if top == 0.0 => 0,
        Some(top) => sv.iter().filter(|&&s| s > rel_tol * top).count(),
    }
}

/// Orthonormal basis (as columns) of the right null space of `m`, using a
/// relative singular-value threshold.
pub fn null_space(m: &RMatrix, rel_tol: f64) -> RMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return RMatrix::zeros(0, 0);
    }
    // Pad to at least square so the SVD exposes all right singular vectors.
    let padded = if rows < cols {
        let mut p = RMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = rel_tol * top;
    let null: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| top == 0.0 || svd.singular_values[k] <= cut)
        .collect();
    RMatrix::from_fn(cols, null.len(), |i, j| v_t[(null[j], i)])
}

/// Frobenius inner product of two real matrices of equal shape.
pub fn frobenius_dot(a: &RMatrix, b: &RMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// `[a, b] = ab - ba`
pub fn commutator(a: &RMatrix, b: &RMatrix) -> RMatrix {
    a * b - b * a
}

/// Real representation of a complex matrix as the block matrix
/// `[[Re, -Im], [Im, Re]]`, which is a Lie-algebra homomorphism.
pub fn realify(m: &CMatrix) -> RMatrix {
    let n = m.nrows();
    let k = m.ncols();
    RMatrix::from_fn(2 * n, 2 * k, |i, j| {
        let z = m[(i % n, j % k)];
        match (i < n, j < k) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}
