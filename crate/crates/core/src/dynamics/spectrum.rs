use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bloch::AffineGenerator;
use crate::error::Result;
use crate::linalg::{self, cr, CMatrix};
use crate::liouville::Superoperator;

/// Threshold on real parts for the boundedness verdict.
pub const SPECTRUM_TOLERANCE: f64 = 1e-12;

/// Generators whose spectrum decides the fate of `exp(L t)`.
pub trait SpectralGenerator {
    fn spectral_matrix(&self) -> CMatrix;
}

impl SpectralGenerator for Superoperator {
    fn spectral_matrix(&self) -> CMatrix {
        self.matrix().clone()
    }
}

/// Only the homogeneous part contributes: the translation shifts the fixed
/// point, not the rates.
impl SpectralGenerator for AffineGenerator {
    fn spectral_matrix(&self) -> CMatrix {
        self.homogeneous().map(cr)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Sorted by decreasing real part.
    pub eigenvalues: Vec<Complex64>,
    /// Largest real part.
    pub spectral_abscissa: f64,
    /// Eigenvalues with real part above the tolerance; these blow up along
    /// the forward flow, or along the backward flow of `-L`.
    pub unbounded_modes: usize,
    /// Eigenvalues within the tolerance of zero: candidate stationary states.
    pub zero_modes: usize,
    pub tolerance: f64,
}

impl SpectrumReport {
    /// All real parts nonpositive: `exp(L t)` stays bounded for `t >= 0`.
    pub fn bounded(&self) -> bool {
        self.unbounded_modes == 0
    }

    /// Some real part strictly negative, so `exp(L t)` is unbounded as
    /// `t -> -infinity` and only the forward semigroup is available.
    pub fn backward_unbounded(&self) -> bool {
        self.eigenvalues.iter().any(|z| z.re < -self.tolerance)
    }
}

pub fn semigroup_spectrum(generator: &impl SpectralGenerator, tol: f64) -> Result<SpectrumReport> {
    let mut eigenvalues = linalg::complex_eigenvalues(&generator.spectral_matrix())?;
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    let spectral_abscissa = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectrumReport {
        spectral_abscissa,
        unbounded_modes: eigenvalues.iter().filter(|z| z.re > tol).count(),
        zero_modes: eigenvalues.iter().filter(|z| z.norm() <= tol).count(),
        eigenvalues,
        tolerance: tol,
    })
}
