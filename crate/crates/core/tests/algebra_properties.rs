use blochball_core::algebra::{
    control_generators, decompose_inhomogeneous, dissipative_algebra, dissipative_generators,
    hamiltonian_algebra, lie_closure, DEFAULT_MAX_DEPTH, DEFAULT_TOLERANCE,
};
use blochball_core::linalg::{c, cr, CMatrix, CVector, RMatrix};
use blochball_core::{quasi_spin_translation, ControlSystem, DissipationSpec};
use proptest::prelude::*;

fn qubit(gap: f64, d1: f64, d2: f64) -> ControlSystem {
    ControlSystem::qubit(0.0, gap, d1, d2, 1.0).unwrap()
}

/// Rates on every pair of three levels; `symmetric` ties `g_kn = g_nk`.
fn three_level(rates: [f64; 6], dephasing: [f64; 3], symmetric: bool) -> (ControlSystem, DissipationSpec) {
    let h0 = CMatrix::from_diagonal(&CVector::from_vec(vec![cr(0.0), cr(1.0), cr(2.3)]));
    let mut h1 = CMatrix::zeros(3, 3);
    h1[(0, 1)] = cr(1.0);
    h1[(1, 0)] = cr(1.0);
    h1[(1, 2)] = cr(0.7);
    h1[(2, 1)] = cr(0.7);
    let mut h2 = CMatrix::zeros(3, 3);
    h2[(0, 1)] = c(0.0, -1.0);
    h2[(1, 0)] = c(0.0, 1.0);
    let sys = ControlSystem::new(h0, vec![h1, h2], 1.0).unwrap();
    let mut relaxation = RMatrix::zeros(3, 3);
    let mut gamma = RMatrix::zeros(3, 3);
    for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        relaxation[(i, j)] = rates[k];
        relaxation[(j, i)] = if symmetric { rates[k] } else { rates[k + 3] };
        gamma[(i, j)] = dephasing[k];
        gamma[(j, i)] = dephasing[k];
    }
    (sys, DissipationSpec::new(gamma, relaxation).unwrap())
}

#[test]
fn three_level_quasi_spin_closure_has_no_translations() {
    let (sys, spec) = three_level([0.2, 0.1, 0.3, 0.0, 0.0, 0.0], [0.5, 0.6, 0.7], true);
    assert!(quasi_spin_translation(&spec).norm() <= 1e-12);
    let split = decompose_inhomogeneous(&dissipative_algebra(&sys, &spec).unwrap()).unwrap();
    assert_eq!(split.translation_dim, 0);
}

#[test]
fn control_only_closure_is_rotational() {
    let sys = qubit(1.0, 0.8, 0.3);
    let basis = lie_closure(&control_generators(&sys).unwrap(), DEFAULT_TOLERANCE, DEFAULT_MAX_DEPTH).unwrap();
    let split = decompose_inhomogeneous(&basis).unwrap();
    assert_eq!(split.translation_dim, 0);
    assert_eq!(split.translation_rank, 0);
    for e in basis.elements() {
        let a = e.view((0, 0), (3, 3));
        assert!((a + a.transpose()).amax() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closure_is_idempotent(
        gap in 0.2..3.0f64,
        d in (0.2..2.0f64, 0.2..2.0f64),
        rates in (0.05..1.0f64, 0.01..0.5f64, 0.0..1.0f64),
    ) {
        let sys = qubit(gap, d.0, d.1);
        let spec = DissipationSpec::qubit(rates.0 + rates.2, rates.0, rates.1).unwrap();
        let once = dissipative_algebra(&sys, &spec).unwrap();
        let twice = lie_closure(once.elements(), DEFAULT_TOLERANCE, DEFAULT_MAX_DEPTH).unwrap();
        prop_assert_eq!(once.dim(), twice.dim());
        prop_assert!(once.closure_residual() <= 1e-9);
    }

    #[test]
    fn dimension_is_basis_independent(
        gap in 0.2..3.0f64,
        d in (0.2..2.0f64, 0.2..2.0f64),
        rates in (0.05..1.0f64, 0.01..0.5f64, 0.0..1.0f64),
        mix in prop::array::uniform16(-1.0..1.0f64),
    ) {
        let sys = qubit(gap, d.0, d.1);
        let spec = DissipationSpec::qubit(rates.0 + rates.2, rates.0, rates.1).unwrap();
        let gens = dissipative_generators(&sys, &spec).unwrap();
        // Diagonally dominant, hence invertible.
        let m = RMatrix::from_fn(4, 4, |i, j| if i == j { 5.0 + mix[4 * i + j] } else { mix[4 * i + j] });
        let mixed: Vec<RMatrix> = (0..4)
            .map(|i| (0..4).fold(RMatrix::zeros(4, 4), |acc, j| acc + &gens[j] * m[(i, j)]))
            .collect();
        let original = lie_closure(&gens, DEFAULT_TOLERANCE, DEFAULT_MAX_DEPTH).unwrap();
        let reparameterized = lie_closure(&mixed, DEFAULT_TOLERANCE, DEFAULT_MAX_DEPTH).unwrap();
        prop_assert_eq!(original.dim(), reparameterized.dim());
    }

    #[test]
    fn dimensions_respect_ambient_bounds(
        rates in prop::array::uniform6(0.0..1.0f64),
        dephasing in prop::array::uniform3(0.5..2.0f64),
    ) {
        let (sys, spec) = three_level(rates, dephasing, false);
        let ham = hamiltonian_algebra(&sys).unwrap();
        prop_assert!(ham.dim() <= 6 * 6);
        let affine = dissipative_algebra(&sys, &spec).unwrap();
        // Affine maps on the 8 coherence components.
        prop_assert!(affine.dim() <= 8 * 8 + 8);
        let split = decompose_inhomogeneous(&affine).unwrap();
        prop_assert_eq!(split.homogeneous_dim + split.translation_dim, affine.dim());
    }

    #[test]
    fn symmetric_three_level_rates_have_no_translation(
        rates in prop::array::uniform6(0.0..1.0f64),
        dephasing in prop::array::uniform3(0.0..2.0f64),
    ) {
        let (_, spec) = three_level(rates, dephasing, true);
        prop_assert!(quasi_spin_translation(&spec).norm() <= 1e-12);
    }
}
