use std::f64::consts::PI;

use blochball_core::dynamics::{semigroup_spectrum, Propagator, SPECTRUM_TOLERANCE};
use blochball_core::linalg::{c, cr, CMatrix, RMatrix};
use blochball_core::{
    devectorize, expm, propagate, steady_state, total_generator, unitary_propagate, vectorize,
    CoherenceVector, ControlField, ControlSystem, DensityMatrix, DissipationSpec, Segment,
};
use proptest::prelude::*;

fn qubit_state() -> impl Strategy<Value = DensityMatrix> {
    (-1.0..1.0f64, 0.0..(2.0 * PI), 0.0..=1.0f64).prop_map(|(u, phi, r)| {
        let s = (1.0 - u * u).sqrt();
        CoherenceVector::qubit(r * s * phi.cos(), r * s * phi.sin(), r * u)
            .to_density_matrix()
            .unwrap()
    })
}

/// Paper qubit with rates obeying `Gamma >= (g12 + g21) / 2`.
fn physical_qubit() -> impl Strategy<Value = (ControlSystem, DissipationSpec)> {
    (
        -1.0..1.0f64,
        0.2..3.0f64,
        0.2..2.0f64,
        0.2..2.0f64,
        0.5..2.0f64,
        0.05..1.0f64,
        0.0..0.5f64,
        0.0..1.0f64,
    )
        .prop_map(|(e1, gap, d1, d2, hbar, g12, g21, extra)| {
            let sys = ControlSystem::qubit(e1, e1 + gap, d1, d2, hbar).unwrap();
            let spec = DissipationSpec::qubit(0.5 * (g12 + g21) + extra, g12, g21).unwrap();
            (sys, spec)
        })
}

fn piecewise_field() -> impl Strategy<Value = ControlField> {
    prop::collection::vec((0.1..2.0f64, -2.0..2.0f64, -2.0..2.0f64), 1..4).prop_map(|segs| {
        ControlField::piecewise_constant(
            segs.into_iter()
                .map(|(duration, a, b)| Segment { duration, values: vec![a, b] })
                .collect(),
        )
        .unwrap()
    })
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn rabi_flop_matches_closed_form() {
    // Degenerate levels: H = f d sigma_x, so z(t) = cos(2 d f t / hbar).
    let (d1, f1, hbar) = (0.7, 1.3, 1.1);
    let sigma_x = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(d1), cr(d1), cr(0.0)]);
    let sys = ControlSystem::new(CMatrix::zeros(2, 2), vec![sigma_x], hbar).unwrap();
    let flip = PI * hbar / (2.0 * d1 * f1);
    let field = ControlField::constant(vec![f1], flip).unwrap();
    let rho0 = DensityMatrix::basis_state(2, 0).unwrap();
    let traj = unitary_propagate(&sys, &field, &rho0, flip / 20.0).unwrap();
    for (&t, v) in traj.times().iter().zip(traj.states()) {
        let z = (2.0 * d1 * f1 * t / hbar).cos();
        assert!((v.bloch()[2] - z).abs() < 1e-12, "t = {t}");
        assert!(v.bloch()[0].abs() < 1e-12);
    }
    let (_, last) = traj.last().unwrap();
    assert!((last.bloch()[2] + 1.0).abs() < 1e-12);
}

#[test]
fn expm_of_rotation_generator() {
    let theta = 0.9;
    let m = RMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let e = expm(&m, theta).unwrap();
    let expected = RMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
    assert!((e - expected).amax() < 1e-15);
}

#[test]
fn three_level_spectrum_is_nonpositive() {
    let h0 = CMatrix::from_diagonal(&blochball_core::linalg::CVector::from_vec(vec![cr(0.0), cr(1.0), cr(2.1)]));
    let mut h1 = CMatrix::zeros(3, 3);
    h1[(0, 1)] = cr(1.0);
    h1[(1, 0)] = cr(1.0);
    h1[(1, 2)] = c(0.0, -0.8);
    h1[(2, 1)] = c(0.0, 0.8);
    let sys = ControlSystem::new(h0, vec![h1], 1.0).unwrap();
    let relaxation = RMatrix::from_row_slice(3, 3, &[0.0, 0.1, 0.02, 0.0, 0.0, 0.05, 0.01, 0.0, 0.0]);
    let dephasing = RMatrix::from_row_slice(3, 3, &[0.0, 0.1, 0.1, 0.1, 0.0, 0.1, 0.1, 0.1, 0.0]);
    let spec = DissipationSpec::new(dephasing, relaxation).unwrap();
    assert!(spec.decay_bound_shortfall() <= 0.0);
    for f in [-2.0, 0.0, 0.5, 3.0] {
        let report = semigroup_spectrum(&total_generator(&sys, &spec, &[f]).unwrap(), SPECTRUM_TOLERANCE).unwrap();
        assert!(report.spectral_abscissa <= 1e-12, "{}", report.spectral_abscissa);
        assert_eq!(report.zero_modes, 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_composition(
        (sys, spec) in physical_qubit(),
        f in (-2.0..2.0f64, -2.0..2.0f64),
        t1 in 0.0..3.0f64,
        t2 in 0.0..3.0f64,
    ) {
        let l = total_generator(&sys, &spec, &[f.0, f.1]).unwrap();
        let split = Propagator::new(&l, t1).unwrap().then(&Propagator::new(&l, t2).unwrap());
        let whole = Propagator::new(&l, t1 + t2).unwrap();
        prop_assert!(frobenius(&(split.matrix() - whole.matrix())) <= 1e-11);
    }

    #[test]
    fn propagators_preserve_hermiticity(
        (sys, spec) in physical_qubit(),
        f in (-2.0..2.0f64, -2.0..2.0f64),
        t in 0.0..5.0f64,
        re in prop::array::uniform4(-1.0..1.0f64),
        im in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let x = CMatrix::from_fn(2, 2, |i, j| c(re[2 * i + j], im[2 * i + j]));
        let h = &x + x.adjoint();
        let l = total_generator(&sys, &spec, &[f.0, f.1]).unwrap();
        let out = devectorize(&(expm(l.matrix(), t).unwrap() * vectorize(&h))).unwrap();
        prop_assert!(frobenius(&(&out - out.adjoint())) <= 1e-9);
    }

    #[test]
    fn trajectories_conserve_trace(
        (sys, spec) in physical_qubit(),
        field in piecewise_field(),
        rho0 in qubit_state(),
    ) {
        let traj = propagate(&sys, &spec, &field, &rho0, 0.1).unwrap();
        for v in traj.states() {
            prop_assert!((v.trace_part() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn zero_rates_agree_with_unitary_evolution(
        (sys, _) in physical_qubit(),
        field in piecewise_field(),
        rho0 in qubit_state(),
    ) {
        let open = propagate(&sys, &DissipationSpec::none(2), &field, &rho0, 0.2).unwrap();
        let closed = unitary_propagate(&sys, &field, &rho0, 0.2).unwrap();
        prop_assert_eq!(open.times(), closed.times());
        for (a, b) in open.states().iter().zip(closed.states()) {
            prop_assert!((a.bloch() - b.bloch()).amax() <= 1e-9);
        }
    }

    #[test]
    fn distance_to_equilibrium_never_grows(
        (sys, spec) in physical_qubit(),
        f in (-2.0..2.0f64, -2.0..2.0f64),
        rho0 in qubit_state(),
    ) {
        let f = [f.0, f.1];
        let target = steady_state(&sys, &spec, &f).unwrap();
        let field = ControlField::constant(f.to_vec(), 10.0).unwrap();
        let traj = propagate(&sys, &spec, &field, &rho0, 0.05).unwrap();
        let distances: Vec<f64> = traj.states().iter().map(|v| (v.bloch() - target.bloch()).norm()).collect();
        for w in distances.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn sampled_constant_field_matches_exact_propagation(
        (sys, spec) in physical_qubit(),
        f in (-2.0..2.0f64, -2.0..2.0f64),
        rho0 in qubit_state(),
    ) {
        let segments = vec![Segment { duration: 2.0, values: vec![f.0, f.1] }];
        let exact = propagate(&sys, &spec, &ControlField::piecewise_constant(segments.clone()).unwrap(), &rho0, 0.25).unwrap();
        let sampled = propagate(&sys, &spec, &ControlField::sampled(segments).unwrap(), &rho0, 0.25).unwrap();
        for (a, b) in exact.states().iter().zip(sampled.states()) {
            prop_assert!((a.bloch() - b.bloch()).amax() <= 1e-7);
        }
    }

    #[test]
    fn transition_frequency_is_antisymmetric(
        e1 in -2.0..2.0f64,
        gap in 0.0..3.0f64,
        hbar in 0.1..3.0f64,
    ) {
        let sys = ControlSystem::qubit(e1, e1 + gap, 1.0, 1.0, hbar).unwrap();
        let w = sys.transition_frequency(0, 1).unwrap();
        prop_assert_eq!(w, -sys.transition_frequency(1, 0).unwrap());
        prop_assert!((w.abs() - gap / hbar).abs() <= 1e-15 * (1.0 + gap / hbar));
    }
}
