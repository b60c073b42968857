//! Ready-to-run configurations. The files under `templates/` are generated
//! from these functions and checked against them by the test suite.

use crate::config::{
    ControlConfig, Coupling, DissipationConfig, FieldConfig, FieldKindConfig, InitialState,
    Outputs, RunConfig, RunSettings, SegmentConfig, SweepConfig, SystemConfig,
};

pub const NAMES: [&str; 3] = ["paper-qubit", "quasi-spin", "three-level-ladder"];

pub fn by_name(name: &str) -> Option<RunConfig> {
    match name {
        "paper-qubit" => Some(paper_qubit()),
        "quasi-spin" => Some(quasi_spin()),
        "three-level-ladder" => Some(three_level_ladder()),
        _ => None,
    }
}

fn qubit_system(d1: f64, d2: f64) -> SystemConfig {
    SystemConfig {
        levels: 2,
        energies: vec![0.0, 1.0],
        hbar: 1.0,
        controls: vec![
            ControlConfig {
                terms: vec![Coupling::X { levels: [1, 2], dipole: d1 }],
            },
            ControlConfig {
                terms: vec![Coupling::Y { levels: [1, 2], dipole: d2 }],
            },
        ],
    }
}

fn qubit_rates(gamma: f64, gamma_12: f64, gamma_21: f64) -> DissipationConfig {
    DissipationConfig {
        dephasing: Some(vec![vec![0.0, gamma], vec![gamma, 0.0]]),
        relaxation: Some(vec![vec![0.0, gamma_12], vec![gamma_21, 0.0]]),
    }
}

/// Nonzero: without excitation the field-free equilibrium is a pure state.
fn sweep_amplitudes() -> Vec<f64> {
    vec![-2.0, -1.0, -0.5, 0.25, 0.5, 1.0, 2.0]
}

/// Field-free decay of the excited level of the driven, dissipative qubit.
pub fn paper_qubit() -> RunConfig {
    RunConfig {
        description: Some("Two-level system with x and y controls, dephasing and decay |2> -> |1>".into()),
        system: qubit_system(1.0, 0.5),
        dissipation: qubit_rates(0.3, 0.2, 0.0),
        field: FieldConfig {
            kind: FieldKindConfig::PiecewiseConstant,
            segments: vec![SegmentConfig {
                duration: 60.0,
                values: vec![0.0, 0.0],
            }],
        },
        initial: InitialState::Pure(vec![[0.0, 0.0], [1.0, 0.0]]),
        run: RunSettings {
            duration: Some(60.0),
            sample_dt: Some(0.5),
            tolerance: None,
            outputs: Outputs { density: true },
        },
        sweep: Some(SweepConfig {
            control: 1,
            amplitudes: sweep_amplitudes(),
        }),
    }
}

/// Symmetric relaxation: the flow is linear and contracts to the centre.
pub fn quasi_spin() -> RunConfig {
    RunConfig {
        description: Some("Qubit with equal up and down relaxation rates driven by a pulse train".into()),
        system: qubit_system(1.0, 1.0),
        dissipation: qubit_rates(0.15, 0.1, 0.1),
        field: FieldConfig {
            kind: FieldKindConfig::PiecewiseConstant,
            segments: vec![
                SegmentConfig { duration: 1.5, values: vec![1.0, 0.0] },
                SegmentConfig { duration: 2.0, values: vec![0.0, 0.0] },
                SegmentConfig { duration: 1.5, values: vec![0.0, -1.0] },
                SegmentConfig { duration: 5.0, values: vec![0.0, 0.0] },
            ],
        },
        initial: InitialState::Coherence(vec![0.0, 0.0, 1.0]),
        run: RunSettings {
            duration: None,
            sample_dt: Some(0.25),
            tolerance: None,
            outputs: Outputs::default(),
        },
        sweep: Some(SweepConfig {
            control: 2,
            amplitudes: sweep_amplitudes(),
        }),
    }
}

/// Ladder `|1> - |2> - |3>` with cascade decay and a smoothly sampled drive.
pub fn three_level_ladder() -> RunConfig {
    let ladder = |kind: fn([usize; 2], f64) -> Coupling| ControlConfig {
        terms: vec![kind([1, 2], 1.0), kind([2, 3], 0.8)],
    };
    RunConfig {
        description: Some("Three-level ladder with cascade decay 3 -> 2 -> 1".into()),
        system: SystemConfig {
            levels: 3,
            energies: vec![0.0, 1.0, 2.1],
            hbar: 1.0,
            controls: vec![
                ladder(|levels, dipole| Coupling::X { levels, dipole }),
                ladder(|levels, dipole| Coupling::Y { levels, dipole }),
            ],
        },
        dissipation: DissipationConfig {
            dephasing: Some(vec![
                vec![0.0, 0.08, 0.06],
                vec![0.08, 0.0, 0.1],
                vec![0.06, 0.1, 0.0],
            ]),
            relaxation: Some(vec![
                vec![0.0, 0.1, 0.0],
                vec![0.0, 0.0, 0.05],
                vec![0.0, 0.0, 0.0],
            ]),
        },
        field: FieldConfig {
            kind: FieldKindConfig::Sampled,
            segments: vec![
                SegmentConfig { duration: 2.0, values: vec![0.0, 0.0] },
                SegmentConfig { duration: 2.0, values: vec![0.6, 0.2] },
                SegmentConfig { duration: 2.0, values: vec![0.6, -0.2] },
                SegmentConfig { duration: 2.0, values: vec![0.0, 0.0] },
            ],
        },
        initial: InitialState::Pure(vec![[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]),
        run: RunSettings {
            duration: Some(8.0),
            sample_dt: Some(0.1),
            tolerance: None,
            outputs: Outputs { density: true },
        },
        sweep: Some(SweepConfig {
            control: 1,
            amplitudes: sweep_amplitudes(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_round_trip() {
        for name in NAMES {
            let cfg = by_name(name).unwrap();
            assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg, "{name}");
        }
    }

    #[test]
    fn templates_build() {
        for name in NAMES {
            by_name(name).unwrap().build().unwrap();
        }
        assert!(by_name("nonexistent").is_none());
    }

    #[test]
    fn ladder_rates_are_physical() {
        let model = three_level_ladder().build().unwrap();
        assert!(model.dissipation.decay_bound_shortfall() <= 0.0);
        assert!(quasi_spin().build().unwrap().dissipation.is_quasi_spin());
    }
}
