//! Run configuration: one JSON document describes one system, its field, the
//! initial state and the sampling settings.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major arrays of
//! rows. Level indices are 1-based. The schema lives in
//! `schema/run-config.schema.json`.

use std::fs;
use std::path::Path;

use blochball_core::linalg::{c, CMatrix, RMatrix, RVector};
use blochball_core::{
    ControlField, ControlSystem, DensityMatrix, DissipationSpec, FieldKind, Segment,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Complex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub system: SystemConfig,
    #[serde(default)]
    pub dissipation: DissipationConfig,
    pub field: FieldConfig,
    pub initial: InitialState,
    #[serde(default)]
    pub run: RunSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub levels: usize,
    /// Diagonal of `H0` in its eigenbasis.
    pub energies: Vec<f64>,
    #[serde(default = "unit")]
    pub hbar: f64,
    /// One entry per control field; `H_m` is the sum of its terms.
    pub controls: Vec<ControlConfig>,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    pub terms: Vec<Coupling>,
}

/// A Hermitian contribution to one control Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Coupling {
    /// `d (|i><j| + |j><i|)`
    X { levels: [usize; 2], dipole: f64 },
    /// `d (-i |i><j| + i |j><i|)`
    Y { levels: [usize; 2], dipole: f64 },
    Matrix { matrix: Vec<Vec<Complex>> },
}

/// `dephasing[k][n] = Gamma_kn` (symmetric); `relaxation[k][n] = gamma_kn`,
/// the rate of `|n> -> |k>`. Missing matrices mean no dissipation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dephasing: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKindConfig {
    PiecewiseConstant,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub kind: FieldKindConfig,
    pub segments: Vec<SegmentConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub duration: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// State vector amplitudes; normalized on load.
    Pure(Vec<Complex>),
    Density(Vec<Vec<Complex>>),
    /// Generalized Bloch vector of a unit-trace state.
    Coherence(Vec<f64>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    /// Must equal the field duration when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Append the flattened density matrix to each row.
    #[serde(default)]
    pub density: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// 1-based control index.
    pub control: usize,
    pub amplitudes: Vec<f64>,
}

/// Core objects built from a validated configuration.
#[derive(Debug, Clone)]
pub struct Model {
    pub system: ControlSystem,
    pub dissipation: DissipationSpec,
    pub field: ControlField,
    pub initial: DensityMatrix,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Config(format!(
                "line {}, column {}, at `{}`: {}",
                inner.line(),
                inner.column(),
                path,
                inner
            ))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("configs always serialize");
        text.push('\n');
        text
    }

    pub fn build(&self) -> Result<Model, CliError> {
        let n = self.system.levels;
        if n < 2 {
            return config_err("system.levels must be at least 2");
        }
        if self.system.energies.len() != n {
            return config_err(format!(
                "system.energies has {} entries for {n} levels",
                self.system.energies.len()
            ));
        }
        let h0 = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(self.system.energies[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let controls = self
            .system
            .controls
            .iter()
            .enumerate()
            .map(|(m, ctl)| control_matrix(n, m, ctl))
            .collect::<Result<Vec<_>, _>>()?;
        let system = ControlSystem::new(h0, controls, self.system.hbar)?;

        let dephasing = rate_matrix(n, "dissipation.dephasing", self.dissipation.dephasing.as_ref())?;
        let relaxation = rate_matrix(n, "dissipation.relaxation", self.dissipation.relaxation.as_ref())?;
        let dissipation = DissipationSpec::new(dephasing, relaxation)?;

        let kind = match self.field.kind {
            FieldKindConfig::PiecewiseConstant => FieldKind::PiecewiseConstant,
            FieldKindConfig::Sampled => FieldKind::Sampled,
        };
        let segments = self
            .field
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if s.values.len() != system.num_controls() {
                    return config_err(format!(
                        "field.segments[{i}] has {} values for {} controls",
                        s.values.len(),
                        system.num_controls()
                    ));
                }
                Ok(Segment {
                    duration: s.duration,
                    values: s.values.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let field = ControlField::new(kind, segments)?;
        if let Some(d) = self.run.duration {
            let total = field.total_duration();
            if (d - total).abs() > 1e-12 * total.max(1.0) {
                return config_err(format!(
                    "run.duration = {d} differs from the field duration {total}"
                ));
            }
        }

        let initial = self.initial_state(n)?;
        Ok(Model {
            system,
            dissipation,
            field,
            initial,
        })
    }

    fn initial_state(&self, n: usize) -> Result<DensityMatrix, CliError> {
        match &self.initial {
            InitialState::Pure(amps) => {
                if amps.len() != n {
                    return config_err(format!("initial.pure has {} amplitudes for {n} levels", amps.len()));
                }
                let amps: Vec<_> = amps.iter().map(|z| c(z[0], z[1])).collect();
                Ok(DensityMatrix::from_pure(&amps)?)
            }
            InitialState::Density(rows) => Ok(DensityMatrix::new(complex_matrix(n, "initial.density", rows)?)?),
            InitialState::Coherence(v) => {
                if v.len() != n * n - 1 {
                    return config_err(format!(
                        "initial.coherence has {} components, expected {}",
                        v.len(),
                        n * n - 1
                    ));
                }
                let cv = blochball_core::CoherenceVector::new(n, RVector::from_vec(v.clone()), 1.0)?;
                Ok(cv.to_density_matrix()?)
            }
        }
    }

    /// Sweep settings with 0-based control index.
    pub fn sweep_settings(&self) -> Option<(usize, Vec<f64>)> {
        self.sweep
            .as_ref()
            .map(|s| (s.control.wrapping_sub(1), s.amplitudes.clone()))
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

fn level_pair(n: usize, what: &str, levels: [usize; 2]) -> Result<(usize, usize), CliError> {
    let [i, j] = levels;
    if i == 0 || j == 0 || i > n || j > n || i == j {
        return config_err(format!(
            "{what}: levels {levels:?} must be two distinct indices in 1..={n}"
        ));
    }
    Ok((i - 1, j - 1))
}

fn control_matrix(n: usize, m: usize, ctl: &ControlConfig) -> Result<CMatrix, CliError> {
    let mut h = CMatrix::zeros(n, n);
    for (t, term) in ctl.terms.iter().enumerate() {
        let what = format!("system.controls[{m}].terms[{t}]");
        match term {
            Coupling::X { levels, dipole } => {
                let (i, j) = level_pair(n, &what, *levels)?;
                h[(i, j)] += c(*dipole, 0.0);
                h[(j, i)] += c(*dipole, 0.0);
            }
            Coupling::Y { levels, dipole } => {
                let (i, j) = level_pair(n, &what, *levels)?;
                h[(i, j)] += c(0.0, -dipole);
                h[(j, i)] += c(0.0, *dipole);
            }
            Coupling::Matrix { matrix } => h += complex_matrix(n, &what, matrix)?,
        }
    }
    Ok(h)
}

fn check_shape<T>(n: usize, what: &str, rows: &[Vec<T>]) -> Result<(), CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return config_err(format!("{what} must be a {n} x {n} matrix"));
    }
    Ok(())
}

fn complex_matrix(n: usize, what: &str, rows: &[Vec<Complex>]) -> Result<CMatrix, CliError> {
    check_shape(n, what, rows)?;
    Ok(CMatrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn rate_matrix(n: usize, what: &str, rows: Option<&Vec<Vec<f64>>>) -> Result<RMatrix, CliError> {
    match rows {
        None => Ok(RMatrix::zeros(n, n)),
        Some(rows) => {
            check_shape(n, what, rows)?;
            Ok(RMatrix::from_fn(n, n, |i, j| rows[i][j]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates;

    #[test]
    fn missing_key_reports_path_and_line() {
        let text = r#"{
  "system": {"levels": 2, "energies": [0, 1], "controls": []},
  "field": {"kind": "piecewise_constant", "segments": [{"duration": 1}]},
  "initial": {"pure": [[1, 0], [0, 0]]}
}"#;
        let CliError::Config(msg) = RunConfig::from_json(text).unwrap_err() else {
            panic!("expected a config error");
        };
        assert!(msg.contains("field.segments[0]"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut value = serde_json::to_value(templates::paper_qubit()).unwrap();
        value["system"]["mass"] = 1.0.into();
        assert!(RunConfig::from_json(&value.to_string()).is_err());
    }

    #[test]
    fn dimension_mismatches_are_config_errors() {
        let mut cfg = templates::paper_qubit();
        cfg.system.energies.push(2.0);
        assert!(matches!(cfg.build(), Err(CliError::Config(_))));

        let mut cfg = templates::paper_qubit();
        cfg.field.segments[0].values.pop();
        assert!(matches!(cfg.build(), Err(CliError::Config(_))));

        let mut cfg = templates::paper_qubit();
        cfg.initial = InitialState::Coherence(vec![0.0, 0.0]);
        assert!(matches!(cfg.build(), Err(CliError::Config(_))));

        let mut cfg = templates::paper_qubit();
        cfg.run.duration = Some(1e6);
        assert!(matches!(cfg.build(), Err(CliError::Config(_))));
    }

    #[test]
    fn couplings_follow_the_pauli_convention() {
        let cfg = templates::paper_qubit();
        let model = cfg.build().unwrap();
        let h2 = &model.system.controls()[1];
        assert_eq!(h2[(0, 1)], c(0.0, -0.5));
        assert_eq!(h2[(1, 0)], c(0.0, 0.5));
    }

    #[test]
    fn unphysical_initial_state_is_a_physics_error() {
        let mut cfg = templates::paper_qubit();
        cfg.initial = InitialState::Coherence(vec![0.0, 0.0, 1.5]);
        assert!(matches!(cfg.build(), Err(CliError::Physics(_))));
    }
}
