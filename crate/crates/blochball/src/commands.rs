use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use blochball_core::algebra::{
    decompose_inhomogeneous, dissipative_generators, hamiltonian_generators, lie_closure,
    DEFAULT_MAX_DEPTH, DEFAULT_TOLERANCE,
};
use blochball_core::dynamics::{
    default_sample_dt, propagate_with, semigroup_spectrum, steady_state_sweep,
    PropagationOptions, PROPAGATION_TOLERANCE, SPECTRUM_TOLERANCE,
};
use blochball_core::liouville::control_superoperators;
use blochball_core::{build_dissipator, steady_state, support_overlap, to_affine, total_generator, Error};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output;

/// Environment variable supplying the default tolerance when neither the
/// command line nor the config sets one.
pub const TOLERANCE_ENV: &str = "BLOCHBALL_TOL";

/// Flag > config > environment > built-in default.
fn resolve_tolerance(flag: Option<f64>, config: Option<f64>, default: f64) -> Result<f64, CliError> {
    let env = match std::env::var(TOLERANCE_ENV) {
        Ok(text) => Some(text.trim().parse::<f64>().map_err(|_| {
            CliError::Config(format!("{TOLERANCE_ENV}={text:?} is not a number"))
        })?),
        Err(_) => None,
    };
    let tol = flag.or(config).or(env).unwrap_or(default);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Config(format!("tolerance {tol} must be positive and finite")));
    }
    Ok(tol)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}"))),
    }
}

pub fn simulate(
    config: &Path,
    out: Option<&Path>,
    sample_dt: Option<f64>,
    tol: Option<f64>,
) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let model = cfg.build()?;
    let sample_dt = match sample_dt.or(cfg.run.sample_dt) {
        Some(dt) => dt,
        None => default_sample_dt(&model.system, &model.dissipation, &model.field)?,
    };
    let opts = PropagationOptions {
        sample_dt,
        state_tolerance: resolve_tolerance(tol, cfg.run.tolerance, PROPAGATION_TOLERANCE)?,
    };
    let traj = propagate_with(&model.system, &model.dissipation, &model.field, &model.initial, &opts)?;
    let table = output::trajectory_csv(&traj, model.system.dim(), cfg.run.outputs.density);
    write_output(out, &table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub levels: usize,
    pub controls: usize,
    pub tolerance: f64,
    pub overlap: OverlapSection,
    pub hamiltonian_algebra: AlgebraSection,
    pub affine_algebra: AffineAlgebraSection,
    pub translation_norm: f64,
    pub quasi_spin: bool,
    /// `max_{k<n} (Lambda_k + Lambda_n)/2 - Gamma_kn`; positive values let
    /// states leave the ball.
    pub decay_bound_shortfall: f64,
    /// Spectrum of the field-free generator.
    pub spectrum: SpectrumSection,
    pub steady_state: SteadyStateSection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapSection {
    /// 1-based Liouville `(row, column)` positions.
    pub pairs: Vec<(usize, usize)>,
    pub control_support: usize,
    pub dissipator_support: usize,
    pub cancellation_infeasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraSection {
    pub dim: usize,
    pub closure_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineAlgebraSection {
    pub dim: usize,
    pub homogeneous_dim: usize,
    pub translation_dim: usize,
    pub translation_rank: usize,
    pub closure_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSection {
    /// `[re, im]`, by decreasing real part.
    pub eigenvalues: Vec<[f64; 2]>,
    pub spectral_abscissa: f64,
    pub bounded: bool,
    pub backward_unbounded: bool,
    pub zero_modes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SteadyStateSection {
    Unique { coherence: Vec<f64>, norm: f64 },
    NotUnique { nullity: usize },
}

pub fn analysis(cfg: &RunConfig, tol: f64) -> Result<AnalysisReport, CliError> {
    let model = cfg.build()?;
    let (sys, spec) = (&model.system, &model.dissipation);

    let dissipator = build_dissipator(spec);
    let overlap = support_overlap(&control_superoperators(sys)?, &dissipator, tol)?;

    let hamiltonian = lie_closure(&hamiltonian_generators(sys), tol, DEFAULT_MAX_DEPTH)?;
    let affine = lie_closure(&dissipative_generators(sys, spec)?, tol, DEFAULT_MAX_DEPTH)?;
    let split = decompose_inhomogeneous(&affine)?;

    let zero = vec![0.0; sys.num_controls()];
    let generator = total_generator(sys, spec, &zero)?;
    let spectrum = semigroup_spectrum(&generator, SPECTRUM_TOLERANCE)?;

    let steady_state = match steady_state(sys, spec, &zero) {
        Ok(v) => SteadyStateSection::Unique {
            coherence: v.bloch().iter().copied().collect(),
            norm: v.norm(),
        },
        Err(Error::NonUniqueEquilibrium { nullity }) => SteadyStateSection::NotUnique { nullity },
        Err(e) => return Err(e.into()),
    };

    Ok(AnalysisReport {
        levels: sys.dim(),
        controls: sys.num_controls(),
        tolerance: tol,
        overlap: OverlapSection {
            pairs: overlap.pairs.iter().map(|&(i, j)| (i + 1, j + 1)).collect(),
            control_support: overlap.control_support,
            dissipator_support: overlap.dissipator_support,
            cancellation_infeasible: overlap.cancellation_infeasible(),
        },
        hamiltonian_algebra: AlgebraSection {
            dim: hamiltonian.dim(),
            closure_residual: hamiltonian.closure_residual(),
        },
        affine_algebra: AffineAlgebraSection {
            dim: affine.dim(),
            homogeneous_dim: split.homogeneous_dim,
            translation_dim: split.translation_dim,
            translation_rank: split.translation_rank,
            closure_residual: affine.closure_residual(),
        },
        translation_norm: to_affine(&dissipator)?.translation().norm(),
        quasi_spin: spec.is_quasi_spin(),
        decay_bound_shortfall: spec.decay_bound_shortfall(),
        spectrum: SpectrumSection {
            eigenvalues: spectrum.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
            spectral_abscissa: spectrum.spectral_abscissa,
            bounded: spectrum.bounded(),
            backward_unbounded: spectrum.backward_unbounded(),
            zero_modes: spectrum.zero_modes,
        },
        steady_state,
    })
}

pub fn render_report(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "levels: {}  controls: {}  tolerance: {:e}", r.levels, r.controls, r.tolerance);
    let o = &r.overlap;
    if o.pairs.is_empty() {
        let _ = writeln!(
            s,
            "support overlap: empty (controls {}, dissipator {} entries){}",
            o.control_support,
            o.dissipator_support,
            if o.cancellation_infeasible { ", cancellation infeasible" } else { "" }
        );
    } else {
        let _ = writeln!(s, "support overlap: {} shared entries {:?}", o.pairs.len(), o.pairs);
    }
    let _ = writeln!(s, "hamiltonian algebra: dim {}", r.hamiltonian_algebra.dim);
    let a = &r.affine_algebra;
    let _ = writeln!(
        s,
        "affine closure: dim {} split ({}, {}), translation rank {}",
        a.dim, a.homogeneous_dim, a.translation_dim, a.translation_rank
    );
    let _ = writeln!(
        s,
        "dissipator translation: |b| = {:e}{}",
        r.translation_norm,
        if r.quasi_spin { " (quasi-spin rates)" } else { "" }
    );
    let _ = writeln!(
        s,
        "decay bound shortfall: {:e} ({})",
        r.decay_bound_shortfall,
        if r.decay_bound_shortfall <= 0.0 { "physical" } else { "states may leave the ball" }
    );
    let sp = &r.spectrum;
    let _ = writeln!(
        s,
        "spectrum (f = 0): abscissa {:e}, {}, {} zero mode(s){}",
        sp.spectral_abscissa,
        if sp.bounded { "nonpositive" } else { "UNBOUNDED" },
        sp.zero_modes,
        if sp.backward_unbounded { ", forward semigroup only" } else { "" }
    );
    match &r.steady_state {
        SteadyStateSection::Unique { coherence, norm } => {
            let comps: Vec<String> = coherence.iter().map(|x| output::number(*x)).collect();
            let _ = writeln!(s, "steady state (f = 0): [{}], norm {}", comps.join(", "), output::number(*norm));
        }
        SteadyStateSection::NotUnique { nullity } => {
            let _ = writeln!(s, "steady state (f = 0): not unique (nullity {nullity})");
        }
    }
    s
}

pub fn analyze(config: &Path, out: Option<&Path>, tol: Option<f64>) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let tol = resolve_tolerance(tol, cfg.run.tolerance, DEFAULT_TOLERANCE)?;
    let report = analysis(&cfg, tol)?;
    if let Some(path) = out {
        let mut json = serde_json::to_string_pretty(&report).expect("reports always serialize");
        json.push('\n');
        write_output(Some(path), &json)?;
    }
    print!("{}", render_report(&report));
    Ok(())
}

pub fn sweep(
    config: &Path,
    out: Option<&Path>,
    control: Option<usize>,
    amplitudes: Option<Vec<f64>>,
) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let model = cfg.build()?;
    let from_config = cfg.sweep_settings();
    let control = match (control, &from_config) {
        (Some(c), _) => c.wrapping_sub(1),
        (None, Some((c, _))) => *c,
        (None, None) => return Err(CliError::Config("no sweep control given".into())),
    };
    let amplitudes = match (amplitudes, from_config) {
        (Some(a), _) => a,
        (None, Some((_, a))) => a,
        (None, None) => return Err(CliError::Config("no sweep amplitudes given".into())),
    };
    let report = steady_state_sweep(&model.system, &model.dissipation, control, &amplitudes)?;
    let table = output::sweep_csv(&report, model.system.dim());
    let summary = output::conic_summary(&report);
    match out {
        Some(_) => {
            write_output(out, &table)?;
            print!("{summary}");
        }
        None => {
            write_output(None, &table)?;
            eprint!("{summary}");
        }
    }
    Ok(())
}
