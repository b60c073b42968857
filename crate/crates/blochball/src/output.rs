//! Comma-separated tables: one header row, 17 significant digits, LF endings.

use std::fmt::Write as _;

use blochball_core::dynamics::SweepReport;
use blochball_core::Trajectory;

/// Seventeen significant digits, enough to round-trip every `f64`.
pub fn number(x: f64) -> String {
    // Adding zero folds -0.0 into 0.0.
    format!("{:.16e}", x + 0.0)
}

fn push_row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let mut first = true;
    for cell in cells {
        if !first {
            out.push(',');
        }
        out.push_str(&cell);
        first = false;
    }
    out.push('\n');
}

/// Names of the coherence-vector columns: `x,y,z` for a qubit, `v1..vK`
/// otherwise.
pub fn coherence_columns(dim: usize) -> Vec<String> {
    if dim == 2 {
        ["x", "y", "z"].map(String::from).to_vec()
    } else {
        (1..dim * dim).map(|k| format!("v{k}")).collect()
    }
}

pub fn trajectory_csv(traj: &Trajectory, dim: usize, density: bool) -> String {
    let mut header = vec!["time".to_string()];
    header.extend(coherence_columns(dim));
    header.push("trace_part".into());
    header.push("purity".into());
    if density {
        for i in 1..=dim {
            for j in 1..=dim {
                header.push(format!("rho_{i}{j}_re"));
                header.push(format!("rho_{i}{j}_im"));
            }
        }
    }
    let mut out = String::new();
    push_row(&mut out, header);
    for (k, (&t, v)) in traj.times().iter().zip(traj.states()).enumerate() {
        let mut row = vec![number(t)];
        row.extend(v.bloch().iter().map(|&x| number(x)));
        row.push(number(v.trace_part()));
        row.push(number(v.purity()));
        if density {
            // Row-major, matching the header.
            let rho = traj.density_at(k);
            for i in 0..dim {
                for j in 0..dim {
                    row.push(number(rho[(i, j)].re));
                    row.push(number(rho[(i, j)].im));
                }
            }
        }
        push_row(&mut out, row);
    }
    out
}

pub fn sweep_csv(report: &SweepReport, dim: usize) -> String {
    let mut header = vec!["amplitude".to_string()];
    header.extend(coherence_columns(dim));
    header.push("norm".into());
    let mut out = String::new();
    push_row(&mut out, header);
    for (&amp, v) in report.amplitudes.iter().zip(&report.points) {
        let mut row = vec![number(amp)];
        row.extend(v.bloch().iter().map(|&x| number(x)));
        row.push(number(v.norm()));
        push_row(&mut out, row);
    }
    out
}

pub fn conic_summary(report: &SweepReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "control: {}", report.control_index + 1);
    let _ = writeln!(out, "points: {}", report.points.len());
    let _ = writeln!(out, "max_norm: {}", number(report.max_norm));
    let _ = writeln!(out, "strictly_inside: {}", report.strictly_inside());
    match &report.conic {
        None => {
            let _ = writeln!(out, "conic: degenerate (equilibria do not span a plane)");
        }
        Some(fit) => {
            let _ = writeln!(out, "conic: {}", format!("{:?}", fit.kind).to_lowercase());
            let coeffs: Vec<String> = fit.coefficients.iter().map(|&x| number(x)).collect();
            let _ = writeln!(out, "coefficients: {}", coeffs.join(","));
            let _ = writeln!(out, "residual: {}", number(fit.residual));
            let _ = writeln!(out, "discriminant: {}", number(fit.discriminant));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use blochball_core::CoherenceVector;

    #[test]
    fn numbers_carry_seventeen_digits() {
        assert_eq!(number(0.1), "1.0000000000000001e-1");
        assert_eq!(number(-2.0), "-2.0000000000000000e0");
        assert_eq!(number(-0.0), number(0.0));
        for x in [0.1, 1.0 / 3.0, -7.25e-300, 6.02e23] {
            assert_eq!(number(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn trajectory_table_layout() {
        let traj = Trajectory::new(
            vec![0.0, 0.5],
            vec![CoherenceVector::qubit(0.0, 0.0, 1.0), CoherenceVector::qubit(0.0, 0.0, 0.5)],
        )
        .unwrap();
        let csv = trajectory_csv(&traj, 2, true);
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "");
        assert!(lines[0].starts_with("time,x,y,z,trace_part,purity,rho_11_re,rho_11_im"));
        assert_eq!(lines[1].split(',').count(), lines[0].split(',').count());
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn generic_columns() {
        assert_eq!(coherence_columns(3).len(), 8);
        assert_eq!(coherence_columns(3)[7], "v8");
    }
}
