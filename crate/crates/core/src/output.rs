//! CSV writers. Floating-point fields carry 17 significant digits.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::dynamics::Trajectory;
use crate::invariants::Invariant;
use crate::systems::{PotentialCurveRow, SystemSpec};
use crate::verify::CheckRow;

pub const TRAJECTORY_HEADER: &str = "t,r,phi,p_r,p_phi";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `φ` wrapped into one period of the configuration space, `[0, 2πq)` for `m = p/q`.
pub fn output_phi(phi: f64, spec: &SystemSpec) -> f64 {
    phi.rem_euclid(2.0 * PI * spec.index().den() as f64)
}

/// One row per accepted step, followed by the invariant columns for the
/// system kind when `with_invariants` is set. Failed evaluations print `NaN`.
pub fn write_trajectory_csv<W: Write>(
    mut w: W,
    trajectory: &Trajectory,
    spec: &SystemSpec,
    with_invariants: bool,
) -> io::Result<()> {
    let columns: &[Invariant] = if with_invariants {
        Invariant::columns_for(spec.kind)
    } else {
        &[]
    };
    write!(w, "{TRAJECTORY_HEADER}")?;
    for c in columns {
        write!(w, ",{}", c.name())?;
    }
    writeln!(w)?;
    for (t, s) in trajectory.times.iter().zip(&trajectory.states) {
        write!(
            w,
            "{},{},{},{},{}",
            num(*t),
            num(s.r),
            num(output_phi(s.phi, spec)),
            num(s.p_r),
            num(s.p_phi)
        )?;
        for c in columns {
            write!(w, ",{}", num(c.evaluate(s, spec).unwrap_or(f64::NAN)))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_check_csv<W: Write>(mut w: W, rows: &[CheckRow]) -> io::Result<()> {
    writeln!(w, "check,name,value,threshold,pass")?;
    for r in rows {
        writeln!(
            w,
            "{},\"{}\",{},{},{}",
            r.check,
            r.name.replace('"', "'"),
            num(r.value),
            num(r.threshold),
            r.pass
        )?;
    }
    Ok(())
}

/// Human-readable one-line-per-check summary.
pub fn write_check_summary<W: Write>(mut w: W, rows: &[CheckRow]) -> io::Result<()> {
    for r in rows {
        writeln!(
            w,
            "[{}] {:<16} {:<48} {:>12.3e} (threshold {:.1e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.check,
            r.name,
            r.value,
            r.threshold
        )?;
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    writeln!(w, "{} checks, {} failed", rows.len(), failed)
}

pub fn write_potential_curve_csv<W: Write>(mut w: W, rows: &[PotentialCurveRow]) -> io::Result<()> {
    writeln!(w, "r,U_1,U_0,U_-1")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{}",
            num(row.r),
            num(row.sphere),
            num(row.plane),
            num(row.hyperbolic)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorConfig};
    use crate::kappa_trig::Curvature;
    use crate::systems::{AngularIndex, PhaseState};

    #[test]
    fn trajectory_csv_layout() {
        let spec = SystemSpec::pw(Curvature::UNIT_SPHERE, 1.0, 0.8, 0.3, AngularIndex::new(2, 1).unwrap()).unwrap();
        let traj = integrate(
            PhaseState::new(1.0, 0.7, 0.1, 0.2),
            &spec,
            1.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj, &spec, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,r,phi,p_r,p_phi,H,J2,K_re,K_im");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 9);
        assert_eq!(first[1], "1.0000000000000000e0");
        // 17 significant digits round-trip exactly.
        for (field, v) in first[1..5].iter().zip(traj.states[0].to_array()) {
            assert_eq!(field.parse::<f64>().unwrap(), v);
        }
        assert_eq!(text.lines().count(), traj.len() + 1);
    }

    #[test]
    fn phi_is_wrapped_on_output_only() {
        let spec = SystemSpec::kepler(Curvature::FLAT, 1.0).unwrap();
        assert!((output_phi(7.0, &spec) - (7.0 - 2.0 * PI)).abs() < 1e-15);
        let half = SystemSpec::pw(Curvature::FLAT, 1.0, 0.8, 0.3, AngularIndex::new(1, 2).unwrap()).unwrap();
        assert_eq!(output_phi(7.0, &half), 7.0);
    }

    #[test]
    fn check_csv() {
        let rows = vec![
            CheckRow::new("drift", "H", 1e-12, 1e-8),
            CheckRow::new("drift", "J2", 1.0, 1e-8),
        ];
        let mut buf = Vec::new();
        write_check_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("check,name,value,threshold,pass\n"));
        assert!(text.lines().nth(1).unwrap().ends_with(",true"));
        assert!(text.lines().nth(2).unwrap().ends_with(",false"));
    }
}
