use std::f64::consts::PI;

use crate::dynamics::Trajectory;
use crate::systems::PhaseState;

use super::VerifyError;

pub const DEFAULT_CLOSURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closure {
    pub period: f64,
    /// Max-norm phase-space distance between `state(T)` and `state(0)`.
    pub mismatch: f64,
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Max-norm distance with `φ` compared modulo 2π.
pub fn phase_distance(a: &PhaseState, b: &PhaseState) -> f64 {
    (a.r - b.r)
        .abs()
        .max(angle_diff(a.phi, b.phi))
        .max((a.p_r - b.p_r).abs())
        .max((a.p_phi - b.p_phi).abs())
}

fn is_bounded(trajectory: &Trajectory) -> bool {
    let (lo, hi) = trajectory
        .states
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), s| (lo.min(s.r), hi.max(s.r)));
    if hi - lo <= 1e-9 * (1.0 + hi) {
        return true;
    }
    // Both an inner and an outer radial turning point must have been seen.
    let sign_changes = trajectory
        .states
        .windows(2)
        .filter(|w| w[0].p_r.signum() != w[1].p_r.signum())
        .count();
    sign_changes >= 2
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-13 * (1.0 + a.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Smallest `T > 0` with `|state(T) − state(0)| < tol`, searched on the dense output.
///
/// `Ok(None)` means no recurrence within the trajectory; unbounded radial
/// motion is reported as [`VerifyError::NotApplicable`].
pub fn closure_detect(trajectory: &Trajectory, tol: f64) -> Result<Option<Closure>, VerifyError> {
    let s0 = *trajectory.states.first().ok_or(VerifyError::EmptyTrajectory)?;
    if !trajectory.has_dense_output() {
        return Err(VerifyError::NotApplicable("closure search needs dense output".into()));
    }
    if !is_bounded(trajectory) {
        return Err(VerifyError::NotApplicable(
            "radial motion is unbounded on this trajectory".into(),
        ));
    }
    let t0 = trajectory.t_start();
    let dist = |t: f64| {
        trajectory
            .state_at(t)
            .map_or(f64::INFINITY, |s| phase_distance(&s, &s0))
    };
    let d: Vec<f64> = trajectory.states.iter().map(|s| phase_distance(s, &s0)).collect();
    let ts = &trajectory.times;
    for i in 1..d.len().saturating_sub(1) {
        if d[i] <= d[i - 1] && d[i] <= d[i + 1] {
            let (t, mismatch) = golden_min(dist, ts[i - 1], ts[i + 1]);
            if mismatch < tol {
                return Ok(Some(Closure {
                    period: t - t0,
                    mismatch,
                }));
            }
        }
    }
    Ok(None)
}
