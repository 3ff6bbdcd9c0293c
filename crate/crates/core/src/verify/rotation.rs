use std::f64::consts::PI;

use crate::dynamics::Trajectory;
use crate::invariants::{lambda_k, m_r, n_phi, ComplexValue};
use crate::systems::{PhaseState, SystemError, SystemKind, SystemSpec};

use super::{CheckRow, VerifyError};

pub const ROTATION_THRESHOLD: f64 = 1e-5;

/// Evaluation points per period of the fastest rotation.
const SAMPLES_PER_PERIOD: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RotationReport {
    pub samples: usize,
    /// `max |dM_r/dt − iλM_r| / (λ_max|M_r|)`, with `λ_max` the fastest rate
    /// along the trajectory. Normalizing by the local `λ` would turn
    /// differentiation noise into failures on escaping orbits where `λ → 0`.
    pub max_m_residual: f64,
    /// Same for `N_φ` with rate `mλ` and scale `mλ_max`; `None` when `N_φ` is undefined.
    pub max_n_residual: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

impl RotationReport {
    pub fn to_rows(&self, label: &str) -> Vec<CheckRow> {
        let mut rows = vec![CheckRow::new(
            "rotation",
            format!("{label}M_r"),
            self.max_m_residual,
            self.threshold,
        )];
        if let Some(n) = self.max_n_residual {
            rows.push(CheckRow::new("rotation", format!("{label}N_phi"), n, self.threshold));
        }
        rows
    }
}

struct Factors {
    lambda: f64,
    m: ComplexValue,
    n: Option<ComplexValue>,
}

fn factors(state: &PhaseState, spec: &SystemSpec) -> Result<Factors, SystemError> {
    Ok(Factors {
        lambda: lambda_k(state, spec)?,
        m: m_r(state, spec)?,
        n: if spec.kind == SystemKind::GenericF {
            None
        } else {
            Some(n_phi(state, spec)?)
        },
    })
}

fn residual(derivative: ComplexValue, value: ComplexValue, rate: f64, scale: f64) -> f64 {
    let expected = value * ComplexValue::new(0.0, rate);
    (derivative - expected).norm() / (scale * value.norm()).max(1e-12)
}

/// Check `dM_r/dt = iλM_r` and `dN_φ/dt = imλN_φ` by differentiating along the trajectory.
pub fn rotation_check(trajectory: &Trajectory, spec: &SystemSpec) -> Result<RotationReport, VerifyError> {
    rotation_check_with(trajectory, spec, 1.0)
}

/// As [`rotation_check`] but with the predicted rate multiplied by `lambda_factor`.
/// `-1.0` is the sign-flip negative control.
pub fn rotation_check_with(
    trajectory: &Trajectory,
    spec: &SystemSpec,
    lambda_factor: f64,
) -> Result<RotationReport, VerifyError> {
    if trajectory.len() < 3 {
        return Err(VerifyError::TooSparse(format!("{} samples", trajectory.len())));
    }
    let m = spec.index().as_f64();
    let fastest = m.max(1.0);
    let mut lambda_max = 0.0f64;
    for s in &trajectory.states {
        lambda_max = lambda_max.max(lambda_k(s, spec)?);
    }
    let period = 2.0 * PI / (fastest * lambda_max);
    let spacing = period / SAMPLES_PER_PERIOD;

    let mut max_m = 0.0f64;
    let mut max_n: Option<f64> = None;
    let mut count = 0;
    let mut record = |f: &Factors, dm: ComplexValue, dn: Option<ComplexValue>| {
        let lam = lambda_factor * f.lambda;
        max_m = max_m.max(residual(dm, f.m, lam, lambda_max));
        if let (Some(n), Some(dn)) = (f.n, dn) {
            let r = residual(dn, n, m * lam, m * lambda_max);
            max_n = Some(max_n.map_or(r, |v| v.max(r)));
        }
        count += 1;
    };

    if trajectory.has_dense_output() {
        // Five-point central differences on the continuous extension.
        let delta = period / 200.0;
        let (t0, t1) = (trajectory.t_start() + 2.0 * delta, trajectory.t_final() - 2.0 * delta);
        if t1 <= t0 {
            return Err(VerifyError::TooSparse("trajectory shorter than the stencil".into()));
        }
        let n_points = ((t1 - t0) / spacing).ceil() as usize + 1;
        for i in 0..n_points {
            let t = (t0 + i as f64 * spacing).min(t1);
            let at = |dt: f64| -> Result<Factors, VerifyError> {
                let s = trajectory.state_at(t + dt).expect("inside span");
                Ok(factors(&s, spec)?)
            };
            let (fm2, fm1, f0, fp1, fp2) = (at(-2.0 * delta)?, at(-delta)?, at(0.0)?, at(delta)?, at(2.0 * delta)?);
            let d = |a: ComplexValue, b: ComplexValue, c: ComplexValue, e: ComplexValue| {
                (a - e + (c - b).scale(8.0)).scale(1.0 / (12.0 * delta))
            };
            let dm = d(fm2.m, fm1.m, fp1.m, fp2.m);
            let dn = match (fm2.n, fm1.n, fp1.n, fp2.n) {
                (Some(a), Some(b), Some(c), Some(e)) => Some(d(a, b, c, e)),
                _ => None,
            };
            record(&f0, dm, dn);
        }
    } else {
        let max_gap = trajectory.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        if max_gap > spacing {
            return Err(VerifyError::TooSparse(format!(
                "sample spacing {max_gap:.3e} exceeds {spacing:.3e} (100 per characteristic period)"
            )));
        }
        let fs: Vec<Factors> = trajectory
            .states
            .iter()
            .map(|s| factors(s, spec))
            .collect::<Result<_, _>>()?;
        let ts = &trajectory.times;
        for i in 1..ts.len() - 1 {
            // Three-point derivative on a non-uniform grid.
            let (h1, h2) = (ts[i] - ts[i - 1], ts[i + 1] - ts[i]);
            let (a, b, c) = (-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2)));
            let comb = |x: ComplexValue, y: ComplexValue, z: ComplexValue| x.scale(a) + y.scale(b) + z.scale(c);
            let dm = comb(fs[i - 1].m, fs[i].m, fs[i + 1].m);
            let dn = match (fs[i - 1].n, fs[i].n, fs[i + 1].n) {
                (Some(x), Some(y), Some(z)) => Some(comb(x, y, z)),
                _ => None,
            };
            record(&fs[i], dm, dn);
        }
    }

    let threshold = ROTATION_THRESHOLD;
    let pass = max_m <= threshold && max_n.is_none_or(|n| n <= threshold);
    Ok(RotationReport {
        samples: count,
        max_m_residual: max_m,
        max_n_residual: max_n,
        threshold,
        pass,
    })
}
