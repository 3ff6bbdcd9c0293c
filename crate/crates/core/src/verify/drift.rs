use crate::dynamics::Trajectory;
use crate::invariants::Invariant;
use crate::systems::{PhaseState, SystemError, SystemSpec};

use super::{CheckRow, VerifyError};

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub name: String,
    pub initial: f64,
    pub max_deviation: f64,
    /// `max_deviation / (1 + |initial|)`.
    pub relative_drift: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl DriftReport {
    pub fn to_row(&self) -> CheckRow {
        CheckRow::new("drift", self.name.clone(), self.relative_drift, self.tolerance)
    }
}

/// Largest deviation of `f(t, state)` from its value at the first sample.
pub fn drift<F>(trajectory: &Trajectory, name: &str, tolerance: f64, f: F) -> Result<DriftReport, VerifyError>
where
    F: Fn(f64, &PhaseState) -> Result<f64, SystemError>,
{
    let (t0, s0) = match (trajectory.times.first(), trajectory.states.first()) {
        (Some(t), Some(s)) => (*t, s),
        _ => return Err(VerifyError::EmptyTrajectory),
    };
    let initial = f(t0, s0)?;
    let mut max_deviation = 0.0f64;
    for (t, s) in trajectory.times.iter().zip(&trajectory.states) {
        let dev = (f(*t, s)? - initial).abs();
        // NaN must not be swallowed by max().
        max_deviation = if dev.is_nan() { f64::NAN } else { max_deviation.max(dev) };
    }
    let relative_drift = max_deviation / (1.0 + initial.abs());
    Ok(DriftReport {
        name: name.to_string(),
        initial,
        max_deviation,
        relative_drift,
        tolerance,
        pass: relative_drift <= tolerance,
    })
}

pub fn invariant_drift(
    trajectory: &Trajectory,
    spec: &SystemSpec,
    invariant: Invariant,
    tolerance: f64,
) -> Result<DriftReport, VerifyError> {
    drift(trajectory, invariant.name(), tolerance, |_, s| {
        invariant.evaluate(s, spec)
    })
}
