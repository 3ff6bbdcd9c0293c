//! Numerical checks that are independent of the analytic equations of motion:
//! finite-difference Poisson brackets, drift along trajectories, the rotation
//! laws of the complex factors, orbit closure and the flat-space limit.

mod bracket;
mod closure;
mod drift;
mod limit;
mod rotation;
pub mod sampling;
pub mod suite;

pub use bracket::{bracket_with_scale, poisson_bracket_fd, BracketEstimate, DEFAULT_BRACKET_STEP};
pub use closure::{closure_detect, phase_distance, Closure, DEFAULT_CLOSURE_TOL};
pub use drift::{drift, invariant_drift, DriftReport};
pub use limit::{euclidean_limit_scan, LimitReport, LimitSummary, LIMIT_KAPPAS};
pub use rotation::{rotation_check, rotation_check_with, RotationReport, ROTATION_THRESHOLD};

use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::systems::SystemError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("finite-difference stencil touches a singularity at {coordinate} = {value}: {source}")]
    Stencil {
        coordinate: &'static str,
        value: f64,
        source: SystemError,
    },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("trajectory too sparse: {0}")]
    TooSparse(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(check: impl Into<String>, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckRow {
            check: check.into(),
            name: name.into(),
            value,
            threshold,
            pass: value.is_finite() && value <= threshold,
        }
    }

    /// A row that passes when `value` is strictly above `threshold`.
    pub fn exceeding(check: impl Into<String>, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckRow {
            check: check.into(),
            name: name.into(),
            value,
            threshold,
            pass: value.is_finite() && value > threshold,
        }
    }

    pub fn failed(check: impl Into<String>, name: impl Into<String>) -> Self {
        CheckRow {
            check: check.into(),
            name: name.into(),
            value: f64::NAN,
            threshold: f64::NAN,
            pass: false,
        }
    }
}
