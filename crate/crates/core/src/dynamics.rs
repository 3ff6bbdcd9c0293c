//! Hamilton's equations and an adaptive Dormand–Prince 8(5,3) integrator.
//!
//! Each accepted step keeps the coefficients of the method's seventh-degree
//! continuous extension, so a [`Trajectory`] can be sampled at any time inside
//! its span. `φ` is never wrapped while integrating.

use thiserror::Error;

use crate::dop853 as tableau;
use crate::systems::{PhaseState, SystemError, SystemSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("initial state is singular: {0}")]
    SingularInitialState(String),
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
}

/// `(dr/dt, dφ/dt, dp_r/dt, dp_φ/dt)` from the canonical equations.
pub fn eom(state: &PhaseState, spec: &SystemSpec) -> Result<[f64; 4], SystemError> {
    let rad = spec.radial(state.r)?;
    let (f, df) = spec.angular(state.phi)?;
    let s2 = rad.sin * rad.sin;
    let s3 = s2 * rad.sin;
    // ∂/∂r of (−g Cos/Sin) is g/Sin²; of F/Sin² is −2F Cos/Sin³.
    let centrifugal = (state.p_phi * state.p_phi + 2.0 * f) * rad.cos / s3;
    Ok([
        state.p_r,
        state.p_phi / s2,
        centrifugal - spec.coupling() / s2,
        -df / s2,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Smallest admissible `Sin_κ(r)` and `|sin(mφ)|`.
    pub singularity_margin: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.1,
            singularity_margin: 1e-6,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorConfig {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |m: String| Err(DynamicsError::InvalidConfig(m));
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return bad(format!("rel_tol = {} must be positive", self.rel_tol));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return bad(format!("abs_tol = {} must be positive", self.abs_tol));
        }
        if self.max_step.is_nan() || self.max_step <= 0.0 {
            return bad(format!("max_step = {} must be positive", self.max_step));
        }
        if !(self.singularity_margin > 0.0 && self.singularity_margin < 1.0) {
            return bad(format!(
                "singularity_margin = {} must lie in (0, 1)",
                self.singularity_margin
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    HitRadialPole,
    HitAngularSingularity,
    StepUnderflow,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::HitRadialPole => "hit-radial-pole",
            Termination::HitAngularSingularity => "hit-angular-singularity",
            Termination::StepUnderflow => "step-underflow",
        }
    }
}

/// Continuous extension over one accepted step `[t0, t0 + h]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    y0: [f64; 4],
    coeffs: [[f64; 4]; 7],
}

impl DenseSegment {
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let x = (t - self.t0) / self.h;
        let c = &self.coeffs;
        std::array::from_fn(|i| {
            // Nested form alternating factors x and 1 − x, innermost coefficient last.
            let mut acc = 0.0;
            for (j, cj) in c.iter().enumerate().rev() {
                acc += cj[i];
                acc *= if j % 2 == 0 { x } else { 1.0 - x };
            }
            self.y0[i] + acc
        })
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub termination: Termination,
    segments: Vec<DenseSegment>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times.first().copied().unwrap_or(0.0)
    }

    pub fn t_final(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn final_state(&self) -> Option<PhaseState> {
        self.states.last().copied()
    }

    pub fn segments(&self) -> &[DenseSegment] {
        &self.segments
    }

    pub fn has_dense_output(&self) -> bool {
        !self.segments.is_empty() && self.segments.len() + 1 == self.times.len()
    }

    /// Interpolated state at `t`, or `None` outside the covered span.
    pub fn state_at(&self, t: f64) -> Option<PhaseState> {
        if self.segments.is_empty() || t < self.t_start() || t > self.t_final() {
            return None;
        }
        let idx = self
            .segments
            .partition_point(|seg| seg.t_end() < t)
            .min(self.segments.len() - 1);
        Some(PhaseState::from_array(self.segments[idx].eval(t)))
    }

    /// Build from samples only; no dense output.
    pub fn from_samples(times: Vec<f64>, states: Vec<PhaseState>, termination: Termination) -> Self {
        Trajectory {
            times,
            states,
            termination,
            segments: Vec::new(),
        }
    }
}

type Vec4 = [f64; 4];

/// Solution coefficients of one step, before the continuous extension is built.
struct Step {
    y1: Vec4,
    k: [Vec4; tableau::STAGES_EXTENDED],
    err: f64,
}

struct Stepper<'a> {
    spec: &'a SystemSpec,
    cfg: IntegratorConfig,
}

impl Stepper<'_> {
    fn f(&self, y: &Vec4) -> Result<Vec4, SystemError> {
        eom(&PhaseState::from_array(*y), self.spec)
    }

    fn stage_input(y: &Vec4, k: &[Vec4], a: &[f64], h: f64) -> Vec4 {
        std::array::from_fn(|i| y[i] + h * a.iter().zip(k).map(|(a, k)| a * k[i]).sum::<f64>())
    }

    fn step(&self, y: &Vec4, k0: &Vec4, h: f64) -> Result<Step, SystemError> {
        let mut k = [[0.0; 4]; tableau::STAGES_EXTENDED];
        k[0] = *k0;
        for s in 1..tableau::STAGES {
            k[s] = self.f(&Self::stage_input(y, &k[..s], tableau::A[s], h))?;
        }
        let y1 = Self::stage_input(y, &k[..tableau::STAGES], &tableau::B, h);
        k[tableau::STAGES] = self.f(&y1)?;

        // Error of the embedded fifth-order solution, in the max norm. Hairer's
        // blended 5th/3rd-order estimate is cheaper but was seen to accept
        // steps with errors far above tolerance near the angular walls.
        let mut err = 0.0f64;
        for i in 0..4 {
            let sc = self.cfg.abs_tol + self.cfg.rel_tol * y[i].abs().max(y1[i].abs());
            let e = tableau::E5.iter().zip(&k).map(|(e, k)| e * k[i]).sum::<f64>();
            err = err.max((h * e / sc).abs());
        }
        if !err.is_finite() || !y1.iter().all(|v| v.is_finite()) {
            err = f64::INFINITY;
        }
        Ok(Step { y1, k, err })
    }

    /// Coefficients of the degree-7 continuous extension of an accepted step.
    fn dense(&self, y: &Vec4, step: &mut Step, h: f64) -> Result<[Vec4; 7], SystemError> {
        for s in tableau::STAGES + 1..tableau::STAGES_EXTENDED {
            step.k[s] = self.f(&Self::stage_input(y, &step.k[..s], tableau::A[s], h))?;
        }
        let (k, y1) = (&step.k, &step.y1);
        let mut c = [[0.0; 4]; 7];
        for i in 0..4 {
            let dy = y1[i] - y[i];
            c[0][i] = dy;
            c[1][i] = h * k[0][i] - dy;
            c[2][i] = 2.0 * dy - h * (k[tableau::STAGES][i] + k[0][i]);
            for (j, d) in tableau::D.iter().enumerate() {
                c[3 + j][i] = h * d.iter().zip(k).map(|(d, k)| d * k[i]).sum::<f64>();
            }
        }
        Ok(c)
    }

    fn initial_step(&self, y: &Vec4, f0: &Vec4, t_end: f64) -> f64 {
        let sc: Vec4 = std::array::from_fn(|i| self.cfg.abs_tol + self.cfg.rel_tol * y[i].abs());
        let norm = |v: &Vec4| (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / 4.0).sqrt();
        let d0 = norm(y);
        let d1 = norm(f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.cfg.max_step).min(t_end);
        let y1 = Self::stage_input(y, &[*f0], &[1.0], h0);
        let Ok(f1) = self.f(&y1) else {
            return h0;
        };
        let diff: Vec4 = std::array::from_fn(|i| f1[i] - f0[i]);
        let d2 = norm(&diff) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dmax).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1).min(self.cfg.max_step).min(t_end)
    }
}

/// Which singular set, if any, `state` is closer to than `margin`.
pub fn margin_violation(state: &PhaseState, spec: &SystemSpec, margin: f64) -> Option<Termination> {
    if !spec.kappa.r_domain().interior(state.r) || spec.kappa.sin(state.r) < margin {
        return Some(Termination::HitRadialPole);
    }
    if spec.has_angular_poles() && spec.index().scale(state.phi).sin().abs() < margin {
        return Some(Termination::HitAngularSingularity);
    }
    None
}

fn termination_for(err: &SystemError) -> Termination {
    match err {
        SystemError::AngularSingularity { .. } => Termination::HitAngularSingularity,
        _ => Termination::HitRadialPole,
    }
}

/// Integrate from `t = 0` to `t_end`.
pub fn integrate(
    state0: PhaseState,
    spec: &SystemSpec,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    cfg.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(DynamicsError::InvalidConfig(format!(
            "t_end = {t_end} must be positive"
        )));
    }
    if !state0.is_finite() {
        return Err(DynamicsError::SingularInitialState(format!(
            "non-finite state {state0:?}"
        )));
    }
    if let Some(tag) = margin_violation(&state0, spec, cfg.singularity_margin) {
        return Err(DynamicsError::SingularInitialState(format!(
            "{state0:?} is within {} of a singularity ({})",
            cfg.singularity_margin,
            tag.name()
        )));
    }

    let stepper = Stepper { spec, cfg: *cfg };
    let mut y = state0.to_array();
    let mut k1 = stepper.f(&y)?;
    let mut t = 0.0;
    let mut h = stepper.initial_step(&y, &k1, t_end);
    let h_min = 1e3 * f64::EPSILON * t_end;

    let mut times = vec![0.0];
    let mut states = vec![state0];
    let mut segments = Vec::new();
    let mut rejected_last = false;

    let termination = loop {
        if t >= t_end {
            break Termination::Completed;
        }
        let remaining = t_end - t;
        // Absorb a sliver of remaining time into this step rather than leaving a tiny final one.
        let last = 1.01 * h >= remaining;
        let h_try = if last { remaining } else { h };

        match stepper.step(&y, &k1, h_try) {
            Err(e) => {
                h = h_try * 0.25;
                rejected_last = true;
                if h < h_min {
                    break termination_for(&e);
                }
            }
            Ok(mut step) if step.err <= 1.0 => {
                let candidate = PhaseState::from_array(step.y1);
                if let Some(tag) = margin_violation(&candidate, spec, cfg.singularity_margin) {
                    h = h_try * 0.5;
                    rejected_last = true;
                    if h < h_min {
                        break tag;
                    }
                    continue;
                }
                let coeffs = match stepper.dense(&y, &mut step, h_try) {
                    Ok(c) => c,
                    Err(e) => {
                        h = h_try * 0.25;
                        rejected_last = true;
                        if h < h_min {
                            break termination_for(&e);
                        }
                        continue;
                    }
                };
                let t_new = if last { t_end } else { t + h_try };
                segments.push(DenseSegment {
                    t0: t,
                    h: t_new - t,
                    y0: y,
                    coeffs,
                });
                t = t_new;
                y = step.y1;
                k1 = step.k[tableau::STAGES];
                times.push(t);
                states.push(candidate);

                let mut fac = (0.9 * step.err.max(1e-10).powf(-1.0 / 6.0)).clamp(1.0 / 3.0, 6.0);
                if rejected_last {
                    fac = fac.min(1.0);
                }
                rejected_last = false;
                h = (h_try * fac).min(cfg.max_step);
            }
            Ok(step) => {
                let fac = (0.9 * step.err.powf(-1.0 / 6.0)).clamp(0.2, 1.0);
                h = h_try * if step.err.is_finite() { fac } else { 0.2 };
                rejected_last = true;
                if h < h_min {
                    break Termination::StepUnderflow;
                }
            }
        }
    };

    Ok(Trajectory {
        times,
        states,
        termination,
        segments,
    })
}
