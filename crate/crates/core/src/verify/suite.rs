//! Batch verification: every check appropriate to a system, over seeded
//! random states, collected into report rows.

use rayon::prelude::*;

use crate::dynamics::{integrate, IntegratorConfig, Termination};
use crate::invariants::{j2, k_invariant, m_r, m_r_modulus_sq, n_phi, n_phi_modulus_sq, Invariant};
use crate::kappa_trig::Curvature;
use crate::systems::{hamiltonian, AngularIndex, PhaseState, SystemKind, SystemSpec};

use super::sampling::{random_bounded_state, random_interior_state, seeded_rng};
use super::{
    bracket_with_scale, drift, euclidean_limit_scan, invariant_drift, rotation_check, CheckRow, DEFAULT_BRACKET_STEP,
};

pub const QUADRATIC_DRIFT_TOL: f64 = 1e-8;
pub const K_DRIFT_TOL: f64 = 1e-7;
pub const BRACKET_TOL: f64 = 1e-6;
pub const MODULI_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub t_end: f64,
    pub integrator: IntegratorConfig,
    /// Random initial states integrated per system when no state is given.
    pub trajectories: usize,
    pub bracket_states: usize,
    pub moduli_states: usize,
    pub seed: u64,
    /// Add deliberately broken invariants; the report must then fail.
    pub negative_control: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            t_end: 100.0,
            integrator: IntegratorConfig::default(),
            trajectories: 2,
            bracket_states: 100,
            moduli_states: 1000,
            seed: super::sampling::DEFAULT_SEED,
            negative_control: false,
        }
    }
}

pub fn system_label(spec: &SystemSpec) -> String {
    match spec.kind {
        SystemKind::Pw => format!("{}[kappa={},m={}]", spec.kind, spec.kappa, spec.m),
        _ => format!("{}[kappa={}]", spec.kind, spec.kappa),
    }
}

/// The κ ∈ {−1, 0, 1} × m ∈ {1, 2, 1/2, 3/2} PW grid with `g = 1`, `k_a = 0.8`, `k_b = 0.3`.
pub fn default_pw_grid() -> Vec<SystemSpec> {
    let ms = [(1, 1), (2, 1), (1, 2), (3, 2)];
    [-1.0, 0.0, 1.0]
        .iter()
        .flat_map(|&k| {
            ms.iter().map(move |&(p, q)| {
                SystemSpec::pw(
                    Curvature::new(k).expect("finite"),
                    1.0,
                    0.8,
                    0.3,
                    AngularIndex::new(p, q).expect("positive"),
                )
                .expect("finite parameters")
            })
        })
        .collect()
}

/// Quantities whose drift is checked for a given kind, with tolerances.
fn drift_set(spec: &SystemSpec, casimir_positive: bool) -> Vec<(Invariant, f64)> {
    let mut v = vec![
        (Invariant::H, QUADRATIC_DRIFT_TOL),
        (Invariant::J2, QUADRATIC_DRIFT_TOL),
    ];
    match spec.kind {
        SystemKind::FreeGeodesic | SystemKind::Kepler => {
            v.push((Invariant::I3, QUADRATIC_DRIFT_TOL));
            v.push((Invariant::I4, QUADRATIC_DRIFT_TOL));
        }
        SystemKind::Vc => v.push((Invariant::I3, QUADRATIC_DRIFT_TOL)),
        _ => {}
    }
    if casimir_positive && spec.kind != SystemKind::GenericF {
        v.push((Invariant::KRe, K_DRIFT_TOL));
        v.push((Invariant::KIm, K_DRIFT_TOL));
    }
    v
}

fn trajectory_rows(spec: &SystemSpec, s0: &PhaseState, opts: &SuiteOptions, label: &str) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let traj = match integrate(*s0, spec, opts.t_end, &opts.integrator) {
        Ok(t) => t,
        Err(_) => return vec![CheckRow::failed("integrate", label)],
    };
    if traj.termination != Termination::Completed {
        rows.push(CheckRow::failed(
            "integrate",
            format!("{label}{}", traj.termination.name()),
        ));
        return rows;
    }
    let casimir_positive = matches!(j2(s0, spec), Ok(j) if j > 0.0);
    for (inv, tol) in drift_set(spec, casimir_positive) {
        rows.push(match invariant_drift(&traj, spec, inv, tol) {
            Ok(rep) => {
                let mut row = rep.to_row();
                row.name = format!("{label}{}", inv.name());
                row
            }
            Err(_) => CheckRow::failed("drift", format!("{label}{}", inv.name())),
        });
    }
    if opts.negative_control {
        let corrupt = drift(&traj, "J2+t", QUADRATIC_DRIFT_TOL, |t, s| Ok(j2(s, spec)? + t));
        rows.push(match corrupt {
            Ok(rep) => CheckRow::new(
                "negative-control",
                format!("{label}J2+t"),
                rep.relative_drift,
                rep.tolerance,
            ),
            Err(_) => CheckRow::failed("negative-control", label),
        });
    }
    if casimir_positive && spec.kind != SystemKind::GenericF {
        match rotation_check(&traj, spec) {
            Ok(rep) => rows.extend(rep.to_rows(label)),
            Err(_) => rows.push(CheckRow::failed("rotation", label)),
        }
    }
    rows
}

type PhaseFn<'a> = Box<dyn Fn(&PhaseState) -> Result<f64, crate::systems::SystemError> + Sync + 'a>;

fn bracket_targets(spec: &SystemSpec) -> Vec<(&'static str, PhaseFn<'_>)> {
    let mut v: Vec<(&'static str, PhaseFn<'_>)> = vec![("J2", Box::new(move |s| j2(s, spec)))];
    for inv in [Invariant::I3, Invariant::I4] {
        let applicable = match inv {
            Invariant::I3 => matches!(
                spec.kind,
                SystemKind::Kepler | SystemKind::FreeGeodesic | SystemKind::Vc
            ),
            _ => matches!(spec.kind, SystemKind::Kepler | SystemKind::FreeGeodesic),
        };
        if applicable {
            v.push((inv.name(), Box::new(move |s| inv.evaluate(s, spec))));
        }
    }
    if spec.kind != SystemKind::GenericF {
        v.push(("J3", Box::new(move |s| k_invariant(s, spec).map(|k| k.re))));
        v.push(("J4", Box::new(move |s| k_invariant(s, spec).map(|k| k.im))));
    }
    v
}

/// All checks for one system.
pub fn verify_system(spec: &SystemSpec, initial: Option<PhaseState>, opts: &SuiteOptions) -> Vec<CheckRow> {
    let label = format!("{} ", system_label(spec));
    let mut rng = seeded_rng(opts.seed);
    let mut rows = Vec::new();

    let starts: Vec<PhaseState> = match initial {
        Some(s) => vec![s],
        None => (0..opts.trajectories)
            .filter_map(|_| random_bounded_state(spec, &mut rng).or_else(|| random_interior_state(spec, &mut rng)))
            .collect(),
    };
    if starts.is_empty() {
        rows.push(CheckRow::failed("sampling", label.trim_end()));
        return rows;
    }
    let traj_rows: Vec<Vec<CheckRow>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, s0)| trajectory_rows(spec, s0, opts, &format!("{label}#{i} ")))
        .collect();
    rows.extend(traj_rows.into_iter().flatten());

    let states: Vec<PhaseState> = (0..opts.bracket_states.max(opts.moduli_states))
        .filter_map(|_| random_interior_state(spec, &mut rng))
        .collect();

    let h = |s: &PhaseState| hamiltonian(s, spec);
    for (name, f) in bracket_targets(spec) {
        let worst = states
            .iter()
            .take(opts.bracket_states)
            .map(|s| bracket_with_scale(&f, h, s, DEFAULT_BRACKET_STEP).map(|b| b.relative()))
            .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)));
        rows.push(match worst {
            Ok(v) => CheckRow::new("bracket", format!("{label}{{{name},H}}"), v, BRACKET_TOL),
            Err(_) => CheckRow::failed("bracket", format!("{label}{{{name},H}}")),
        });
    }
    if opts.negative_control {
        let worst = states
            .iter()
            .take(opts.bracket_states)
            .map(|s| bracket_with_scale(|s| Ok(j2(s, spec)? + s.r), h, s, DEFAULT_BRACKET_STEP).map(|b| b.relative()))
            .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)));
        rows.push(match worst {
            Ok(v) => CheckRow::new("negative-control", format!("{label}{{J2+r,H}}"), v, BRACKET_TOL),
            Err(_) => CheckRow::failed("negative-control", label.trim_end()),
        });
    }

    if spec.kind != SystemKind::GenericF {
        let moduli = states
            .iter()
            .take(opts.moduli_states)
            .try_fold((0.0f64, 0.0f64), |(wm, wn), s| {
                let m = m_r(s, spec)?.norm_sqr();
                let n = n_phi(s, spec)?.norm_sqr();
                let dm = (m - m_r_modulus_sq(s, spec)?).abs() / (1.0 + m);
                let dn = (n - n_phi_modulus_sq(s, spec)?).abs() / (1.0 + n);
                Ok::<_, crate::systems::SystemError>((wm.max(dm), wn.max(dn)))
            });
        match moduli {
            Ok((dm, dn)) => {
                rows.push(CheckRow::new("moduli", format!("{label}|M_r|^2"), dm, MODULI_TOL));
                rows.push(CheckRow::new("moduli", format!("{label}|N_phi|^2"), dn, MODULI_TOL));
            }
            Err(_) => rows.push(CheckRow::failed("moduli", label.trim_end())),
        }
    }

    match euclidean_limit_scan(spec, &starts[0]) {
        Ok(rep) => rows.extend(rep.to_rows(&label)),
        Err(_) => rows.push(CheckRow::failed("limit", label.trim_end())),
    }
    rows
}

/// Run [`verify_system`] over many systems concurrently; rows keep the input order.
pub fn verify_grid(specs: &[SystemSpec], opts: &SuiteOptions) -> Vec<CheckRow> {
    specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let opts = SuiteOptions {
                seed: opts.seed.wrapping_add(i as u64),
                ..opts.clone()
            };
            verify_system(spec, None, &opts)
        })
        .flatten_iter()
        .collect()
}
