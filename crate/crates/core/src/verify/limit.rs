use crate::invariants::{j2, lambda_k, m_r, n_phi, ComplexValue};
use crate::kappa_trig::Curvature;
use crate::systems::{hamiltonian, PhaseState, SystemError, SystemKind, SystemSpec};

use super::{CheckRow, VerifyError};

/// `±10^{-k}` for `k = 4..=12`.
pub const LIMIT_KAPPAS: [f64; 9] = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12];

/// Bound on `|f(±1e−8) − f(0)| / (1 + |f(0)|)`.
pub const LIMIT_TOL_AT_1E8: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSummary {
    pub quantity: &'static str,
    pub flat_value: f64,
    /// `(κ, |f(κ) − f(0)|)` for every scanned curvature.
    pub deviations: Vec<(f64, f64)>,
    /// Worst of `dev(±1e−8) / (1 + |f(0)|)`.
    pub deviation_at_1e8: f64,
    /// `log10(dev(1e−4) / dev(1e−5))`, ≈ 1 for linear convergence; `None`
    /// when the quantity does not depend on κ.
    pub rate: Option<f64>,
    pub linear: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub quantities: Vec<LimitSummary>,
}

impl LimitReport {
    pub fn pass(&self) -> bool {
        self.quantities.iter().all(|q| q.pass)
    }

    pub fn to_rows(&self, label: &str) -> Vec<CheckRow> {
        self.quantities
            .iter()
            .map(|q| {
                let mut row = CheckRow::new(
                    "limit",
                    format!("{label}{}", q.quantity),
                    q.deviation_at_1e8,
                    LIMIT_TOL_AT_1E8,
                );
                row.pass = q.pass;
                row
            })
            .collect()
    }
}

enum Value {
    Real(f64),
    Complex(ComplexValue),
}

impl Value {
    fn distance(&self, other: &Value) -> f64 {
        match (self, other) {
            (Value::Real(a), Value::Real(b)) => (a - b).abs(),
            (Value::Complex(a), Value::Complex(b)) => (*a - *b).norm(),
            _ => f64::NAN,
        }
    }

    fn magnitude(&self) -> f64 {
        match self {
            Value::Real(a) => a.abs(),
            Value::Complex(a) => a.norm(),
        }
    }
}

type Quantity = (&'static str, fn(&PhaseState, &SystemSpec) -> Result<Value, SystemError>);

fn quantities(kind: SystemKind) -> Vec<Quantity> {
    let mut q: Vec<Quantity> = vec![
        ("H", |s, p| hamiltonian(s, p).map(Value::Real)),
        ("J2", |s, p| j2(s, p).map(Value::Real)),
        ("M_r", |s, p| m_r(s, p).map(Value::Complex)),
        ("lambda", |s, p| lambda_k(s, p).map(Value::Real)),
    ];
    if kind != SystemKind::GenericF {
        q.push(("N_phi", |s, p| n_phi(s, p).map(Value::Complex)));
    }
    q
}

/// Evaluate `H`, `J₂`, `M_r`, `N_φ`, `λ_κ` at `κ = ±10^{-k}` and compare with `κ = 0`.
///
/// Convergence is accepted as linear when every deviation satisfies
/// `dev(κ) ≤ 2·(dev(1e−4)/1e−4)·|κ| + 1e−12·(1 + |f(0)|)`.
pub fn euclidean_limit_scan(spec: &SystemSpec, state: &PhaseState) -> Result<LimitReport, VerifyError> {
    let flat = spec.with_kappa(Curvature::FLAT);
    let mut out = Vec::new();
    for (name, f) in quantities(spec.kind) {
        let base = f(state, &flat)?;
        let scale = 1.0 + base.magnitude();
        let mut deviations = Vec::with_capacity(2 * LIMIT_KAPPAS.len());
        for &k in &LIMIT_KAPPAS {
            for sign in [1.0, -1.0] {
                let kappa = Curvature::new(sign * k).map_err(SystemError::from)?;
                let v = f(state, &spec.with_kappa(kappa))?;
                deviations.push((sign * k, v.distance(&base)));
            }
        }
        let dev = |kappa: f64| {
            deviations
                .iter()
                .filter(|(k, _)| (k.abs() - kappa).abs() <= 1e-3 * kappa)
                .map(|(_, d)| *d)
                .fold(0.0, f64::max)
        };
        let floor = 1e-12 * scale;
        let slope = dev(1e-4) / 1e-4;
        let linear = deviations.iter().all(|(k, d)| *d <= 2.0 * slope * k.abs() + floor);
        let rate = if dev(1e-5) > floor {
            Some((dev(1e-4) / dev(1e-5)).log10())
        } else {
            None
        };
        let deviation_at_1e8 = dev(1e-8) / scale;
        out.push(LimitSummary {
            quantity: name,
            flat_value: base.magnitude(),
            deviations,
            deviation_at_1e8,
            rate,
            linear,
            pass: linear && deviation_at_1e8 <= LIMIT_TOL_AT_1E8,
        });
    }
    Ok(LimitReport { quantities: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kappa_trig::Curvature;
    use crate::systems::AngularIndex;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn standard_pw_state_converges_linearly() {
        let spec = SystemSpec::pw(Curvature::UNIT_SPHERE, 1.0, 1.0, 0.0, AngularIndex::ONE).unwrap();
        let s = PhaseState::new(1.0, FRAC_PI_2, 0.0, 1.0);
        let rep = euclidean_limit_scan(&spec, &s).unwrap();
        assert!(rep.pass(), "{rep:#?}");
        let mr = rep.quantities.iter().find(|q| q.quantity == "M_r").unwrap();
        assert!(mr.deviation_at_1e8 * (1.0 + mr.flat_value) <= 1e-7);
        let rate = mr.rate.unwrap();
        assert!((rate - 1.0).abs() < 0.05, "rate {rate}");
        let lam = rep.quantities.iter().find(|q| q.quantity == "lambda").unwrap();
        assert!((lam.flat_value - 3f64.sqrt()).abs() < 1e-15);
        assert!((lam.rate.unwrap() - 1.0).abs() < 0.05);
        // N_φ does not involve κ.
        let n = rep.quantities.iter().find(|q| q.quantity == "N_phi").unwrap();
        assert!(n.deviations.iter().all(|(_, d)| *d == 0.0));
    }

    #[test]
    fn tan_k_converges_linearly() {
        let r = 1.0;
        let dev = |k: f64| (Curvature::new(k).unwrap().tan(r) - r).abs();
        // Tan_κ(r) ≈ r + κ r³/3.
        assert!((dev(1e-4) / 1e-4 - 1.0 / 3.0).abs() < 1e-4);
        assert!((dev(1e-4) / dev(1e-5) - 10.0).abs() < 1e-3);
    }
}
