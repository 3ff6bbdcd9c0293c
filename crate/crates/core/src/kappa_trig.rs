//! Curvature-dependent trigonometry.
//!
//! `Cos_κ`, `Sin_κ` and `Tan_κ` interpolate between the circular functions on
//! the sphere (κ > 0), the identity/unit functions on the plane (κ = 0) and
//! the hyperbolic functions on the Lobachevsky plane (κ < 0). Every formula in
//! the crate is written once in terms of these and stays valid for all κ.
//!
//! When `|κ|·x²` is tiny the closed forms lose accuracy (`sin(√κ x)/√κ` is a
//! 0/0 at κ = 0), so a short Taylor series is used instead.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

/// Below this value of `|κ|·x²` the truncated series is used.
pub const SERIES_THRESHOLD: f64 = 1e-8;

/// `|Cos_κ|` or `|Sin_κ|` smaller than this is treated as an exact zero.
pub const POLE_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TrigError {
    #[error("non-finite argument {value} to {function}")]
    Domain { function: &'static str, value: f64 },
    #[error("{function} has a pole at x = {x} (kappa = {kappa})")]
    Pole { function: &'static str, kappa: f64, x: f64 },
}

/// Gaussian curvature of the configuration space.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Curvature(f64);

impl Curvature {
    pub const FLAT: Curvature = Curvature(0.0);
    pub const UNIT_SPHERE: Curvature = Curvature(1.0);
    pub const UNIT_HYPERBOLIC: Curvature = Curvature(-1.0);

    pub fn new(kappa: f64) -> Result<Self, TrigError> {
        if kappa.is_finite() {
            Ok(Curvature(kappa))
        } else {
            Err(TrigError::Domain {
                function: "Curvature::new",
                value: kappa,
            })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    fn series(self, x: f64) -> bool {
        (self.0 * x * x).abs() < SERIES_THRESHOLD
    }

    /// `Cos_κ(x)` without argument validation.
    #[inline]
    pub fn cos(self, x: f64) -> f64 {
        let k = self.0;
        if self.series(x) {
            let t = k * x * x;
            1.0 - t / 2.0 + t * t / 24.0
        } else if k > 0.0 {
            (k.sqrt() * x).cos()
        } else {
            ((-k).sqrt() * x).cosh()
        }
    }

    /// `Sin_κ(x)` without argument validation.
    #[inline]
    pub fn sin(self, x: f64) -> f64 {
        let k = self.0;
        if self.series(x) {
            let t = k * x * x;
            x * (1.0 - t / 6.0 + t * t / 120.0)
        } else if k > 0.0 {
            let s = k.sqrt();
            (s * x).sin() / s
        } else {
            let s = (-k).sqrt();
            (s * x).sinh() / s
        }
    }

    /// `Tan_κ(x)` without pole checks; infinite or huge at a pole.
    #[inline]
    pub fn tan(self, x: f64) -> f64 {
        let k = self.0;
        if self.series(x) {
            let t = k * x * x;
            x * (1.0 + t / 3.0 + 2.0 * t * t / 15.0)
        } else if k > 0.0 {
            let s = k.sqrt();
            (s * x).tan() / s
        } else {
            let s = (-k).sqrt();
            (s * x).tanh() / s
        }
    }

    /// `1 / Tan_κ(x) = Cos_κ(x) / Sin_κ(x)`, finite wherever `Sin_κ(x) ≠ 0`.
    #[inline]
    pub fn cot(self, x: f64) -> f64 {
        let k = self.0;
        if !self.series(x) && k < 0.0 {
            let s = (-k).sqrt();
            s / (s * x).tanh()
        } else {
            self.cos(x) / self.sin(x)
        }
    }

    /// Allowed range of the geodesic radius.
    pub fn r_domain(self) -> RadialDomain {
        if self.0 > 0.0 {
            RadialDomain {
                upper: Some(PI / self.0.sqrt()),
            }
        } else {
            RadialDomain { upper: None }
        }
    }
}

impl fmt::Display for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<Curvature> for f64 {
    fn from(k: Curvature) -> f64 {
        k.0
    }
}

/// Half-open interval `[0, upper)`; `upper = None` means unbounded.
///
/// On the sphere the antipode `π/√κ` is excluded: `Sin_κ` vanishes there and
/// every `1/Sin_κ²` term diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDomain {
    pub upper: Option<f64>,
}

impl RadialDomain {
    pub fn lower(&self) -> f64 {
        0.0
    }

    pub fn upper_or_inf(&self) -> f64 {
        self.upper.unwrap_or(f64::INFINITY)
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= 0.0 && self.upper.map_or(r.is_finite(), |u| r < u)
    }

    /// Strictly inside `(0, upper)`.
    pub fn interior(&self, r: f64) -> bool {
        r > 0.0 && self.contains(r)
    }
}

fn finite(function: &'static str, x: f64) -> Result<f64, TrigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(TrigError::Domain { function, value: x })
    }
}

pub fn cos_k(kappa: Curvature, x: f64) -> Result<f64, TrigError> {
    finite("cos_k", x).map(|x| kappa.cos(x))
}

pub fn sin_k(kappa: Curvature, x: f64) -> Result<f64, TrigError> {
    finite("sin_k", x).map(|x| kappa.sin(x))
}

/// `Sin_κ(x) / Cos_κ(x)`; fails where `Cos_κ` vanishes (only possible for κ > 0).
pub fn tan_k(kappa: Curvature, x: f64) -> Result<f64, TrigError> {
    let x = finite("tan_k", x)?;
    if kappa.cos(x).abs() < POLE_EPS {
        return Err(TrigError::Pole {
            function: "tan_k",
            kappa: kappa.value(),
            x,
        });
    }
    Ok(kappa.tan(x))
}

/// `Cos_κ(x) / Sin_κ(x)`; fails where `Sin_κ` vanishes.
pub fn cot_k(kappa: Curvature, x: f64) -> Result<f64, TrigError> {
    let x = finite("cot_k", x)?;
    if kappa.sin(x).abs() < POLE_EPS {
        return Err(TrigError::Pole {
            function: "cot_k",
            kappa: kappa.value(),
            x,
        });
    }
    Ok(kappa.cot(x))
}

pub fn r_domain(kappa: Curvature) -> RadialDomain {
    kappa.r_domain()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    #[test]
    fn flat_branch() {
        assert_eq!(cos_k(k(0.0), 7.3).unwrap(), 1.0);
        assert_eq!(sin_k(k(0.0), 2.5).unwrap(), 2.5);
        assert_eq!(tan_k(k(0.0), 3.0).unwrap(), 3.0);
    }

    #[test]
    fn sphere_branch() {
        assert_relative_eq!(cos_k(k(1.0), PI).unwrap(), -1.0, epsilon = 1e-15);
        assert_relative_eq!(sin_k(k(1.0), PI / 2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(sin_k(k(4.0), PI / 4.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(tan_k(k(1.0), PI / 4.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn hyperbolic_branch() {
        assert_eq!(cos_k(k(-1.0), 0.0).unwrap(), 1.0);
        assert_relative_eq!(tan_k(k(-1.0), 40.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(cot_k(k(-1.0), 50.0).unwrap(), 1.0, epsilon = 0.0);
    }

    #[test]
    fn tan_pole_is_reported() {
        match tan_k(k(1.0), PI / 2.0) {
            Err(TrigError::Pole { x, kappa, .. }) => {
                assert_eq!(x, PI / 2.0);
                assert_eq!(kappa, 1.0);
            }
            other => panic!("expected pole, got {other:?}"),
        }
        assert!(cot_k(k(-1.0), 0.0).is_err());
        // The equator is not a pole of the cotangent.
        assert!(cot_k(k(1.0), PI / 2.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Curvature::new(f64::NAN).is_err());
        assert!(sin_k(k(1.0), f64::INFINITY).is_err());
        assert!(cos_k(k(1.0), f64::NAN).is_err());
        assert!(matches!(
            tan_k(k(-2.0), f64::NEG_INFINITY),
            Err(TrigError::Domain { .. })
        ));
    }

    #[test]
    fn domains() {
        assert_relative_eq!(r_domain(k(1.0)).upper.unwrap(), PI);
        assert_relative_eq!(r_domain(k(4.0)).upper.unwrap(), PI / 2.0);
        assert_eq!(r_domain(k(0.0)).upper, None);
        assert_eq!(r_domain(k(-3.0)).upper, None);
        let d = r_domain(k(1.0));
        assert!(d.contains(0.0) && !d.contains(PI) && !d.interior(0.0));
    }

    #[test]
    fn near_zero_curvature_is_continuous() {
        for i in 0..=100 {
            let x = i as f64 * 0.1;
            for kv in [1e-10, -1e-10] {
                let c = k(kv);
                let z = Curvature::FLAT;
                for (a, b) in [(c.sin(x), z.sin(x)), (c.cos(x), z.cos(x)), (c.tan(x), z.tan(x))] {
                    assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "x={x} k={kv}");
                }
            }
        }
    }

    #[test]
    fn series_switch_is_seamless() {
        // Straddle |κ|x² = SERIES_THRESHOLD from both sides.
        let x = 1.0;
        for kv in [SERIES_THRESHOLD * 0.999, SERIES_THRESHOLD * 1.001] {
            for s in [1.0, -1.0] {
                let c = k(s * kv);
                let exact_sin = if s > 0.0 {
                    (kv.sqrt() * x).sin() / kv.sqrt()
                } else {
                    (kv.sqrt() * x).sinh() / kv.sqrt()
                };
                assert_relative_eq!(c.sin(x), exact_sin, max_relative = 1e-15);
            }
        }
    }

    proptest! {
        #[test]
        fn pythagorean_identity(kv in -4.0f64..4.0, x in -3.0f64..3.0) {
            let c = k(kv);
            let lhs = c.cos(x).powi(2) + kv * c.sin(x).powi(2);
            let scale = c.cos(x).powi(2) + (kv * c.sin(x).powi(2)).abs();
            prop_assert!((lhs - 1.0).abs() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn derivative_identities(kv in -2.0f64..2.0, x in -2.0f64..2.0) {
            let c = k(kv);
            let h = 1e-5;
            let dsin = (c.sin(x + h) - c.sin(x - h)) / (2.0 * h);
            let dcos = (c.cos(x + h) - c.cos(x - h)) / (2.0 * h);
            prop_assert!((dsin - c.cos(x)).abs() < 1e-6);
            prop_assert!((dcos + kv * c.sin(x)).abs() < 1e-6);
        }

        #[test]
        fn parity(kv in -2.0f64..2.0, x in 0.0f64..2.0) {
            let c = k(kv);
            prop_assert_eq!(c.cos(x), c.cos(-x));
            prop_assert_eq!(c.sin(x), -c.sin(-x));
        }

        #[test]
        fn scaling_law(kv in 0.01f64..9.0, x in 0.0f64..1.0) {
            let s = kv.sqrt();
            let lhs = k(kv).sin(x);
            let rhs = Curvature::UNIT_SPHERE.sin(s * x) / s;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
        }

        #[test]
        fn cot_is_reciprocal_tan(kv in -2.0f64..2.0, x in 0.05f64..1.0) {
            let c = k(kv);
            prop_assert!((c.cot(x) * c.tan(x) - 1.0).abs() < 1e-13);
        }
    }
}
