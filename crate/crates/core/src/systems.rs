//! Potentials and Hamiltonians in geodesic polar coordinates.
//!
//! All systems share the separable form
//!
//! ```text
//! H = ½ (p_r² + p_φ² / Sin_κ(r)²) − g / Tan_κ(r) + F(φ) / Sin_κ(r)²
//! ```
//!
//! and differ only in the angular function `F`:
//!
//! | kind           | `g`   | `F(φ)`                                   |
//! |----------------|-------|------------------------------------------|
//! | `FreeGeodesic` | 0     | 0                                        |
//! | `Kepler`       | g     | 0                                        |
//! | `Vc`           | g     | `(k₂ + k₃ cos φ) / sin² φ`               |
//! | `Pw`           | g     | `(k_a + k_b cos mφ) / sin² mφ`           |
//! | `GenericF`     | g     | user supplied                            |
//!
//! The `Pw` angular term carries no ½ prefactor. The Euclidean form
//! `1/(2r²)·(α/cos²(m'φ) + β/sin²(m'φ))` corresponds to `F_{2m'}` with
//! `(k_a, k_b) = reparam_alpha_beta(α/2, β/2)`; see
//! [`SystemSpec::pw_from_alpha_beta`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::kappa_trig::{Curvature, TrigError, POLE_EPS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error(transparent)]
    Trig(#[from] TrigError),
    #[error("radial singularity: r = {r} is not interior to the domain for kappa = {kappa}")]
    RadialPole { r: f64, kappa: f64 },
    #[error("angular singularity: sin(m*phi) = 0 at phi = {phi}")]
    AngularSingularity { phi: f64 },
    #[error("J2 = {j2} is not positive; sqrt(J2) is undefined")]
    NegativeCasimir { j2: f64 },
    #[error("operation requires a {expected} system, got {found}")]
    WrongKind { expected: &'static str, found: SystemKind },
    #[error("exponents {p}/{q} do not match the system index m = {m}")]
    IndexMismatch { p: u32, q: u32, m: AngularIndex },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    FreeGeodesic,
    Kepler,
    Vc,
    Pw,
    GenericF,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::FreeGeodesic => "free",
            SystemKind::Kepler => "kepler",
            SystemKind::Vc => "vc",
            SystemKind::Pw => "pw",
            SystemKind::GenericF => "generic",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = SystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "free" | "freegeodesic" | "free_geodesic" => Ok(SystemKind::FreeGeodesic),
            "kepler" => Ok(SystemKind::Kepler),
            "vc" => Ok(SystemKind::Vc),
            "pw" => Ok(SystemKind::Pw),
            "generic" | "genericf" => Ok(SystemKind::GenericF),
            other => Err(SystemError::InvalidParameter(format!("unknown system kind `{other}`"))),
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The exact rational index `m = p/q` of the angular function, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AngularIndex {
    num: u32,
    den: u32,
}

impl AngularIndex {
    pub const ONE: AngularIndex = AngularIndex { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self, SystemError> {
        if num == 0 || den == 0 {
            return Err(SystemError::InvalidParameter(format!(
                "m = {num}/{den} must have positive numerator and denominator"
            )));
        }
        let d = gcd(num, den);
        Ok(AngularIndex {
            num: num / d,
            den: den / d,
        })
    }

    pub fn integer(m: u32) -> Result<Self, SystemError> {
        Self::new(m, 1)
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `m·φ`.
    #[inline]
    pub fn scale(self, phi: f64) -> f64 {
        if self.den == 1 {
            self.num as f64 * phi
        } else {
            self.num as f64 * phi / self.den as f64
        }
    }
}

impl fmt::Display for AngularIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for AngularIndex {
    type Err = SystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SystemError::InvalidParameter(format!("cannot parse m = `{s}` as p/q"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p = p.parse().map_err(|_| bad())?;
        let q = q.parse().map_err(|_| bad())?;
        AngularIndex::new(p, q)
    }
}

/// A user-supplied angular function `F(φ)` together with its derivative.
pub trait AngularFunction: Send + Sync {
    fn value(&self, phi: f64) -> Result<f64, SystemError>;
    fn derivative(&self, phi: f64) -> Result<f64, SystemError>;
}

impl<F, D> AngularFunction for (F, D)
where
    F: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, phi: f64) -> Result<f64, SystemError> {
        Ok((self.0)(phi))
    }

    fn derivative(&self, phi: f64) -> Result<f64, SystemError> {
        Ok((self.1)(phi))
    }
}

/// Which system, on which space, with which constants.
#[derive(Clone)]
pub struct SystemSpec {
    pub kind: SystemKind,
    pub kappa: Curvature,
    pub g: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub m: AngularIndex,
    generic: Option<Arc<dyn AngularFunction>>,
}

impl fmt::Debug for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemSpec")
            .field("kind", &self.kind)
            .field("kappa", &self.kappa)
            .field("g", &self.g)
            .field("k_a", &self.k_a)
            .field("k_b", &self.k_b)
            .field("m", &self.m)
            .field("generic", &self.generic.as_ref().map(|_| ".."))
            .finish()
    }
}

impl PartialEq for SystemSpec {
    fn eq(&self, other: &Self) -> bool {
        let generic_eq = match (&self.generic, &other.generic) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        };
        self.kind == other.kind
            && self.kappa == other.kappa
            && self.g == other.g
            && self.k_a == other.k_a
            && self.k_b == other.k_b
            && self.m == other.m
            && generic_eq
    }
}

fn check_finite(name: &str, v: f64) -> Result<f64, SystemError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SystemError::InvalidParameter(format!("{name} = {v} is not finite")))
    }
}

impl SystemSpec {
    fn base(kind: SystemKind, kappa: Curvature, g: f64) -> Result<Self, SystemError> {
        Ok(SystemSpec {
            kind,
            kappa,
            g: check_finite("g", g)?,
            k_a: 0.0,
            k_b: 0.0,
            m: AngularIndex::ONE,
            generic: None,
        })
    }

    pub fn free(kappa: Curvature) -> Self {
        Self::base(SystemKind::FreeGeodesic, kappa, 0.0).expect("finite")
    }

    pub fn kepler(kappa: Curvature, g: f64) -> Result<Self, SystemError> {
        Self::base(SystemKind::Kepler, kappa, g)
    }

    /// The curved `V_c` potential with the coefficients `k₂`, `k₃`.
    pub fn vc(kappa: Curvature, g: f64, k2: f64, k3: f64) -> Result<Self, SystemError> {
        let mut s = Self::base(SystemKind::Vc, kappa, g)?;
        s.k_a = check_finite("k2", k2)?;
        s.k_b = check_finite("k3", k3)?;
        Ok(s)
    }

    pub fn pw(kappa: Curvature, g: f64, k_a: f64, k_b: f64, m: AngularIndex) -> Result<Self, SystemError> {
        let mut s = Self::base(SystemKind::Pw, kappa, g)?;
        s.k_a = check_finite("k_a", k_a)?;
        s.k_b = check_finite("k_b", k_b)?;
        s.m = m;
        Ok(s)
    }

    /// PW system written in the Euclidean style
    /// `U = −g/Tan_κ(r) + 1/(2 Sin_κ(r)²)·(α/cos²(m'φ) + β/sin²(m'φ))`.
    ///
    /// The ½ prefactor is folded into the coefficients, giving index `m = 2m'`
    /// and `(k_a, k_b) = (α+β, β−α)`.
    pub fn pw_from_alpha_beta(
        kappa: Curvature,
        g: f64,
        alpha: f64,
        beta: f64,
        half_index: AngularIndex,
    ) -> Result<Self, SystemError> {
        let (k_a, k_b) = reparam_alpha_beta(alpha / 2.0, beta / 2.0);
        let m = AngularIndex::new(2 * half_index.num(), half_index.den())?;
        Self::pw(kappa, g, k_a, k_b, m)
    }

    pub fn generic(kappa: Curvature, g: f64, f: Arc<dyn AngularFunction>) -> Result<Self, SystemError> {
        let mut s = Self::base(SystemKind::GenericF, kappa, g)?;
        s.generic = Some(f);
        Ok(s)
    }

    /// Same system on a space of a different curvature.
    pub fn with_kappa(&self, kappa: Curvature) -> Self {
        SystemSpec { kappa, ..self.clone() }
    }

    /// Kepler coupling actually present in the Hamiltonian.
    #[inline]
    pub fn coupling(&self) -> f64 {
        match self.kind {
            SystemKind::FreeGeodesic => 0.0,
            _ => self.g,
        }
    }

    /// Whether `F` has the `F_m` form with the singular set `sin(mφ) = 0`.
    pub fn has_angular_poles(&self) -> bool {
        matches!(self.kind, SystemKind::Vc | SystemKind::Pw)
    }

    /// The index used by the angular factor `N_φ`. `1` for the central systems.
    pub fn index(&self) -> AngularIndex {
        match self.kind {
            SystemKind::Pw => self.m,
            _ => AngularIndex::ONE,
        }
    }

    /// `(F(φ), F'(φ))`.
    pub fn angular(&self, phi: f64) -> Result<(f64, f64), SystemError> {
        match self.kind {
            SystemKind::FreeGeodesic | SystemKind::Kepler => Ok((0.0, 0.0)),
            SystemKind::Vc | SystemKind::Pw => {
                let m = self.index();
                let (s, c) = m.scale(phi).sin_cos();
                if s.abs() < POLE_EPS {
                    return Err(SystemError::AngularSingularity { phi });
                }
                let s2 = s * s;
                let value = (self.k_a + self.k_b * c) / s2;
                let deriv = -m.as_f64() * (self.k_b * s2 + 2.0 * c * (self.k_a + self.k_b * c)) / (s2 * s);
                Ok((value, deriv))
            }
            SystemKind::GenericF => {
                let f = self
                    .generic
                    .as_ref()
                    .ok_or_else(|| SystemError::InvalidParameter("generic system without angular function".into()))?;
                Ok((f.value(phi)?, f.derivative(phi)?))
            }
        }
    }

    pub fn angular_value(&self, phi: f64) -> Result<f64, SystemError> {
        self.angular(phi).map(|(f, _)| f)
    }

    /// `Sin_κ(r)`, `Cos_κ(r)` and `1/Tan_κ(r)`, checking that `r` is interior.
    pub fn radial(&self, r: f64) -> Result<Radial, SystemError> {
        let pole = || SystemError::RadialPole {
            r,
            kappa: self.kappa.value(),
        };
        if !self.kappa.r_domain().interior(r) {
            return Err(pole());
        }
        let sin = self.kappa.sin(r);
        if sin.abs() < POLE_EPS {
            return Err(pole());
        }
        Ok(Radial {
            sin,
            cos: self.kappa.cos(r),
            cot: self.kappa.cot(r),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Radial {
    pub sin: f64,
    pub cos: f64,
    pub cot: f64,
}

/// A point `(r, φ, p_r, p_φ)` of phase space. `φ` is not wrapped.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseState {
    pub r: f64,
    pub phi: f64,
    pub p_r: f64,
    pub p_phi: f64,
}

impl PhaseState {
    pub const fn new(r: f64, phi: f64, p_r: f64, p_phi: f64) -> Self {
        PhaseState { r, phi, p_r, p_phi }
    }

    /// Build from the Lagrangian velocities `(v_r, v_φ)` via `p_r = v_r`,
    /// `p_φ = Sin_κ(r)² v_φ`.
    pub fn from_velocities(kappa: Curvature, r: f64, phi: f64, v_r: f64, v_phi: f64) -> Self {
        let s = kappa.sin(r);
        PhaseState::new(r, phi, v_r, s * s * v_phi)
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.r, self.phi, self.p_r, self.p_phi]
    }

    #[inline]
    pub fn from_array(a: [f64; 4]) -> Self {
        PhaseState::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Same position, momenta reversed.
    pub fn reversed(self) -> Self {
        PhaseState::new(self.r, self.phi, -self.p_r, -self.p_phi)
    }

    /// `φ` wrapped into `[0, 2π)`.
    pub fn wrapped_phi(&self) -> f64 {
        self.phi.rem_euclid(2.0 * PI)
    }
}

/// `F_m(φ) = k_a / sin²(mφ) + k_b cos(mφ) / sin²(mφ)`.
pub fn angular_f_m(phi: f64, k_a: f64, k_b: f64, m: AngularIndex) -> Result<f64, SystemError> {
    let x = m.scale(phi);
    let s = x.sin();
    if s.abs() < POLE_EPS {
        return Err(SystemError::AngularSingularity { phi });
    }
    // k_a + k_b cos x written as (k_a + k_b) − 2k_b sin²(x/2), which stays
    // accurate near x = 0 when k_a ≈ −k_b.
    let half = (0.5 * x).sin();
    Ok(((k_a + k_b) - 2.0 * k_b * half * half) / (s * s))
}

/// Map `α/cos²(θ) + β/sin²(θ)` onto `k_a/sin²(2θ) + k_b cos(2θ)/sin²(2θ)`.
pub fn reparam_alpha_beta(alpha: f64, beta: f64) -> (f64, f64) {
    (2.0 * (alpha + beta), 2.0 * (beta - alpha))
}

pub fn potential(state: &PhaseState, spec: &SystemSpec) -> Result<f64, SystemError> {
    let rad = spec.radial(state.r)?;
    potential_with(state, spec, &rad)
}

fn potential_with(state: &PhaseState, spec: &SystemSpec, rad: &Radial) -> Result<f64, SystemError> {
    let kepler = -spec.coupling() * rad.cot;
    match spec.kind {
        SystemKind::FreeGeodesic => Ok(0.0),
        SystemKind::Kepler => Ok(kepler),
        _ => Ok(kepler + spec.angular_value(state.phi)? / (rad.sin * rad.sin)),
    }
}

pub fn hamiltonian(state: &PhaseState, spec: &SystemSpec) -> Result<f64, SystemError> {
    let rad = spec.radial(state.r)?;
    let kinetic = 0.5 * (state.p_r * state.p_r + state.p_phi * state.p_phi / (rad.sin * rad.sin));
    Ok(kinetic + potential_with(state, spec, &rad)?)
}

/// Curved Kepler potential `U(r; κ) = −g / Tan_κ(r)`.
pub fn kepler_potential(kappa: Curvature, g: f64, r: f64) -> Result<f64, SystemError> {
    SystemSpec::kepler(kappa, g)?.radial(r).map(|rad| -g * rad.cot)
}

/// One row of the Kepler potential comparison on the three model spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialCurveRow {
    pub r: f64,
    pub sphere: f64,
    pub plane: f64,
    pub hyperbolic: f64,
}

/// Sample `U(r; 1)`, `U(r; 0)`, `U(r; −1)` on `samples` equally spaced radii.
pub fn potential_curve(g: f64, r_min: f64, r_max: f64, samples: usize) -> Result<Vec<PotentialCurveRow>, SystemError> {
    if !(r_min > 0.0 && r_min < r_max && r_max < PI) {
        return Err(SystemError::InvalidParameter(format!(
            "potential curve needs 0 < r_min < r_max < pi, got [{r_min}, {r_max}]"
        )));
    }
    if samples < 2 {
        return Err(SystemError::InvalidParameter(
            "potential curve needs at least two samples".into(),
        ));
    }
    let step = (r_max - r_min) / (samples - 1) as f64;
    (0..samples)
        .map(|i| {
            let r = if i + 1 == samples {
                r_max
            } else {
                r_min + i as f64 * step
            };
            Ok(PotentialCurveRow {
                r,
                sphere: kepler_potential(Curvature::UNIT_SPHERE, g, r)?,
                plane: kepler_potential(Curvature::FLAT, g, r)?,
                hyperbolic: kepler_potential(Curvature::UNIT_HYPERBOLIC, g, r)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, SQRT_2};

    fn m(p: u32, q: u32) -> AngularIndex {
        AngularIndex::new(p, q).unwrap()
    }

    #[test]
    fn index_is_reduced() {
        assert_eq!(m(4, 6), m(2, 3));
        assert_eq!("3/2".parse::<AngularIndex>().unwrap(), m(3, 2));
        assert_eq!("2".parse::<AngularIndex>().unwrap(), m(2, 1));
        assert!("0/1".parse::<AngularIndex>().is_err());
        assert!("a/b".parse::<AngularIndex>().is_err());
        assert_eq!(m(6, 4).to_string(), "3/2");
    }

    #[test]
    fn f_m_examples() {
        assert_relative_eq!(angular_f_m(FRAC_PI_2, 2.0, 5.0, m(1, 1)).unwrap(), 2.0, epsilon = 1e-15);
        assert_relative_eq!(angular_f_m(FRAC_PI_4, 0.7, 3.0, m(2, 1)).unwrap(), 0.7, epsilon = 1e-15);
        assert_relative_eq!(
            angular_f_m(FRAC_PI_8, 1.0, 1.0, m(2, 1)).unwrap(),
            2.0 + SQRT_2,
            max_relative = 1e-14
        );
        assert!(matches!(
            angular_f_m(0.0, 1.0, 1.0, m(1, 1)),
            Err(SystemError::AngularSingularity { .. })
        ));
        assert!(angular_f_m(PI, 1.0, 1.0, m(1, 1)).is_err());
    }

    #[test]
    fn m2_cartesian_form() {
        // F_2(φ)/r² = (k_a−k_b)/(4x²) + (k_a+k_b)/(4y²)
        let (k_a, k_b) = (0.9, -0.4);
        for &(x, y) in &[(1.0, 1.0), (0.3, 2.0), (-1.5, 0.7)] {
            let r2: f64 = x * x + y * y;
            let phi = f64::atan2(y, x);
            let lhs = angular_f_m(phi, k_a, k_b, m(2, 1)).unwrap() / r2;
            let rhs = (k_a - k_b) / (4.0 * x * x) + (k_a + k_b) / (4.0 * y * y);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        }
    }

    #[test]
    fn reparam_examples() {
        assert_eq!(reparam_alpha_beta(1.0, 0.0), (2.0, -2.0));
        assert_eq!(reparam_alpha_beta(0.0, 0.0), (0.0, 0.0));
        assert_eq!(reparam_alpha_beta(0.5, 0.5), (2.0, 0.0));
        // Both sides at m'φ = π/4 equal 2.
        let (k_a, k_b) = reparam_alpha_beta(1.0, 0.0);
        assert_relative_eq!(angular_f_m(FRAC_PI_4, k_a, k_b, m(2, 1)).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn trig_equality_on_grid() {
        for &(alpha, beta) in &[(1.0, 0.0), (0.3, 1.7), (-0.5, 2.0)] {
            for half in [m(1, 1), m(1, 2), m(3, 2), m(3, 1)] {
                let (k_a, k_b) = reparam_alpha_beta(alpha, beta);
                let full = AngularIndex::new(2 * half.num(), half.den()).unwrap();
                // θ = m'φ ranges over (0, π/2), avoiding the endpoints.
                for i in 1..1000 {
                    let theta = FRAC_PI_2 * i as f64 / 1000.0;
                    let phi = theta / half.as_f64();
                    let lhs = angular_f_m(phi, k_a, k_b, full).unwrap();
                    let t = half.scale(phi);
                    let rhs = alpha / t.cos().powi(2) + beta / t.sin().powi(2);
                    assert!(
                        (lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()),
                        "theta={theta} lhs={lhs} rhs={rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_beta_constructor_matches_euclidean_pw() {
        let spec = SystemSpec::pw_from_alpha_beta(Curvature::FLAT, 1.2, 0.4, 0.9, m(3, 2)).unwrap();
        assert_eq!(spec.m, m(3, 1));
        let s = PhaseState::new(1.3, 0.2, 0.1, 0.4);
        let t = 1.5 * s.phi;
        let expected = -1.2 / s.r + (0.4 / t.cos().powi(2) + 0.9 / t.sin().powi(2)) / (2.0 * s.r * s.r);
        assert_relative_eq!(potential(&s, &spec).unwrap(), expected, max_relative = 1e-13);
    }

    #[test]
    fn potential_examples() {
        let kep1 = SystemSpec::kepler(Curvature::UNIT_SPHERE, 1.0).unwrap();
        let s = PhaseState::new(FRAC_PI_4, 0.0, 0.0, 0.0);
        assert_relative_eq!(potential(&s, &kep1).unwrap(), -1.0, epsilon = 1e-15);
        assert_relative_eq!(hamiltonian(&s, &kep1).unwrap(), -1.0, epsilon = 1e-15);

        let kep0 = SystemSpec::kepler(Curvature::FLAT, 3.0).unwrap();
        assert_eq!(potential(&PhaseState::new(2.0, 0.3, 0.0, 0.0), &kep0).unwrap(), -1.5);

        let pw = SystemSpec::pw(Curvature::FLAT, 1.0, 1.0, 0.0, AngularIndex::ONE).unwrap();
        let s = PhaseState::new(1.0, FRAC_PI_2, 0.0, 1.0);
        assert_relative_eq!(potential(&s, &pw).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(hamiltonian(&s, &pw).unwrap(), 0.5, epsilon = 1e-15);

        let free = SystemSpec::free(Curvature::FLAT);
        assert_eq!(hamiltonian(&PhaseState::new(1.0, 0.0, 0.0, 2.0), &free).unwrap(), 2.0);
    }

    #[test]
    fn singular_states_are_errors() {
        let kep = SystemSpec::kepler(Curvature::UNIT_SPHERE, 1.0).unwrap();
        assert!(matches!(
            potential(&PhaseState::new(0.0, 0.1, 0.0, 0.0), &kep),
            Err(SystemError::RadialPole { .. })
        ));
        assert!(potential(&PhaseState::new(PI, 0.1, 0.0, 0.0), &kep).is_err());
        assert!(potential(&PhaseState::new(-0.5, 0.1, 0.0, 0.0), &kep).is_err());
        // The equator is regular.
        assert!(
            potential(&PhaseState::new(FRAC_PI_2, 0.1, 0.0, 0.0), &kep)
                .unwrap()
                .abs()
                < 1e-15
        );

        let pw = SystemSpec::pw(Curvature::FLAT, 1.0, 1.0, 0.2, m(2, 1)).unwrap();
        assert!(matches!(
            hamiltonian(&PhaseState::new(1.0, FRAC_PI_2, 0.0, 0.0), &pw),
            Err(SystemError::AngularSingularity { .. })
        ));
    }

    #[test]
    fn vc_is_pw_with_unit_index() {
        let vc = SystemSpec::vc(Curvature::new(0.7).unwrap(), 1.1, 0.5, 0.2).unwrap();
        let pw = SystemSpec::pw(Curvature::new(0.7).unwrap(), 1.1, 0.5, 0.2, AngularIndex::ONE).unwrap();
        let s = PhaseState::new(0.8, 1.1, 0.3, -0.2);
        assert_eq!(hamiltonian(&s, &vc).unwrap(), hamiltonian(&s, &pw).unwrap());
        // Paper's V_c form: (k₂ + k₃ cos φ)/(Sin_κ(r) sin φ)².
        let sk = vc.kappa.sin(s.r);
        let direct = -1.1 * vc.kappa.cot(s.r) + (0.5 + 0.2 * s.phi.cos()) / (sk * s.phi.sin()).powi(2);
        assert_relative_eq!(potential(&s, &vc).unwrap(), direct, max_relative = 1e-14);
    }

    #[test]
    fn generic_kind_uses_handle() {
        let f: Arc<dyn AngularFunction> = Arc::new((|p: f64| 0.5 + 0.2 * p.cos(), |p: f64| -0.2 * p.sin()));
        let spec = SystemSpec::generic(Curvature::FLAT, 1.0, f).unwrap();
        let s = PhaseState::new(2.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(potential(&s, &spec).unwrap(), -0.5 + 0.7 / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn angular_derivative_matches_finite_difference() {
        let spec = SystemSpec::pw(Curvature::FLAT, 1.0, 0.8, 0.3, m(3, 2)).unwrap();
        for i in 1..20 {
            let phi = (i as f64 / 20.0) * PI / 1.5;
            let h = 1e-6;
            let fd = (spec.angular_value(phi + h).unwrap() - spec.angular_value(phi - h).unwrap()) / (2.0 * h);
            let (f, d) = spec.angular(phi).unwrap();
            assert!((fd - d).abs() < 1e-6 * (1.0 + f.abs() + d.abs()), "phi={phi}");
        }
    }

    #[test]
    fn potential_curve_rows() {
        let rows = potential_curve(1.0, FRAC_PI_4, 1.0, 3).unwrap();
        let first = rows[0];
        assert_relative_eq!(first.sphere, -1.0, epsilon = 1e-15);
        assert_relative_eq!(first.plane, -4.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(first.hyperbolic, -1.0 / FRAC_PI_4.tanh(), epsilon = 1e-15);
        assert_eq!(rows.last().unwrap().r, 1.0);
        assert!(potential_curve(1.0, 0.0, 1.0, 10).is_err());
        assert!(potential_curve(1.0, 0.5, 3.2, 10).is_err());
        assert!(potential_curve(1.0, 0.5, 0.4, 10).is_err());
        assert!(potential_curve(1.0, 0.5, 1.0, 1).is_err());
    }

    #[test]
    fn potential_ordering_and_asymptotics() {
        for row in potential_curve(1.0, 1e-3, FRAC_PI_2 - 1e-3, 500).unwrap() {
            assert!(row.sphere > row.plane && row.plane > row.hyperbolic, "{row:?}");
        }
        let near0 = potential_curve(1.0, 1e-9, 0.5, 2).unwrap()[0];
        assert!(near0.sphere < -1e8 && near0.plane < -1e8 && near0.hyperbolic < -1e8);
        let far = 1e6;
        assert!(kepler_potential(Curvature::FLAT, 1.0, far).unwrap().abs() < 1e-5);
        assert_eq!(kepler_potential(Curvature::UNIT_HYPERBOLIC, 1.0, far).unwrap(), -1.0);
    }

    proptest! {
        #[test]
        fn flat_hamiltonian_is_euclidean(
            r in 0.1f64..5.0, t in 0.05f64..0.95, p_r in -2.0f64..2.0, p_phi in -2.0f64..2.0,
            g in -2.0f64..2.0, k_a in -1.0f64..1.0, k_b in -1.0f64..1.0, p in 1u32..4, q in 1u32..3,
        ) {
            let idx = AngularIndex::new(p, q).unwrap();
            let phi = t * PI / idx.as_f64();
            let s = PhaseState::new(r, phi, p_r, p_phi);
            let kin = 0.5 * (p_r * p_r + p_phi * p_phi / (r * r));
            let mphi = idx.as_f64() * phi;
            let f = (k_a + k_b * mphi.cos()) / mphi.sin().powi(2);
            let cases = [
                (SystemSpec::free(Curvature::FLAT), kin),
                (SystemSpec::kepler(Curvature::FLAT, g).unwrap(), kin - g / r),
                (SystemSpec::pw(Curvature::FLAT, g, k_a, k_b, idx).unwrap(), kin - g / r + f / (r * r)),
            ];
            for (spec, expected) in cases {
                let h = hamiltonian(&s, &spec).unwrap();
                prop_assert!((h - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
            }
        }
    }
}
