//! Constants of motion.
//!
//! Everything here is a plain phase-space function. The Lagrangian velocity
//! forms are rewritten through `p_r = v_r`, `p_φ = Sin_κ(r)² v_φ`.
//!
//! The higher-order integral comes from two complex functions,
//!
//! ```text
//! M_r = p_r √J₂ + i (g − J₂ / Tan_κ(r))
//! N_φ = (k_b + J₂ cos mφ) + i p_φ √J₂ sin mφ
//! ```
//!
//! which rotate in the complex plane at rates `λ` and `mλ` with
//! `λ = √J₂ / Sin_κ(r)²`. For `m = p/q` the product `M_r^p (N_φ*)^q` is
//! therefore stationary; `q = 1` is `K_m = M_r^m N_φ*`.

use std::fmt;

use crate::systems::{hamiltonian, AngularIndex, PhaseState, SystemError, SystemKind, SystemSpec};

/// Complex phase-space values: `M_r`, `N_φ` and `K = J₃ + iJ₄`.
pub type ComplexValue = num_complex::Complex64;

/// Noether momentum `P₁(κ)`; `p_x` on the plane.
pub fn noether_p1(state: &PhaseState, spec: &SystemSpec) -> Result<f64, SystemError> {
    let rad = spec.radial(state.r)?;
    let (s, c) = state.phi.sin_cos();
    Ok(c * state.p_r - rad.cot * s * state.p_phi)
}

/// Noether momentum `P₂(κ)`; `p_y` on the plane.
pub fn noether_p2(state: &PhaseState, spec: &SystemSpec) -> Result<f64, SystemError> {
    let rad = spec.radial(state.r)?;
    let (s, c) = state.phi.sin_cos();
    Ok(s * state.p_r + rad.cot * c * state.p_phi)
}

/// Angular momentum `J(κ) = Sin_κ(r)² v_φ`, which is just `p_φ`.
pub fn angular_j(state: &PhaseState) -> f64 {
    state.p_phi
}

/// `J₁ = p_r² + p_φ²/Sin_κ² − 2g/Tan_κ + 2F/Sin_κ²`, i.e. twice the energy.
pub fn j1(state: &PhaseState, spec: &SystemSpec) -> Result<f64, SystemError> {
    let rad = spec.radial(state.r)?;
    let s2 = rad.sin * rad.sin;
    let kinetic = state.p_r * state.p_r + state.p_phi * state.p_phi / s2;
    let kepler = -2.0 * spec.coupling() * rad.cot;
    let pot = match spec.kind {
        SystemKind::FreeGeodesic => 0.0,
        SystemKind::Kepler => kepler,
        _ => kepler + 2.0 * spec.angular_value(state.phi)? / s2,
    };
    Ok(kinetic + pot)
}

/// `J₂ = p_φ² + 2F(φ)`, the separation constant of the angular motion.
pub fn j2(state: &PhaseState, spec: &SystemSpec) -> Result<f64, SystemError> {
    Ok(state.p_phi * state.p_phi + 2.0 * spec.angular_value(state.phi)?)
}

/// The curved Runge–Lenz pair `(I₃, I₄)` of the Kepler problem.
pub fn runge_lenz(state: &PhaseState, spec: &SystemSpec) -> Result<(f64, f64), SystemError> {
    if !matches!(spec.kind, SystemKind::Kepler | SystemKind::FreeGeodesic) {
        return Err(SystemError::WrongKind {
            expected: "kepler",
            found: spec.kind,
        });
    }
    let g = spec.coupling();
    let j = angular_j(state);
    let (s, c) = state.phi.sin_cos();
    let i3 = noether_p2(state, spec)? * j - g * c;
    let i4 = noether_p1(state, spec)? * j + g * s;
    Ok((i3, i4))
}

/// The two quadratic integrals `(I₂, I₃)` of the curved `V_c` potential.
pub fn vc_integrals(state: &PhaseState, spec: &SystemSpec) -> Result<(f64, f64), SystemError> {
    if spec.kind != SystemKind::Vc {
        return Err(SystemError::WrongKind {
            expected: "vc",
            found: spec.kind,
        });
    }
    let (k2, k3, g) = (spec.k_a, spec.k_b, spec.g);
    let rad = spec.radial(state.r)?;
    let (s, c) = state.phi.sin_cos();
    if s.abs() < crate::kappa_trig::POLE_EPS {
        return Err(SystemError::AngularSingularity { phi: state.phi });
    }
    let s2 = s * s;
    let j = angular_j(state);
    let i2 = j * j + 2.0 * k2 / s2 + 2.0 * k3 * c / s2;
    let i3 = noether_p2(state, spec)? * j - g * c + 2.0 * k2 * rad.cot * (c / s2) + k3 * rad.cot * ((1.0 + c * c) / s2);
    Ok((i2, i3))
}

fn sqrt_j2(state: &PhaseState, spec: &SystemSpec) -> Result<(f64, f64), SystemError> {
    let j2 = j2(state, spec)?;
    if j2.is_nan() || j2 <= 0.0 {
        return Err(SystemError::NegativeCasimir { j2 });
    }
    Ok((j2, j2.sqrt()))
}

/// Radial factor `M_r = p_r √J₂ + i (g − J₂/Tan_κ(r))`.
pub fn m_r(state: &PhaseState, spec: &SystemSpec) -> Result<ComplexValue, SystemError> {
    let (j2, root) = sqrt_j2(state, spec)?;
    let rad = spec.radial(state.r)?;
    Ok(ComplexValue::new(state.p_r * root, spec.coupling() - j2 * rad.cot))
}

/// Angular factor `N_φ = (k_b + J₂ cos mφ) + i p_φ √J₂ sin mφ`.
pub fn n_phi(state: &PhaseState, spec: &SystemSpec) -> Result<ComplexValue, SystemError> {
    if spec.kind == SystemKind::GenericF {
        return Err(SystemError::WrongKind {
            expected: "F_m",
            found: spec.kind,
        });
    }
    let (j2, root) = sqrt_j2(state, spec)?;
    let (s, c) = spec.index().scale(state.phi).sin_cos();
    Ok(ComplexValue::new(spec.k_b + j2 * c, state.p_phi * root * s))
}

/// Common rotation rate `λ_κ = √J₂ / Sin_κ(r)²`.
pub fn lambda_k(state: &PhaseState, spec: &SystemSpec) -> Result<f64, SystemError> {
    let (_, root) = sqrt_j2(state, spec)?;
    let rad = spec.radial(state.r)?;
    Ok(root / (rad.sin * rad.sin))
}

/// `M_r^p (N_φ*)^q`; `p/q` must equal the system index exactly.
///
/// Real and imaginary parts are the integrals `J₃` and `J₄`.
pub fn k_constant(state: &PhaseState, spec: &SystemSpec, p: u32, q: u32) -> Result<ComplexValue, SystemError> {
    let m = spec.index();
    if p != m.num() || q != m.den() {
        return Err(SystemError::IndexMismatch { p, q, m });
    }
    let mr = m_r(state, spec)?;
    let n = n_phi(state, spec)?;
    Ok(mr.powu(p) * n.conj().powu(q))
}

/// `k_constant` with the exponents taken from the system.
pub fn k_invariant(state: &PhaseState, spec: &SystemSpec) -> Result<ComplexValue, SystemError> {
    let m: AngularIndex = spec.index();
    k_constant(state, spec, m.num(), m.den())
}

/// `(2H − κJ₂)J₂ + g²`, the closed form of `|M_r|²`.
pub fn m_r_modulus_sq(state: &PhaseState, spec: &SystemSpec) -> Result<f64, SystemError> {
    let h = hamiltonian(state, spec)?;
    let j2 = j2(state, spec)?;
    let g = spec.coupling();
    Ok((2.0 * h - spec.kappa.value() * j2) * j2 + g * g)
}

/// `J₂² − 2k_a J₂ + k_b²`, the closed form of `|N_φ|²`.
pub fn n_phi_modulus_sq(state: &PhaseState, spec: &SystemSpec) -> Result<f64, SystemError> {
    let j2 = j2(state, spec)?;
    Ok(j2 * j2 - 2.0 * spec.k_a * j2 + spec.k_b * spec.k_b)
}

/// A named conserved quantity that can be tabulated along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Invariant {
    H,
    J1,
    J2,
    I3,
    I4,
    KRe,
    KIm,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::H => "H",
            Invariant::J1 => "J1",
            Invariant::J2 => "J2",
            Invariant::I3 => "I3",
            Invariant::I4 => "I4",
            Invariant::KRe => "K_re",
            Invariant::KIm => "K_im",
        }
    }

    /// CSV columns written for a system kind.
    pub fn columns_for(kind: SystemKind) -> &'static [Invariant] {
        use Invariant::*;
        match kind {
            SystemKind::FreeGeodesic | SystemKind::Kepler => &[H, J2, I3, I4, KRe, KIm],
            SystemKind::Vc => &[H, J2, I3, KRe, KIm],
            SystemKind::Pw => &[H, J2, KRe, KIm],
            SystemKind::GenericF => &[H, J2],
        }
    }

    /// `I₃`/`I₄` are the Runge–Lenz pair for central systems and the
    /// second `V_c` integral for `Vc`.
    pub fn evaluate(self, state: &PhaseState, spec: &SystemSpec) -> Result<f64, SystemError> {
        match self {
            Invariant::H => hamiltonian(state, spec),
            Invariant::J1 => j1(state, spec),
            Invariant::J2 => j2(state, spec),
            Invariant::I3 if spec.kind == SystemKind::Vc => vc_integrals(state, spec).map(|v| v.1),
            Invariant::I3 => runge_lenz(state, spec).map(|v| v.0),
            Invariant::I4 => runge_lenz(state, spec).map(|v| v.1),
            Invariant::KRe => k_invariant(state, spec).map(|k| k.re),
            Invariant::KIm => k_invariant(state, spec).map(|k| k.im),
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
