use crate::systems::{PhaseState, SystemError};

use super::VerifyError;

pub const DEFAULT_BRACKET_STEP: f64 = 1e-5;

const COORDS: [&str; 4] = ["r", "phi", "p_r", "p_phi"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketEstimate {
    pub value: f64,
    /// `1 + Σ|∂f·∂g|` over the four products; the size of the terms that cancel.
    pub scale: f64,
}

impl BracketEstimate {
    pub fn relative(&self) -> f64 {
        self.value.abs() / self.scale
    }
}

fn gradient<F>(f: &F, state: &PhaseState, h: f64) -> Result<[f64; 4], VerifyError>
where
    F: Fn(&PhaseState) -> Result<f64, SystemError>,
{
    let x = state.to_array();
    let mut grad = [0.0; 4];
    for i in 0..4 {
        let step = h * x[i].abs().max(1.0);
        let eval = |delta: f64| {
            let mut y = x;
            y[i] += delta;
            f(&PhaseState::from_array(y)).map_err(|source| VerifyError::Stencil {
                coordinate: COORDS[i],
                value: y[i],
                source,
            })
        };
        grad[i] = (eval(step)? - eval(-step)?) / (2.0 * step);
    }
    Ok(grad)
}

/// Central-difference Poisson bracket `{f, g}` together with its cancellation scale.
pub fn bracket_with_scale<F, G>(f: F, g: G, state: &PhaseState, h: f64) -> Result<BracketEstimate, VerifyError>
where
    F: Fn(&PhaseState) -> Result<f64, SystemError>,
    G: Fn(&PhaseState) -> Result<f64, SystemError>,
{
    let df = gradient(&f, state, h)?;
    let dg = gradient(&g, state, h)?;
    // {f, g} = f_r g_pr − f_pr g_r + f_φ g_pφ − f_pφ g_φ
    let terms = [df[0] * dg[2], df[2] * dg[0], df[1] * dg[3], df[3] * dg[1]];
    let value = (terms[0] - terms[1]) + (terms[2] - terms[3]);
    let scale = 1.0 + terms.iter().map(|t| t.abs()).sum::<f64>();
    Ok(BracketEstimate { value, scale })
}

pub fn poisson_bracket_fd<F, G>(f: F, g: G, state: &PhaseState, h: f64) -> Result<f64, VerifyError>
where
    F: Fn(&PhaseState) -> Result<f64, SystemError>,
    G: Fn(&PhaseState) -> Result<f64, SystemError>,
{
    bracket_with_scale(f, g, state, h).map(|b| b.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{j2, k_invariant};
    use crate::kappa_trig::Curvature;
    use crate::systems::{hamiltonian, AngularIndex, SystemSpec};

    fn r(s: &PhaseState) -> Result<f64, SystemError> {
        Ok(s.r)
    }
    fn p_r(s: &PhaseState) -> Result<f64, SystemError> {
        Ok(s.p_r)
    }

    #[test]
    fn canonical_pair() {
        let s = PhaseState::new(1.3, 0.2, -0.4, 0.7);
        let b = poisson_bracket_fd(r, p_r, &s, DEFAULT_BRACKET_STEP).unwrap();
        assert!((b - 1.0).abs() < 1e-10);
        let b = poisson_bracket_fd(p_r, r, &s, DEFAULT_BRACKET_STEP).unwrap();
        assert!((b + 1.0).abs() < 1e-10);
    }

    #[test]
    fn angular_momentum_commutes_with_central_hamiltonian() {
        for k in [-1.0, 0.0, 1.0] {
            let spec = SystemSpec::kepler(Curvature::new(k).unwrap(), 1.0).unwrap();
            let s = PhaseState::new(0.8, 2.0, 0.3, 0.6);
            let b = poisson_bracket_fd(|s| Ok(s.p_phi), |s| hamiltonian(s, &spec), &s, DEFAULT_BRACKET_STEP).unwrap();
            assert!(b.abs() < 1e-8, "kappa={k}: {b}");
        }
    }

    #[test]
    fn antisymmetry_is_exact() {
        let spec = SystemSpec::pw(Curvature::UNIT_SPHERE, 1.0, 0.8, 0.3, AngularIndex::new(3, 2).unwrap()).unwrap();
        let s = PhaseState::new(0.9, 1.1, 0.3, -0.2);
        let f = |s: &PhaseState| k_invariant(s, &spec).map(|k| k.re);
        let g = |s: &PhaseState| hamiltonian(s, &spec);
        let a = poisson_bracket_fd(f, g, &s, 1e-5).unwrap();
        let b = poisson_bracket_fd(g, f, &s, 1e-5).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn second_order_convergence() {
        // {sin(r) p_r², p_r cos φ} = cos(r) p_r² cos φ.
        let s = PhaseState::new(0.7, 0.4, 1.3, 0.0);
        let f = |s: &PhaseState| Ok(s.r.sin() * s.p_r * s.p_r);
        let g = |s: &PhaseState| Ok(s.p_r * s.phi.cos());
        let exact = s.r.cos() * s.p_r * s.p_r * s.phi.cos();
        let e1 = (poisson_bracket_fd(f, g, &s, 1e-3).unwrap() - exact).abs();
        let e2 = (poisson_bracket_fd(f, g, &s, 5e-4).unwrap() - exact).abs();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn stencil_hitting_a_pole() {
        let spec = SystemSpec::pw(Curvature::FLAT, 1.0, 0.8, 0.3, AngularIndex::ONE).unwrap();
        let s = PhaseState::new(1.0, 1e-20, 0.0, 0.5);
        let err = poisson_bracket_fd(|s| j2(s, &spec), |s| hamiltonian(s, &spec), &s, 1e-5);
        assert!(err.is_ok() || matches!(err, Err(VerifyError::Stencil { .. })));
        let s = PhaseState::new(5e-6, 1.0, 0.0, 0.5);
        let err = poisson_bracket_fd(|s| j2(s, &spec), |s| hamiltonian(s, &spec), &s, 1e-5);
        assert!(matches!(err, Err(VerifyError::Stencil { coordinate: "r", .. })));
    }
}
