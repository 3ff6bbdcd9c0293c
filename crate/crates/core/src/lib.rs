//! Kepler-related superintegrable systems on the sphere, the plane and the
//! hyperbolic plane, written once for an arbitrary curvature κ.
//!
//! * [`kappa_trig`]: `Cos_κ`, `Sin_κ`, `Tan_κ` and the radial domain.
//! * [`systems`]: free motion, Kepler, `V_c`, the PW family and a generic
//!   separable Hamiltonian.
//! * [`dynamics`]: equations of motion and an adaptive Dormand–Prince integrator.
//! * [`invariants`]: every constant of motion, including the complex factors
//!   `M_r`, `N_φ` and the higher-order integral `K`.
//! * [`verify`]: finite-difference Poisson brackets, drift, rotation laws,
//!   closure and flat-limit checks.
//! * [`output`]: CSV writers.

mod dop853;
pub mod dynamics;
pub mod invariants;
pub mod kappa_trig;
pub mod output;
pub mod systems;
pub mod verify;

pub use dynamics::{eom, integrate, DynamicsError, IntegratorConfig, Termination, Trajectory};
pub use invariants::{ComplexValue, Invariant};
pub use kappa_trig::{cos_k, cot_k, r_domain, sin_k, tan_k, Curvature, RadialDomain, TrigError};
pub use systems::{
    angular_f_m, hamiltonian, potential, reparam_alpha_beta, AngularFunction, AngularIndex, PhaseState, SystemError,
    SystemKind, SystemSpec,
};
pub use verify::{CheckRow, VerifyError};
