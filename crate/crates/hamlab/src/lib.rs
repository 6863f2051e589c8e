//! Numerical Hofer geometry on toy phase spaces.
//!
//! Hamiltonians are closed-form expressions on products of `ℝ²ⁿ` and round
//! spheres. The crate integrates their flows, estimates Hofer norms and
//! their positive and negative parts, builds the composed Hamiltonian `Ĥ`
//! and the gauge transformations between path spaces, and checks the
//! action and energy identities by quadrature.
//!
//! Conventions: `ω = Σ dxᵢ∧dyᵢ` on `ℝ²ⁿ`, the induced area form on a
//! sphere of total area `a`, and `dH = ω(X_H, ·)`. On `ℝ²` this gives
//! `X_H = (∂H/∂y, −∂H/∂x)`, so `H = (x²+y²)/2` rotates clockwise.

use thiserror::Error;

pub mod expr;
pub mod field;
pub mod flow;
pub mod gauge;
pub mod hofer;
pub mod profile;
pub mod space;
pub mod strip;
pub mod suite;
pub mod verify;

pub use expr::Expr;
pub use field::{ExprHamiltonian, Hamiltonian};
pub use profile::Profile;
pub use space::PhaseSpace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamError {
    #[error("cannot parse `{input}`: {message}")]
    Parse { input: String, message: String },
    #[error("euclidean factors need a bounded sampling box")]
    UnboundedDomain,
    #[error("phase space is not compact; normalization skipped")]
    NonCompact,
    #[error("flow step failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
    #[error("phase spaces do not match: {0}")]
    SpaceMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
