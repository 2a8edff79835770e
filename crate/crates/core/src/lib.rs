//! Differentiable compactifications of the isometric action of `SO₀(n,1)` on
//! the hyperbolic ball.
//!
//! The crate is organised bottom-up:
//!
//! * [`lorentz`]: the quadratic form, the group, its Lie algebra with the
//!   named generators `H`, `X_i`, `Y_i`, `R_jk`, and the matrix exponential.
//! * [`models`]: hyperboloid, Klein and Poincaré balls, the half-space charts
//!   `KC` and `PC`, and the boundary reparametrizations `φ_f`.
//! * [`actions`]: the projective, conformal and reparametrized actions on the
//!   closed ball, with the boundary handled by continuous extension.
//! * [`fields`]: infinitesimal actions in chart `KC` and their pullbacks.
//! * [`symbolic`]: exact polynomial vector fields, a small text grammar, and
//!   the monomial pullback with its analyticity test.
//! * [`diagnostics`]: numeric classifiers (smoothness of `f/f′`, flatness,
//!   Hölder exponents, geodesic endpoints, boundary angles).
//!
//! Every operation is a pure function over immutable values.

#![forbid(unsafe_code)]

pub mod actions;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod hp;
pub mod lorentz;
pub mod models;
pub mod numeric;
pub mod sampling;
pub mod symbolic;
pub mod tolerances;

pub use error::{Error, Result};
pub use lorentz::{AlgebraElement, GeneratorKind, GroupElement, LorentzForm};
pub use models::{Model, ModelPoint, ReparamMap};
pub use tolerances::Tolerances;

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
