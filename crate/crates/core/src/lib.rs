//! Numerical laboratory for the velocity-dependent circle constant C(v).
//!
//! The crate covers:
//!
//! - [`deform`]: the closed-form model C(β) = π(1 − β²), its derivatives, the
//!   critical speed where C = 1, the supercritical offset and geometric measures.
//! - [`elliptic`]: the exact contracted-circle perimeter through the complete
//!   elliptic integral of the second kind (AGM), and its first-order expansion.
//! - [`flow`]: relaxation flows C(β, τ), the conformal reduction dC/dτ = −2k/C,
//!   the undamped second-order dynamics, closed-form solutions and a grid
//!   integrator.
//! - [`energy`]: L² deformation energy and its decay rate, Dirichlet energy,
//!   and the field energy density.
//! - [`invariants`]: constant-curvature metric invariants (I₁, I₂, I₃) and their
//!   scaling along the flow.
//! - [`audit`]: recomputation of printed reference values with deviations.
//! - [`cli`]: the command implementations behind the `deformflow` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod cli;
pub mod config;
pub mod deform;
pub mod elliptic;
pub mod energy;
pub mod error;
pub mod flow;
pub mod grid;
pub mod invariants;
pub mod ode;
pub mod quadrature;

pub use error::{Error, Result};
