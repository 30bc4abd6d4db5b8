//! Simulation core for hybrid synchronization of four coupled
//! fractional-order Chen systems under active control.
//!
//! Two uncontrolled drive systems and two controlled response systems are
//! advanced by a fixed-step Grünwald–Letnikov scheme; the controller is
//! synthesized so the per-component synchronization error obeys a diagonal
//! linear fractional system with prescribed decay rates.
//!
//! - [`solver`] — GL binomial coefficient tables, single steps, integration.
//! - [`chen`] — the Chen vector field with additive control inputs.
//! - [`mat3`] — minimal 3×3 matrix support and eigenvalues.
//! - [`controller`] — hybrid error map, gain synthesis, control allocation,
//!   fractional stability check.
//! - [`harness`] — the coupled four-system experiment and convergence
//!   metrics.

pub mod chen;
pub mod controller;
pub mod harness;
pub mod mat3;
pub mod solver;

/// Re-exported so downstream code can feed [`controller::stability_check`]
/// without naming the `num-complex` crate itself.
pub use num_complex::Complex64;
