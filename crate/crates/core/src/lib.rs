//! Spin-resolved quantum drift-diffusion with Rashba spin-orbit coupling.
//!
//! The crate evaluates the semiclassical quantum Maxwellian and its Lagrange
//! multipliers, integrates the local quantum-spin fluid model and its reductions,
//! and provides a Wigner-BGK kinetic reference solver plus a verification catalog.

pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod fluid;
pub mod kinetic;
pub mod maxwellian;
pub mod moyal;
pub mod par;
pub mod pauli;
pub mod tolerances;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
