//! Periodic grids, spectral calculus, Gaussian symbols and phase-space samples.

pub mod fft;
pub mod grid;
pub mod io;
pub mod phase;
pub mod scalar;
pub mod spec;
pub mod spin;
pub mod symbol;

pub use grid::{Grid2D, PGrid};
pub use phase::{quadrature_moment, PhaseSpaceField};
pub use scalar::{Axis, ScalarField};
pub use spec::{FieldSpec, ModeSpec};
pub use spin::{cross_fields, pauli_component, PauliField, SpinField};
pub use symbol::{gaussian_weight, GaussianSymbol, SymbolPoly};
