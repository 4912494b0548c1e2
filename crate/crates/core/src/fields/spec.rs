//! Serializable field descriptions: a constant plus a list of Fourier modes.

use super::{Grid2D, ScalarField};
use crate::error::{Error, Result};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `amp · cos(2π (m1 x / lx + m2 y / ly) + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub amp: f64,
    pub mode: [i64; 2],
    #[serde(default)]
    pub phase: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub modes: Vec<ModeSpec>,
}

impl FieldSpec {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, modes: Vec::new() }
    }

    pub fn with_mode(mut self, amp: f64, mode: [i64; 2], phase: f64) -> Self {
        self.modes.push(ModeSpec { amp, mode, phase });
        self
    }

    /// Rejects non-finite values and modes outside the dealiased band of `grid`.
    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if !self.constant.is_finite() {
            return Err(Error::Invalid("constant must be finite".into()));
        }
        for (i, m) in self.modes.iter().enumerate() {
            if !(m.amp.is_finite() && m.phase.is_finite()) {
                return Err(Error::Invalid(format!("modes[{i}]: amplitude and phase must be finite")));
            }
            let limit = [grid.nx, grid.ny].map(|n| (n as i64 - 1) / 3);
            if m.mode[0].abs() > limit[0] || m.mode[1].abs() > limit[1] {
                return Err(Error::Invalid(format!(
                    "modes[{i}]: wave vector {:?} exceeds the resolved band ({}, {})",
                    m.mode, limit[0], limit[1]
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, grid: &Grid2D, x: f64, y: f64) -> f64 {
        self.constant
            + self
                .modes
                .iter()
                .map(|m| {
                    let arg = 2.0 * PI * (m.mode[0] as f64 * x / grid.lx + m.mode[1] as f64 * y / grid.ly);
                    m.amp * (arg + m.phase).cos()
                })
                .sum::<f64>()
    }

    pub fn build(&self, grid: Grid2D) -> ScalarField {
        ScalarField::from_fn(grid, |x, y| self.eval(&grid, x, y))
    }

    /// Upper bound of |f| over the torus.
    pub fn sup_bound(&self) -> f64 {
        self.constant.abs() + self.modes.iter().map(|m| m.amp.abs()).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_matches_closed_form() {
        let g = Grid2D::new(16, 32, 2.0, 4.0).unwrap();
        let f = FieldSpec::constant(1.0).with_mode(0.5, [1, -2], 0.3).build(g);
        let (x, y) = g.coords(37);
        let expect = 1.0 + 0.5 * (PI * x - PI * y + 0.3).cos();
        assert!((f.values[37] - expect).abs() < 1e-14);
    }

    #[test]
    fn unresolved_mode_is_rejected() {
        let g = Grid2D::square(16).unwrap();
        assert!(FieldSpec::default().with_mode(1.0, [5, 0], 0.0).validate(&g).is_ok());
        assert!(FieldSpec::default().with_mode(1.0, [6, 0], 0.0).validate(&g).is_err());
    }
}
