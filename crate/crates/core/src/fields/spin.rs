use super::grid::Grid2D;
use super::scalar::ScalarField;
use crate::error::{Error, Result};
use crate::pauli::PauliCoeffs;
use serde::{Deserialize, Serialize};

/// Per-node Pauli coefficients on a spatial grid.
pub type PauliField = Vec<PauliCoeffs>;

/// Macroscopic state N = n0 σ0 + ε n·σ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinField {
    pub n0: ScalarField,
    pub n: [ScalarField; 3],
    pub eps: f64,
}

impl SpinField {
    pub fn new(n0: ScalarField, n: [ScalarField; 3], eps: f64) -> Self {
        Self { n0, n, eps }
    }

    pub fn spinless(n0: ScalarField, eps: f64) -> Self {
        let z = ScalarField::zeros(n0.grid);
        Self { n: [z.clone(), z.clone(), z], n0, eps }
    }

    pub fn grid(&self) -> Grid2D {
        self.n0.grid
    }

    /// Pointwise |n|.
    pub fn spin_magnitude(&self) -> ScalarField {
        let [a, b, c] = &self.n;
        ScalarField::new(
            self.grid(),
            (0..self.grid().len())
                .map(|i| (a.values[i].powi(2) + b.values[i].powi(2) + c.values[i].powi(2)).sqrt())
                .collect(),
        )
    }

    /// max |n| / n0.
    pub fn max_spin_ratio(&self) -> f64 {
        let m = self.spin_magnitude();
        m.values.iter().zip(&self.n0.values).map(|(a, b)| a / b).fold(0.0, f64::max)
    }

    /// True iff ε|n| < n0 everywhere (N positive definite).
    pub fn is_physical(&self) -> bool {
        let m = self.spin_magnitude();
        m.values.iter().zip(&self.n0.values).all(|(a, &b)| b > 0.0 && self.eps * a < b)
    }

    pub fn check_physical(&self) -> Result<()> {
        if !self.n0.is_finite() || self.n.iter().any(|f| !f.is_finite()) {
            return Err(Error::NonPhysical("non-finite density".into()));
        }
        let m = self.spin_magnitude();
        for (idx, (a, &b)) in m.values.iter().zip(&self.n0.values).enumerate() {
            if !(b > 0.0 && self.eps * a < b) {
                let (x, y) = self.grid().coords(idx);
                return Err(Error::NonPhysical(format!(
                    "eps|n| = {:.3e} >= n0 = {:.3e} at ({x:.3}, {y:.3})",
                    self.eps * a,
                    b
                )));
            }
        }
        Ok(())
    }

    /// N as Pauli coefficients per node.
    pub fn to_pauli(&self) -> PauliField {
        (0..self.grid().len())
            .map(|i| {
                PauliCoeffs::real(
                    self.n0.values[i],
                    [self.eps * self.n[0].values[i], self.eps * self.n[1].values[i], self.eps * self.n[2].values[i]],
                )
            })
            .collect()
    }

    /// Components (n0, n1, n2, n3) as a flat list.
    pub fn components(&self) -> [&ScalarField; 4] {
        [&self.n0, &self.n[0], &self.n[1], &self.n[2]]
    }

    pub fn from_components(c: [ScalarField; 4], eps: f64) -> Self {
        let [n0, n1, n2, n3] = c;
        Self { n0, n: [n1, n2, n3], eps }
    }
}

/// Extracts the real part of component `k` of a Pauli field.
pub fn pauli_component(field: &[PauliCoeffs], grid: Grid2D, k: usize) -> ScalarField {
    ScalarField::new(grid, field.iter().map(|c| c.component(k).re).collect())
}

/// Pointwise a × b of 3-vector fields.
pub fn cross_fields(a: &[ScalarField; 3], b: &[ScalarField; 3]) -> [ScalarField; 3] {
    [&(&a[1] * &b[2]) - &(&a[2] * &b[1]), &(&a[2] * &b[0]) - &(&a[0] * &b[2]), &(&a[0] * &b[1]) - &(&a[1] * &b[0])]
}
