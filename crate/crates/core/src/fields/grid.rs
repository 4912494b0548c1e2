use super::fft::wavenumbers;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Periodic rectangular grid, node `(i, j)` at `(i lx / nx, j ly / ny)`, stored row-major with `i` fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 16 || !n.is_power_of_two() {
                return Err(Error::Grid(format!("{name} = {n} must be a power of two >= 16")));
            }
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(Error::Grid(format!("domain lengths must be positive, got {lx} x {ly}")));
        }
        Ok(Self { nx, ny, lx, ly })
    }

    /// Square `n × n` grid on `[0, 2π)²`.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n, 2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let (i, j) = (idx % self.nx, idx / self.nx);
        (i as f64 * self.hx(), j as f64 * self.hy())
    }

    pub fn k1(&self) -> Vec<f64> {
        wavenumbers(self.nx, self.lx)
    }

    pub fn k2(&self) -> Vec<f64> {
        wavenumbers(self.ny, self.ly)
    }

    /// Largest resolved angular wavenumber.
    pub fn kmax(&self) -> f64 {
        let a = std::f64::consts::PI * self.nx as f64 / self.lx;
        let b = std::f64::consts::PI * self.ny as f64 / self.ly;
        a.max(b)
    }
}

/// Uniform momentum grid on `[-pmax, pmax)²` with `np` nodes per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PGrid {
    pub np: usize,
    pub pmax: f64,
}

impl PGrid {
    pub fn new(np: usize, pmax: f64) -> Result<Self> {
        if np < 8 || !np.is_multiple_of(2) {
            return Err(Error::Grid(format!("np = {np} must be even and >= 8")));
        }
        if !(pmax > 0.0) {
            return Err(Error::Grid(format!("pmax = {pmax} must be positive")));
        }
        Ok(Self { np, pmax })
    }

    pub fn len(&self) -> usize {
        self.np * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dp(&self) -> f64 {
        2.0 * self.pmax / self.np as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dp() * self.dp()
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.pmax + i as f64 * self.dp()
    }

    /// Momentum `(p1, p2)` of flat node `idx` (p1 fastest).
    pub fn momentum(&self, idx: usize) -> (f64, f64) {
        (self.node(idx % self.np), self.node(idx / self.np))
    }

    /// Dual wavenumbers of the p-axis in FFT order, Nyquist set to zero.
    pub fn eta(&self) -> Vec<f64> {
        wavenumbers(self.np, 2.0 * self.pmax)
    }

    /// True for nodes within `width` cells of the box boundary.
    pub fn is_boundary(&self, idx: usize, width: usize) -> bool {
        let (i, j) = (idx % self.np, idx / self.np);
        let near = |m: usize| m < width || m + width >= self.np;
        near(i) || near(j)
    }
}
