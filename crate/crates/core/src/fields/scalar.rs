use super::fft::{mode_index, Fft2};
use super::grid::Grid2D;
use crate::pauli::C64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// Real samples of a function on a periodic grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
}

/// Forward transform of real samples.
pub fn spectrum_of(grid: &Grid2D, values: &[f64]) -> Vec<C64> {
    let mut data: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
    Fft2::get(grid.nx, grid.ny).forward(&mut data, &mut Vec::new());
    data
}

/// Inverse transform keeping the real part.
pub fn real_from_spectrum(grid: &Grid2D, mut data: Vec<C64>) -> Vec<f64> {
    Fft2::get(grid.nx, grid.ny).inverse(&mut data, &mut Vec::new());
    data.into_iter().map(|z| z.re).collect()
}

/// Multiplies the spectrum of complex samples by `m(k1, k2)` and transforms back.
pub fn apply_multiplier_complex<F>(grid: &Grid2D, values: &[C64], m: F) -> Vec<C64>
where
    F: Fn(f64, f64) -> C64,
{
    let fft = Fft2::get(grid.nx, grid.ny);
    let mut data = values.to_vec();
    let mut scratch = Vec::new();
    fft.forward(&mut data, &mut scratch);
    let (k1, k2) = (grid.k1(), grid.k2());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            data[i + grid.nx * j] *= m(k1[i], k2[j]);
        }
    }
    fft.inverse(&mut data, &mut scratch);
    data
}

/// Spectral ∂1^a ∂2^b of complex samples.
pub fn deriv_complex(grid: &Grid2D, values: &[C64], a: usize, b: usize) -> Vec<C64> {
    if a == 0 && b == 0 {
        return values.to_vec();
    }
    let i = C64::new(0.0, 1.0);
    apply_multiplier_complex(grid, values, |k1, k2| (i * k1).powi(a as i32) * (i * k2).powi(b as i32))
}

impl ScalarField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "field length does not match grid");
        Self { grid, values }
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: Grid2D, f: F) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (x, y) = grid.coords(idx);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add_scaled(&mut self, c: f64, other: &Self) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Continuous L² norm, sqrt(∫ f² dx).
    pub fn l2(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn spectrum(&self) -> Vec<C64> {
        spectrum_of(&self.grid, &self.values)
    }

    fn apply_multiplier<F: Fn(f64, f64) -> C64>(&self, m: F) -> Self {
        let mut data = self.spectrum();
        let (k1, k2) = (self.grid.k1(), self.grid.k2());
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                data[i + self.grid.nx * j] *= m(k1[i], k2[j]);
            }
        }
        Self { grid: self.grid, values: real_from_spectrum(&self.grid, data) }
    }

    /// Spectral ∂1^a ∂2^b.
    pub fn deriv_mixed(&self, a: usize, b: usize) -> Self {
        let i = C64::new(0.0, 1.0);
        self.apply_multiplier(|k1, k2| (i * k1).powi(a as i32) * (i * k2).powi(b as i32))
    }

    pub fn deriv(&self, axis: Axis) -> Self {
        match axis {
            Axis::X1 => self.deriv_mixed(1, 0),
            Axis::X2 => self.deriv_mixed(0, 1),
        }
    }

    pub fn dx1(&self) -> Self {
        self.deriv_mixed(1, 0)
    }

    pub fn dx2(&self) -> Self {
        self.deriv_mixed(0, 1)
    }

    pub fn laplacian(&self) -> Self {
        self.apply_multiplier(|k1, k2| C64::new(-(k1 * k1 + k2 * k2), 0.0))
    }

    pub fn bilaplacian(&self) -> Self {
        self.apply_multiplier(|k1, k2| C64::new((k1 * k1 + k2 * k2).powi(2), 0.0))
    }

    pub fn grad(&self) -> [Self; 2] {
        [self.dx1(), self.dx2()]
    }

    /// ∇⊥f = (∂2 f, −∂1 f, 0).
    pub fn grad_perp(&self) -> [Self; 3] {
        [self.dx2(), self.dx1().scale(-1.0), Self::zeros(self.grid)]
    }

    /// Hessian `[[∂11, ∂12], [∂12, ∂22]]`.
    pub fn hessian(&self) -> [[Self; 2]; 2] {
        let h12 = self.deriv_mixed(1, 1);
        [[self.deriv_mixed(2, 0), h12.clone()], [h12, self.deriv_mixed(0, 2)]]
    }

    /// 2/3-rule filter: modes with 3|m| ≥ n on either axis are removed.
    pub fn dealias(&self) -> Self {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut data = self.spectrum();
        for j in 0..ny {
            let mj = mode_index(j, ny).unsigned_abs() as usize;
            for i in 0..nx {
                let mi = mode_index(i, nx).unsigned_abs() as usize;
                if 3 * mi >= nx || 3 * mj >= ny {
                    data[i + nx * j] = C64::new(0.0, 0.0);
                }
            }
        }
        Self { grid: self.grid, values: real_from_spectrum(&self.grid, data) }
    }

    /// Ratio of the largest spectral amplitude in the outer sixth of the spectrum to the largest overall.
    pub fn spectral_tail(&self) -> f64 {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let data = self.spectrum();
        let mut tail: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for j in 0..ny {
            let mj = mode_index(j, ny).unsigned_abs() as usize;
            for i in 0..nx {
                let mi = mode_index(i, nx).unsigned_abs() as usize;
                let a = data[i + nx * j].norm();
                peak = peak.max(a);
                if 12 * mi >= 5 * nx || 12 * mj >= 5 * ny {
                    tail = tail.max(a);
                }
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            tail / peak
        }
    }

    /// Values at `x + shift` by trigonometric interpolation.
    pub fn shifted(&self, shift: [f64; 2]) -> Self {
        self.apply_multiplier(|k1, k2| C64::from_polar(1.0, k1 * shift[0] + k2 * shift[1]))
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, o: &ScalarField) -> ScalarField {
        self.zip_map(o, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, o: &ScalarField) -> ScalarField {
        self.zip_map(o, |a, b| a - b)
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, o: &ScalarField) -> ScalarField {
        self.zip_map(o, |a, b| a * b)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, c: f64) -> ScalarField {
        self.scale(c)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_derivative() {
        let g = Grid2D::new(32, 16, 3.0, 2.0).unwrap();
        let f = ScalarField::from_fn(g, |x, _| (2.0 * PI * x / 3.0).sin());
        let df = f.dx1();
        let exact = ScalarField::from_fn(g, |x, _| 2.0 * PI / 3.0 * (2.0 * PI * x / 3.0).cos());
        assert!((&df - &exact).max_abs() < 1e-10);
        assert!(f.dx2().max_abs() < 1e-12);
    }

    #[test]
    fn constant_has_zero_derivatives() {
        let g = Grid2D::square(16).unwrap();
        let f = ScalarField::constant(g, 3.5);
        assert!(f.laplacian().max_abs() < 1e-13);
        assert!(f.hessian()[0][1].max_abs() < 1e-13);
        assert!(f.grad_perp()[0].max_abs() < 1e-13);
    }

    #[test]
    fn shift_matches_analytic() {
        let g = Grid2D::square(16).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (x + 2.0 * y).cos());
        let s = f.shifted([0.3, -0.7]);
        let exact = ScalarField::from_fn(g, |x, y| (x + 0.3 + 2.0 * (y - 0.7)).cos());
        assert!((&s - &exact).max_abs() < 1e-12);
    }

    #[test]
    fn dealias_keeps_low_modes() {
        let g = Grid2D::square(32).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (3.0 * x).sin() * (2.0 * y).cos() + (12.0 * x).cos());
        let low = ScalarField::from_fn(g, |x, y| (3.0 * x).sin() * (2.0 * y).cos());
        assert!((&f.dealias() - &low).max_abs() < 1e-13);
    }
}
