//! p-polynomials with x-dependent Pauli coefficients, and Gaussian symbols
//! exp(β h0) P(p; x) with h0 = a0(x) − |p|²/2.

use super::grid::{Grid2D, PGrid};
use super::phase::PhaseSpaceField;
use super::scalar::{deriv_complex, ScalarField};
use super::spin::PauliField;
use crate::error::{Error, Result};
use crate::pauli::{cross3, dot3, pauli_mul, PauliCoeffs, C64};
use std::f64::consts::PI;

/// Number of monomials p1^m1 p2^m2 with m1 + m2 ≤ dmax.
pub fn mono_count(dmax: usize) -> usize {
    (dmax + 1) * (dmax + 2) / 2
}

pub fn mono_index(m: (usize, usize)) -> usize {
    let d = m.0 + m.1;
    d * (d + 1) / 2 + m.1
}

pub fn mono_of(idx: usize) -> (usize, usize) {
    let mut d = 0;
    while (d + 1) * (d + 2) / 2 <= idx {
        d += 1;
    }
    let m2 = idx - d * (d + 1) / 2;
    (d - m2, m2)
}

/// (n − 1)!! for even n (the Gaussian moment factor), with (−1)!! = 1.
fn odd_double_factorial(n: usize) -> f64 {
    let mut acc = 1.0;
    let mut k = n as i64 - 1;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// ∫ p1^a p2^b exp(−β|p|²/2) dp.
pub fn gaussian_weight(beta: f64, a: usize, b: usize) -> f64 {
    if a % 2 == 1 || b % 2 == 1 {
        return 0.0;
    }
    2.0 * PI / beta * beta.powf(-((a + b) as f64) / 2.0) * odd_double_factorial(a) * odd_double_factorial(b)
}

/// Polynomial Σ_μ c_μ(x) p^μ with Pauli-valued coefficient fields.
#[derive(Clone, Debug)]
pub struct SymbolPoly {
    pub grid: Grid2D,
    pub dmax: usize,
    coeffs: Vec<Option<PauliField>>,
}

fn pauli_field_deriv(grid: &Grid2D, field: &[PauliCoeffs], a: usize, b: usize) -> PauliField {
    let mut out = vec![PauliCoeffs::ZERO; field.len()];
    for k in 0..4 {
        let comp: Vec<C64> = field.iter().map(|c| c.component(k)).collect();
        if comp.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            continue;
        }
        let d = deriv_complex(grid, &comp, a, b);
        for (o, z) in out.iter_mut().zip(d) {
            *o.component_mut(k) = z;
        }
    }
    out
}

fn field_is_zero(f: &[PauliCoeffs]) -> bool {
    f.iter().all(|c| *c == PauliCoeffs::ZERO)
}

impl SymbolPoly {
    pub fn zero(grid: Grid2D, dmax: usize) -> Self {
        Self { grid, dmax, coeffs: vec![None; mono_count(dmax)] }
    }

    /// Single term `field · p^m`.
    pub fn monomial(grid: Grid2D, dmax: usize, m: (usize, usize), field: PauliField) -> Result<Self> {
        let mut out = Self::zero(grid, dmax);
        out.add_term(m, &field)?;
        Ok(out)
    }

    /// Uniform coefficient `c · p^m`.
    pub fn constant(grid: Grid2D, dmax: usize, m: (usize, usize), c: PauliCoeffs) -> Result<Self> {
        Self::monomial(grid, dmax, m, vec![c; grid.len()])
    }

    /// `f(x) σ0 p^m` for a real scalar field.
    pub fn scalar(f: &ScalarField, dmax: usize, m: (usize, usize)) -> Result<Self> {
        let field = f.values.iter().map(|&v| PauliCoeffs::real(v, [0.0; 3])).collect();
        Self::monomial(f.grid, dmax, m, field)
    }

    /// `(v(x)·σ) p^m` for a real vector field.
    pub fn vector(v: [&ScalarField; 3], dmax: usize, m: (usize, usize)) -> Result<Self> {
        let grid = v[0].grid;
        let field =
            (0..grid.len()).map(|i| PauliCoeffs::real(0.0, [v[0].values[i], v[1].values[i], v[2].values[i]])).collect();
        Self::monomial(grid, dmax, m, field)
    }

    pub fn term(&self, m: (usize, usize)) -> Option<&PauliField> {
        self.coeffs.get(mono_index(m)).and_then(|c| c.as_ref())
    }

    /// Iterates over stored (monomial, field) pairs.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), &PauliField)> {
        self.coeffs.iter().enumerate().filter_map(|(i, c)| c.as_ref().map(|f| (mono_of(i), f)))
    }

    pub fn add_term(&mut self, m: (usize, usize), field: &[PauliCoeffs]) -> Result<()> {
        let deg = m.0 + m.1;
        if deg > self.dmax {
            if field_is_zero(field) {
                return Ok(());
            }
            return Err(Error::DegreeOverflow { degree: deg, dmax: self.dmax });
        }
        match &mut self.coeffs[mono_index(m)] {
            Some(existing) => {
                for (a, b) in existing.iter_mut().zip(field) {
                    *a += *b;
                }
            }
            slot @ None => *slot = Some(field.to_vec()),
        }
        Ok(())
    }

    /// Highest degree carrying a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.terms().filter(|(_, f)| !field_is_zero(f)).map(|(m, _)| m.0 + m.1).max()
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn with_dmax(&self, dmax: usize) -> Result<Self> {
        let mut out = Self::zero(self.grid, dmax);
        for (m, f) in self.terms() {
            out.add_term(m, f)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.with_dmax(self.dmax.max(other.dmax))?;
        for (m, f) in other.terms() {
            out.add_term(m, f)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_re(-1.0))
    }

    pub fn map_coeffs<F: Fn(&PauliCoeffs) -> PauliCoeffs>(&self, f: F) -> Self {
        Self {
            grid: self.grid,
            dmax: self.dmax,
            coeffs: self.coeffs.iter().map(|c| c.as_ref().map(|field| field.iter().map(&f).collect())).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map_coeffs(|a| a.scale(c))
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.map_coeffs(|a| a.scale_re(c))
    }

    /// Pointwise multiplication of every coefficient by a real field.
    pub fn mul_field(&self, f: &ScalarField) -> Self {
        Self {
            grid: self.grid,
            dmax: self.dmax,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.as_ref().map(|field| field.iter().zip(&f.values).map(|(a, &v)| a.scale_re(v)).collect()))
                .collect(),
        }
    }

    /// Polynomial product with a custom coefficient product.
    pub fn combine<F>(&self, other: &Self, op: F) -> Result<Self>
    where
        F: Fn(&PauliCoeffs, &PauliCoeffs) -> PauliCoeffs,
    {
        let mut out = Self::zero(self.grid, self.dmax.max(other.dmax));
        for (ma, fa) in self.terms() {
            for (mb, fb) in other.terms() {
                let prod: PauliField = fa.iter().zip(fb).map(|(a, b)| op(a, b)).collect();
                out.add_term((ma.0 + mb.0, ma.1 + mb.1), &prod)?;
            }
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.combine(other, pauli_mul)
    }

    /// Cross product of the σ-parts.
    pub fn cross(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| PauliCoeffs::vector(cross3(&a.v, &b.v)))
    }

    /// Dot product of the σ-parts, returned as a σ0 polynomial.
    pub fn dot(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| PauliCoeffs::scalar(dot3(&a.v, &b.v)))
    }

    /// Multiplication by p_k (k = 0, 1).
    pub fn times_p(&self, k: usize) -> Result<Self> {
        let mut out = Self::zero(self.grid, self.dmax);
        for (m, f) in self.terms() {
            let shifted = if k == 0 { (m.0 + 1, m.1) } else { (m.0, m.1 + 1) };
            out.add_term(shifted, f)?;
        }
        Ok(out)
    }

    /// ∂/∂p_k.
    pub fn dp(&self, k: usize) -> Self {
        let mut out = Self::zero(self.grid, self.dmax);
        for (m, f) in self.terms() {
            let e = if k == 0 { m.0 } else { m.1 };
            if e == 0 {
                continue;
            }
            let lowered = if k == 0 { (m.0 - 1, m.1) } else { (m.0, m.1 - 1) };
            let field: PauliField = f.iter().map(|c| c.scale_re(e as f64)).collect();
            out.add_term(lowered, &field).expect("lowering cannot overflow");
        }
        out
    }

    /// Spectral ∂1^a ∂2^b of every coefficient.
    pub fn dx(&self, a: usize, b: usize) -> Self {
        if a == 0 && b == 0 {
            return self.clone();
        }
        Self {
            grid: self.grid,
            dmax: self.dmax,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.as_ref().map(|field| pauli_field_deriv(&self.grid, field, a, b)))
                .collect(),
        }
    }

    pub fn eval(&self, node: usize, p: (f64, f64)) -> PauliCoeffs {
        let mut acc = PauliCoeffs::ZERO;
        for (m, f) in self.terms() {
            acc += f[node].scale_re(p.0.powi(m.0 as i32) * p.1.powi(m.1 as i32));
        }
        acc
    }

    /// Largest coefficient modulus over all monomials and nodes.
    pub fn max_abs(&self) -> f64 {
        self.terms().flat_map(|(_, f)| f.iter().map(|c| c.max_abs())).fold(0.0, f64::max)
    }
}

/// exp(β h0(x, p)) · P(p; x) with h0 = a0(x) − |p|²/2.
#[derive(Clone, Debug)]
pub struct GaussianSymbol {
    pub beta: f64,
    pub a0: ScalarField,
    pub poly: SymbolPoly,
}

impl GaussianSymbol {
    pub fn new(beta: f64, a0: ScalarField, poly: SymbolPoly) -> Self {
        Self { beta, a0, poly }
    }

    /// exp(β h0) σ0.
    pub fn exp_h0(beta: f64, a0: &ScalarField, dmax: usize) -> Self {
        let poly = SymbolPoly::constant(a0.grid, dmax, (0, 0), PauliCoeffs::IDENTITY).expect("degree 0");
        Self::new(beta, a0.clone(), poly)
    }

    pub fn grid(&self) -> Grid2D {
        self.a0.grid
    }

    pub fn with_poly(&self, poly: SymbolPoly) -> Self {
        Self { beta: self.beta, a0: self.a0.clone(), poly }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(self.with_poly(self.poly.add(&other.poly)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(self.with_poly(self.poly.sub(&other.poly)?))
    }

    pub fn scale(&self, c: C64) -> Self {
        self.with_poly(self.poly.scale(c))
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.with_poly(self.poly.scale_re(c))
    }

    /// f · g with the polynomial on the left.
    pub fn mul_left(&self, f: &SymbolPoly) -> Result<Self> {
        Ok(self.with_poly(f.mul(&self.poly)?))
    }

    /// g · f with the polynomial on the right.
    pub fn mul_right(&self, f: &SymbolPoly) -> Result<Self> {
        Ok(self.with_poly(self.poly.mul(f)?))
    }

    /// ∂/∂p_k: exp(βh0)(∂_k P − β p_k P).
    pub fn dp(&self, k: usize) -> Result<Self> {
        let shifted = self.poly.times_p(k)?.scale_re(-self.beta);
        Ok(self.with_poly(self.poly.dp(k).add(&shifted)?))
    }

    /// ∂/∂x_k: exp(βh0)(∂_k P + β ∂_k a0 P).
    pub fn dx(&self, k: usize) -> Result<Self> {
        let (a, b) = if k == 0 { (1, 0) } else { (0, 1) };
        let da0 = self.a0.deriv_mixed(a, b).scale(self.beta);
        Ok(self.with_poly(self.poly.dx(a, b).add(&self.poly.mul_field(&da0))?))
    }

    /// ∂x^a ∂p^b for multi-indices a, b.
    pub fn derivative(&self, dxm: (usize, usize), dpm: (usize, usize)) -> Result<Self> {
        let mut g = self.clone();
        for _ in 0..dxm.0 {
            g = g.dx(0)?;
        }
        for _ in 0..dxm.1 {
            g = g.dx(1)?;
        }
        for _ in 0..dpm.0 {
            g = g.dp(0)?;
        }
        for _ in 0..dpm.1 {
            g = g.dp(1)?;
        }
        Ok(g)
    }

    /// Exact ∫ p^μ g dp per node.
    pub fn moment(&self, mu: (usize, usize)) -> Result<PauliField> {
        if !(self.beta > 0.0) {
            return Err(Error::Invalid(format!("gaussian moment needs beta > 0, got {}", self.beta)));
        }
        let mut out = vec![PauliCoeffs::ZERO; self.grid().len()];
        for (m, f) in self.poly.terms() {
            let w = gaussian_weight(self.beta, m.0 + mu.0, m.1 + mu.1);
            if w == 0.0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(f) {
                *o += c.scale_re(w);
            }
        }
        for (o, a0) in out.iter_mut().zip(&self.a0.values) {
            *o = o.scale_re((self.beta * a0).exp());
        }
        Ok(out)
    }

    pub fn eval(&self, node: usize, p: (f64, f64)) -> PauliCoeffs {
        let h0 = self.a0.values[node] - 0.5 * (p.0 * p.0 + p.1 * p.1);
        self.poly.eval(node, p).scale_re((self.beta * h0).exp())
    }

    /// Samples the real parts onto a phase-space grid.
    pub fn sample(&self, pgrid: PGrid) -> PhaseSpaceField {
        let grid = self.grid();
        let mut w = PhaseSpaceField::zeros(grid, pgrid);
        let terms: Vec<((usize, usize), &PauliField)> = self.poly.terms().collect();
        let np2 = pgrid.len();
        for ix in 0..grid.len() {
            let e0 = (self.beta * self.a0.values[ix]).exp();
            for ip in 0..np2 {
                let (p1, p2) = pgrid.momentum(ip);
                let g = (-0.5 * self.beta * (p1 * p1 + p2 * p2)).exp() * e0;
                let mut acc = [0.0; 4];
                for (m, f) in &terms {
                    let mono = p1.powi(m.0 as i32) * p2.powi(m.1 as i32) * g;
                    let c = f[ix].re();
                    for k in 0..4 {
                        acc[k] += c[k] * mono;
                    }
                }
                for k in 0..4 {
                    w.comps[k][ix * np2 + ip] = acc[k];
                }
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2D {
        Grid2D::square(16).unwrap()
    }

    #[test]
    fn monomial_indexing_round_trips() {
        for idx in 0..mono_count(6) {
            assert_eq!(mono_index(mono_of(idx)), idx);
        }
    }

    #[test]
    fn gaussian_moments() {
        let g = GaussianSymbol::exp_h0(1.0, &ScalarField::zeros(grid()), 6);
        let m0 = g.moment((0, 0)).unwrap();
        assert!((m0[3].s.re - 2.0 * PI).abs() < 1e-13);
        assert!(g.moment((1, 0)).unwrap()[0].max_abs() == 0.0);
        let p1sq = g.mul_left(&SymbolPoly::constant(grid(), 6, (2, 0), PauliCoeffs::IDENTITY).unwrap()).unwrap();
        assert!((p1sq.moment((0, 0)).unwrap()[5].s.re - 2.0 * PI).abs() < 1e-13);
        assert!(g.with_poly(g.poly.clone()).scale_re(1.0).moment((0, 0)).is_ok());
        let bad = GaussianSymbol { beta: 0.0, ..g };
        assert!(bad.moment((0, 0)).is_err());
    }

    #[test]
    fn chain_rules() {
        let a0 = ScalarField::from_fn(grid(), |x, y| 0.3 * x.cos() + 0.1 * y.sin());
        let g = GaussianSymbol::exp_h0(0.7, &a0, 6);
        let dp = g.dp(0).unwrap();
        let node = 37;
        let p = (0.4, -1.1);
        assert!((dp.eval(node, p) - g.eval(node, p).scale_re(-0.7 * p.0)).max_abs() < 1e-14);
        let dx = g.dx(0).unwrap();
        let da0 = a0.dx1().values[node];
        assert!((dx.eval(node, p) - g.eval(node, p).scale_re(0.7 * da0)).max_abs() < 1e-13);
    }

    #[test]
    fn p_derivative_integrates_to_zero() {
        let a0 = ScalarField::from_fn(grid(), |x, _| 0.2 * x.sin());
        let poly = SymbolPoly::constant(grid(), 6, (2, 1), PauliCoeffs::real(1.0, [0.5, 0.0, -1.0]))
            .unwrap()
            .add(&SymbolPoly::constant(grid(), 6, (0, 1), PauliCoeffs::real(0.3, [0.0; 3])).unwrap())
            .unwrap();
        let g = GaussianSymbol::new(1.0, a0, poly);
        for k in 0..2 {
            let m = g.dp(k).unwrap().moment((0, 0)).unwrap();
            assert!(m.iter().all(|c| c.max_abs() < 1e-13));
        }
    }

    #[test]
    fn overflow_is_an_error() {
        let p = SymbolPoly::constant(grid(), 2, (2, 0), PauliCoeffs::IDENTITY).unwrap();
        assert!(matches!(p.times_p(1), Err(Error::DegreeOverflow { .. })));
    }
}
