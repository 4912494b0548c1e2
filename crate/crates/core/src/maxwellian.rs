//! Semiclassical quantum Maxwellian: closed-form orders g⁽⁰⁾…g⁽³⁾, the
//! moment-to-multiplier closure and derived currents.

use crate::error::{Error, Result};
use crate::fields::{
    cross_fields, pauli_component, GaussianSymbol, Grid2D, PauliField, ScalarField, SpinField, SymbolPoly,
};
use crate::moyal::{moyal_j, MoyalOrder};
use crate::pauli::{exp_spin, PauliCoeffs};
use serde::{Deserialize, Serialize};

pub const DMAX: usize = 6;

/// Lagrange multipliers a0 = a0⁽⁰⁾ + ε² a0⁽²⁾ and a = a⁽⁰⁾ + ε² a⁽²⁾.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplierField {
    pub a0_0: ScalarField,
    pub a0_2: ScalarField,
    pub avec_0: [ScalarField; 3],
    pub avec_2: [ScalarField; 3],
    pub eps: f64,
    pub alpha: f64,
}

impl MultiplierField {
    /// Leading-order multipliers only (ε² corrections set to zero).
    pub fn leading(a0: ScalarField, avec: [ScalarField; 3], eps: f64, alpha: f64) -> Self {
        let z = ScalarField::zeros(a0.grid);
        Self { a0_2: z.clone(), avec_2: [z.clone(), z.clone(), z], a0_0: a0, avec_0: avec, eps, alpha }
    }

    pub fn grid(&self) -> Grid2D {
        self.a0_0.grid
    }

    pub fn a0(&self) -> ScalarField {
        let mut out = self.a0_0.clone();
        out.add_scaled(self.eps * self.eps, &self.a0_2);
        out
    }

    pub fn avec(&self) -> [ScalarField; 3] {
        let e2 = self.eps * self.eps;
        [0, 1, 2].map(|k| {
            let mut out = self.avec_0[k].clone();
            out.add_scaled(e2, &self.avec_2[k]);
            out
        })
    }

    /// Copy with the ε² corrections dropped.
    pub fn without_corrections(&self) -> Self {
        Self::leading(self.a0_0.clone(), self.avec_0.clone(), self.eps, self.alpha)
    }
}

/// Order-k coefficient written as exp(β h0) Σ_m β^m P_m(p; x).
#[derive(Clone, Debug)]
pub struct BetaSeries {
    pub a0: ScalarField,
    pub terms: Vec<(u32, SymbolPoly)>,
}

impl BetaSeries {
    pub fn at(&self, beta: f64) -> Result<GaussianSymbol> {
        let mut acc = SymbolPoly::zero(self.a0.grid, DMAX);
        for (m, p) in &self.terms {
            acc = acc.add(&p.scale_re(beta.powi(*m as i32)))?;
        }
        Ok(GaussianSymbol::new(beta, self.a0.clone(), acc))
    }

    /// ∂β of the series: exp(βh0)(h0 Σ β^m P_m + Σ m β^{m−1} P_m).
    pub fn d_beta(&self, beta: f64) -> Result<GaussianSymbol> {
        let h0 = h0_poly(&self.a0)?;
        let value = self.at(beta)?;
        let mut acc = h0.mul(&value.poly)?;
        for (m, p) in &self.terms {
            if *m > 0 {
                acc = acc.add(&p.scale_re(*m as f64 * beta.powi(*m as i32 - 1)))?;
            }
        }
        Ok(GaussianSymbol::new(beta, self.a0.clone(), acc))
    }
}

/// h0 σ0 = (a0 − |p|²/2) σ0.
pub fn h0_poly(a0: &ScalarField) -> Result<SymbolPoly> {
    let g = a0.grid;
    SymbolPoly::scalar(a0, DMAX, (0, 0))?
        .add(&SymbolPoly::constant(g, DMAX, (2, 0), PauliCoeffs::real(-0.5, [0.0; 3]))?)?
        .add(&SymbolPoly::constant(g, DMAX, (0, 2), PauliCoeffs::real(-0.5, [0.0; 3]))?)
}

/// h1·σ = (a − α p⊥)·σ with p⊥ = (p2, −p1, 0).
pub fn h1_poly(avec: &[ScalarField; 3], alpha: f64) -> Result<SymbolPoly> {
    let g = avec[0].grid;
    SymbolPoly::vector([&avec[0], &avec[1], &avec[2]], DMAX, (0, 0))?
        .add(&SymbolPoly::constant(g, DMAX, (1, 0), PauliCoeffs::real(0.0, [0.0, alpha, 0.0]))?)?
        .add(&SymbolPoly::constant(g, DMAX, (0, 1), PauliCoeffs::real(0.0, [-alpha, 0.0, 0.0]))?)
}

fn vec_poly(v: [ScalarField; 3], m: (usize, usize)) -> Result<SymbolPoly> {
    SymbolPoly::vector([&v[0], &v[1], &v[2]], DMAX, m)
}

/// Closed-form g⁽ᵏ⁾ as a β-series for k = 0..=3.
pub fn g_series(k: usize, a0: &ScalarField, avec: &[ScalarField; 3], alpha: f64) -> Result<BetaSeries> {
    let grid = a0.grid;
    let id = |m| SymbolPoly::constant(grid, DMAX, m, PauliCoeffs::IDENTITY);
    let terms = match k {
        0 => vec![(0, id((0, 0))?)],
        1 => vec![(1, h1_poly(avec, alpha)?)],
        2 | 3 => {
            let h1 = h1_poly(avec, alpha)?;
            let h1sq = h1.dot(&h1)?;
            let [g1, g2] = a0.grad();
            let hess = a0.hessian();
            let lap = a0.laplacian();
            // X = |∇a0|² − pᵀ(∇⊗∇a0)p
            let grad_sq = &(&g1 * &g1) + &(&g2 * &g2);
            let x_poly = SymbolPoly::scalar(&grad_sq, DMAX, (0, 0))?
                .sub(&SymbolPoly::scalar(&hess[0][0], DMAX, (2, 0))?)?
                .sub(&SymbolPoly::scalar(&hess[0][1].scale(2.0), DMAX, (1, 1))?)?
                .sub(&SymbolPoly::scalar(&hess[1][1], DMAX, (0, 2))?)?;
            if k == 2 {
                let base = SymbolPoly::scalar(&lap, DMAX, (0, 0))?.add(&h1sq.scale_re(4.0))?;
                vec![(2, base.scale_re(1.0 / 8.0)), (3, x_poly.scale_re(1.0 / 24.0))]
            } else {
                g3_terms(a0, avec, alpha, &h1, &h1sq, &x_poly, &lap)?
            }
        }
        _ => return Err(Error::Invalid(format!("Maxwellian order {k} not available"))),
    };
    Ok(BetaSeries { a0: a0.clone(), terms })
}

fn g3_terms(
    a0: &ScalarField,
    a: &[ScalarField; 3],
    alpha: f64,
    h1: &SymbolPoly,
    h1sq: &SymbolPoly,
    x_poly: &SymbolPoly,
    lap_a0: &ScalarField,
) -> Result<Vec<(u32, SymbolPoly)>> {
    let da: [[ScalarField; 2]; 3] = [0, 1, 2].map(|j| a[j].grad());
    let [d1a0, d2a0] = a0.grad();
    let ha0 = a0.hessian();

    // β² terms: 3Δa − 12α ∇⊥×a, with ∇⊥×a = (−∂1a3, −∂2a3, ∂1a1 + ∂2a2)
    let lap_a = [0, 1, 2].map(|j| a[j].laplacian().scale(3.0));
    let curl = [da[2][0].scale(-1.0), da[2][1].scale(-1.0), &da[0][0] + &da[1][1]];
    let beta2 = vec_poly([0, 1, 2].map(|j| &lap_a[j] - &curl[j].scale(12.0 * alpha)), (0, 0))?;

    // β³ terms: 3Δa0 h1 + 4|h1|² h1 + Y + 4 Z×h1
    let lap_h1 = h1.mul_field(&lap_a0.scale(3.0));
    let cubic = h1sq.mul(h1)?.scale_re(4.0);
    // Y = 2∇a·∇a0 − pᵀ(∇⊗∇a)p − 2α∇⊥(∇a0·p)
    let grad_dot = [0, 1, 2].map(|j| (&(&da[j][0] * &d1a0) + &(&da[j][1] * &d2a0)).scale(2.0));
    let mut y = vec_poly(grad_dot, (0, 0))?;
    for j in 0..3 {
        let h = a[j].hessian();
        let mut c = [ScalarField::zeros(a0.grid), ScalarField::zeros(a0.grid), ScalarField::zeros(a0.grid)];
        for (m, field) in [((2, 0), h[0][0].clone()), ((1, 1), h[0][1].scale(2.0)), ((0, 2), h[1][1].clone())] {
            c[j] = field.scale(-1.0);
            y = y.add(&vec_poly(c.clone(), m)?)?;
        }
    }
    // ∇⊥(∇a0·p) = (Σ_l p_l ∂2∂l a0, −Σ_l p_l ∂1∂l a0, 0)
    let z0 = ScalarField::zeros(a0.grid);
    for l in 0..2 {
        let m = if l == 0 { (1, 0) } else { (0, 1) };
        let comp = [ha0[1][l].scale(-2.0 * alpha), ha0[0][l].scale(2.0 * alpha), z0.clone()];
        y = y.add(&vec_poly(comp, m)?)?;
    }
    // Z = (∇a)p − α∇⊥a0
    let mut z = vec_poly([d2a0.scale(-alpha), d1a0.scale(alpha), z0.clone()], (0, 0))?;
    for l in 0..2 {
        let m = if l == 0 { (1, 0) } else { (0, 1) };
        z = z.add(&vec_poly([da[0][l].clone(), da[1][l].clone(), da[2][l].clone()], m)?)?;
    }
    let zxh = z.cross(h1)?.scale_re(4.0);
    let beta3 = lap_h1.add(&cubic)?.add(&y)?.add(&zxh)?;

    // β⁴ terms: X h1
    let beta4 = x_poly.mul(h1)?;
    Ok(vec![(2, beta2.scale_re(1.0 / 24.0)), (3, beta3.scale_re(1.0 / 24.0)), (4, beta4.scale_re(1.0 / 24.0))])
}

/// g⁽ᵏ⁾(β) as a Gaussian symbol.
pub fn g_order(k: usize, beta: f64, a0: &ScalarField, avec: &[ScalarField; 3], alpha: f64) -> Result<GaussianSymbol> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Invalid(format!("beta = {beta} outside (0, 1]")));
    }
    g_series(k, a0, avec, alpha)?.at(beta)
}

/// sup over β samples, nodes and monomials of
/// ∂β g⁽ᵏ⁾ − Σ_{ℓ≤k} h0σ0 #_ℓ g⁽ᵏ⁻ℓ⁾ − Σ_{ℓ≤k−1} (h1·σ) #_ℓ g⁽ᵏ⁻ℓ⁻¹⁾.
pub fn recursion_residual(
    k: usize,
    betas: &[f64],
    a0: &ScalarField,
    avec: &[ScalarField; 3],
    alpha: f64,
) -> Result<f64> {
    if !(1..=3).contains(&k) {
        return Err(Error::Invalid(format!("recursion order {k} outside 1..=3")));
    }
    let h0 = h0_poly(a0)?;
    let h1 = h1_poly(avec, alpha)?;
    let series: Vec<BetaSeries> = (0..=k).map(|m| g_series(m, a0, avec, alpha)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for &beta in betas {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Invalid(format!("beta = {beta} outside (0, 1]")));
        }
        let g: Vec<GaussianSymbol> = series.iter().map(|s| s.at(beta)).collect::<Result<_>>()?;
        let mut res = series[k].d_beta(beta)?.poly;
        for l in 0..=k {
            let order = MoyalOrder::new(l as u8)?;
            res = res.sub(&moyal_j(&h0, &g[k - l], order)?.poly)?;
            if l < k {
                res = res.sub(&moyal_j(&h1, &g[k - l - 1], order)?.poly)?;
            }
        }
        worst = worst.max(res.max_abs());
    }
    Ok(worst)
}

/// Σ_{k ≤ order} ε^k g⁽ᵏ⁾(1) with the assembled multipliers.
pub fn maxwellian(mult: &MultiplierField, order: usize) -> Result<GaussianSymbol> {
    if order > 3 {
        return Err(Error::Invalid(format!("Maxwellian order {order} > 3")));
    }
    let a0 = mult.a0();
    let avec = mult.avec();
    let mut acc = SymbolPoly::zero(a0.grid, DMAX);
    for k in 0..=order {
        let gk = g_series(k, &a0, &avec, mult.alpha)?.at(1.0)?;
        acc = acc.add(&gk.poly.scale_re(mult.eps.powi(k as i32)))?;
    }
    Ok(GaussianSymbol::new(1.0, a0, acc))
}

/// Leading-order Maxwellian for an O(1) spin multiplier:
/// exp(h0)(cosh|a| σ0 + sinh|a| â·σ).
pub fn maxwellian_leading_spin(a0: &ScalarField, avec: &[ScalarField; 3]) -> Result<GaussianSymbol> {
    let field: PauliField =
        (0..a0.grid.len()).map(|i| exp_spin(1.0, [avec[0].values[i], avec[1].values[i], avec[2].values[i]])).collect();
    Ok(GaussianSymbol::new(1.0, a0.clone(), SymbolPoly::monomial(a0.grid, DMAX, (0, 0), field)?))
}

/// Newton solve of sinh(r) = target for r ≥ 0, starting from r0.
pub fn solve_leading_spin_magnitude(target: f64, r0: f64) -> f64 {
    let mut r = r0;
    for _ in 0..100 {
        let step = (r.sinh() - target) / r.cosh();
        r -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    r.abs()
}

fn floored(n0: &ScalarField) -> ScalarField {
    let floor = 1e-8 * n0.max();
    n0.map(|v| v.max(floor))
}

/// ∇⊥×v = (−∂1 v3, −∂2 v3, ∂1 v1 + ∂2 v2).
pub fn curl_perp(v: &[ScalarField; 3]) -> [ScalarField; 3] {
    [v[2].dx1().scale(-1.0), v[2].dx2().scale(-1.0), &v[0].dx1() + &v[1].dx2()]
}

/// Rashba part of the spin multiplier correction a⁽²⁾.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinClosure {
    /// (α/(6n0))(2∇⊥×n − ∇⊥n0×n/n0): cancels the spin moment of M⁽³⁾.
    #[default]
    Consistent,
    /// (α/(6n0))(4∇⊥×n + ∇⊥n0×n/n0): leaves an O(ε³) spin round-trip error.
    Alternative,
}

/// Semiclassical multipliers from the moments (n0, n).
pub fn multipliers_from_moments(n: &SpinField, alpha: f64) -> Result<MultiplierField> {
    multipliers_with_closure(n, alpha, SpinClosure::Consistent)
}

pub fn multipliers_with_closure(n: &SpinField, alpha: f64, closure: SpinClosure) -> Result<MultiplierField> {
    n.check_physical()?;
    let n0 = floored(&n.n0);
    let inv = n0.map(|v| 1.0 / v);
    let [g1, g2] = n.n0.grad();
    let lap0 = n.n0.laplacian();
    let b: [ScalarField; 3] = [0, 1, 2].map(|k| &n.n[k] * &inv);
    let b_sq = &(&(&b[0] * &b[0]) + &(&b[1] * &b[1])) + &(&b[2] * &b[2]);
    let grad_sq = &(&g1 * &g1) + &(&g2 * &g2);
    let inv2 = &inv * &inv;

    let a0_0 = n0.map(|v| (v / (2.0 * std::f64::consts::PI)).ln());
    let bracket = &(&(&lap0 * &inv) - &(&grad_sq * &inv2).scale(0.5)).scale(1.0 / 12.0) + &b_sq.scale(0.5);
    let a0_2 = bracket.map(|v| -(v + alpha * alpha));

    // (1/(12 n0)) {(Δn0/n0 − |∇n0/n0|² + 4|b|² + 8α²) n + 4α² n⊥⊥}
    let factor = (&(&(&lap0 * &inv) - &(&grad_sq * &inv2)) + &b_sq.scale(4.0)).map(|v| v + 8.0 * alpha * alpha);
    let nperp = [n.n[0].scale(-1.0), n.n[1].scale(-1.0), ScalarField::zeros(n0.grid)];
    let curl = curl_perp(&n.n);
    let gperp = [g2.clone(), g1.scale(-1.0), ScalarField::zeros(n0.grid)];
    let gperp_x_n = cross_fields(&gperp, &n.n);
    let avec_2 = [0, 1, 2].map(|j| {
        let local = (&(&factor * &n.n[j]) + &nperp[j].scale(4.0 * alpha * alpha)).zip_map(&inv, |a, i| a * i / 12.0);
        let grad_dot = &(&n.n[j].dx1() * &g1) + &(&n.n[j].dx2() * &g2);
        let diff = (&(&n.n[j].laplacian() * &inv) - &(&grad_dot * &inv2)).scale(-1.0 / 12.0);
        let (c_curl, c_grad) = match closure {
            SpinClosure::Consistent => (2.0, -1.0),
            SpinClosure::Alternative => (4.0, 1.0),
        };
        let rashba =
            (&curl[j].scale(c_curl) + &(&gperp_x_n[j] * &inv).scale(c_grad)).zip_map(&inv, |a, i| alpha * a * i / 6.0);
        &(&local + &diff) + &rashba
    });
    Ok(MultiplierField { a0_0, a0_2, avec_0: b, avec_2, eps: n.eps, alpha })
}

/// Charge and spin moments of a Gaussian symbol, with the spin part divided by ε.
pub fn moments_of(m: &GaussianSymbol, eps: f64) -> Result<SpinField> {
    let mom = m.moment((0, 0))?;
    let g = m.grid();
    let n0 = pauli_component(&mom, g, 0);
    let scale = if eps > 0.0 { 1.0 / eps } else { 1.0 };
    let n = [1, 2, 3].map(|k| pauli_component(&mom, g, k).scale(scale));
    Ok(SpinField::new(n0, n, eps))
}

/// J = ⟨p M⟩ split into charge flux, spin flux J_jk = ⟨p_k M_j⟩ and ⟨p⊥·M⟩.
#[derive(Clone, Debug)]
pub struct CurrentDensity {
    pub charge: [ScalarField; 2],
    pub spin: [[ScalarField; 2]; 3],
    pub p_perp_dot: ScalarField,
}

pub fn current_density(mult: &MultiplierField, order: usize) -> Result<CurrentDensity> {
    let m = maxwellian(mult, order)?;
    let g = mult.grid();
    let first = [m.moment((1, 0))?, m.moment((0, 1))?];
    let charge = [0, 1].map(|k| pauli_component(&first[k], g, 0));
    let spin = [1, 2, 3].map(|j| [0, 1].map(|k| pauli_component(&first[k], g, j)));
    // p⊥·M = p2 M1 − p1 M2
    let p_perp_dot = &spin[0][1] - &spin[1][0];
    Ok(CurrentDensity { charge, spin, p_perp_dot })
}

/// 2ε (n × a) with the closure multipliers.
pub fn residual_current(n: &SpinField, alpha: f64) -> Result<[ScalarField; 3]> {
    let mult = multipliers_from_moments(n, alpha)?;
    let a = mult.avec();
    Ok(cross_fields(&n.n, &a).map(|f| f.scale(2.0 * n.eps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2D {
        Grid2D::square(16).unwrap()
    }

    #[test]
    fn order_zero_is_plain_gaussian() {
        let z = ScalarField::zeros(grid());
        let g = g_order(0, 1.0, &z, &[z.clone(), z.clone(), z.clone()], 0.3).unwrap();
        assert!((g.eval(5, (0.5, -1.0)) - PauliCoeffs::IDENTITY.scale_re((-0.625f64).exp())).max_abs() < 1e-15);
    }

    #[test]
    fn order_one_without_spin_multiplier() {
        let z = ScalarField::zeros(grid());
        let alpha = 0.4;
        let g = g_order(1, 0.5, &z, &[z.clone(), z.clone(), z.clone()], alpha).unwrap();
        let p: (f64, f64) = (0.7, -0.2);
        let e = (-0.25 * (p.0 * p.0 + p.1 * p.1)).exp();
        let expected = PauliCoeffs::real(0.0, [-0.5 * alpha * p.1 * e, 0.5 * alpha * p.0 * e, 0.0]);
        assert!((g.eval(3, p) - expected).max_abs() < 1e-15);
    }

    #[test]
    fn order_two_constant_fields() {
        let c = ScalarField::constant(grid(), 0.3);
        let z = ScalarField::zeros(grid());
        let alpha = 0.5;
        let beta = 0.8;
        let g = g_order(2, beta, &c, &[z.clone(), z.clone(), z.clone()], alpha).unwrap();
        let p = (1.1, 0.4);
        let psq = p.0 * p.0 + p.1 * p.1;
        let expected = beta * beta / 8.0 * (beta * (0.3 - 0.5 * psq)).exp() * 4.0 * alpha * alpha * psq;
        assert!((g.eval(9, p).s.re - expected).abs() < 1e-14);
    }

    #[test]
    fn normalization_point() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let n = SpinField::spinless(ScalarField::constant(grid(), two_pi), 0.1);
        let m = multipliers_from_moments(&n, 0.0).unwrap();
        assert!(m.a0().max_abs() < 1e-14);
        assert!(m.avec().iter().all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn leading_spin_solver_returns_zero() {
        assert!(solve_leading_spin_magnitude(0.0, 1.0) < 1e-12);
    }
}
