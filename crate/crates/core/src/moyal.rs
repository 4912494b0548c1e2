//! Semiclassical Moyal orders, the potential operator θ_ε[V] and the spinorial
//! transport operator.

use crate::error::{Error, Result};
use crate::fields::fft::Fft2;
use crate::fields::{GaussianSymbol, Grid2D, PGrid, PauliField, PhaseSpaceField, ScalarField, SymbolPoly};
use crate::par;
use crate::pauli::C64;

/// Moyal expansion order, 0 through 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoyalOrder(u8);

impl MoyalOrder {
    pub const MAX: u8 = 4;

    pub fn new(j: u8) -> Result<Self> {
        if j > Self::MAX {
            return Err(Error::Invalid(format!("Moyal order {j} exceeds {}", Self::MAX)));
        }
        Ok(Self(j))
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Multi-indices (μ, ν) with |μ| + |ν| = j and their weights (−1)^{|μ|}/(μ! ν!).
fn expansion_terms(j: usize) -> Vec<((usize, usize), (usize, usize), f64)> {
    let mut out = Vec::new();
    for m in 0..=j {
        for mu1 in 0..=m {
            let mu = (mu1, m - mu1);
            let n = j - m;
            for nu1 in 0..=n {
                let nu = (nu1, n - nu1);
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let w = sign / (factorial(mu.0) * factorial(mu.1) * factorial(nu.0) * factorial(nu.1));
                out.push((mu, nu, w));
            }
        }
    }
    out
}

fn two_i_pow_neg(j: usize) -> C64 {
    C64::new(0.0, 2.0).powi(-(j as i32))
}

fn poly_derivative(f: &SymbolPoly, dxm: (usize, usize), dpm: (usize, usize)) -> SymbolPoly {
    let mut out = f.dx(dxm.0, dxm.1);
    for _ in 0..dpm.0 {
        out = out.dp(0);
    }
    for _ in 0..dpm.1 {
        out = out.dp(1);
    }
    out
}

/// j-th Moyal order f #_j g with the polynomial symbol on the left:
/// (2i)^{−j} Σ_{|μ|+|ν|=j} (−1)^{|μ|}/(μ!ν!) ∂x^μ ∂p^ν f · ∂p^μ ∂x^ν g.
pub fn moyal_j(f: &SymbolPoly, g: &GaussianSymbol, j: MoyalOrder) -> Result<GaussianSymbol> {
    moyal_pair(f, g, j, true)
}

/// j-th Moyal order g #_j f with the polynomial symbol on the right.
pub fn moyal_j_right(g: &GaussianSymbol, f: &SymbolPoly, j: MoyalOrder) -> Result<GaussianSymbol> {
    moyal_pair(f, g, j, false)
}

fn moyal_pair(f: &SymbolPoly, g: &GaussianSymbol, j: MoyalOrder, poly_left: bool) -> Result<GaussianSymbol> {
    if let Some(d) = f.degree() {
        if d > 2 {
            return Err(Error::Invalid(format!("left Moyal factor has p-degree {d} > 2")));
        }
    }
    let j = j.get();
    let mut acc = SymbolPoly::zero(g.grid(), g.poly.dmax);
    for (mu, nu, w) in expansion_terms(j) {
        let (term, weight) = if poly_left {
            // ∂x^μ ∂p^ν f · ∂p^μ ∂x^ν g
            let df = poly_derivative(f, mu, nu);
            if df.is_zero() {
                continue;
            }
            (g.derivative(nu, mu)?.mul_left(&df)?, w)
        } else {
            // ∂x^μ ∂p^ν g · ∂p^μ ∂x^ν f
            let df = poly_derivative(f, nu, mu);
            if df.is_zero() {
                continue;
            }
            (g.derivative(mu, nu)?.mul_right(&df)?, w)
        };
        acc = acc.add(&term.poly.scale_re(weight))?;
    }
    Ok(g.with_poly(acc.scale(two_i_pow_neg(j))))
}

/// Full expansion Σ_{j ≤ 4} ε^j f #_j g split into (odd, even) parts:
/// f #_odd g = ½(f#g − g#f) and f #_even g = ½(f#g + g#f).
pub fn moyal_odd_even(f: &SymbolPoly, g: &GaussianSymbol, eps: f64) -> Result<(GaussianSymbol, GaussianSymbol)> {
    let zero = SymbolPoly::zero(g.grid(), g.poly.dmax);
    let mut odd = zero.clone();
    let mut even = zero;
    for j in 0..=MoyalOrder::MAX {
        let order = MoyalOrder::new(j)?;
        let fg = moyal_j(f, g, order)?.poly;
        let gf = moyal_j_right(g, f, order)?.poly;
        let e = eps.powi(j as i32) * 0.5;
        odd = odd.add(&fg.sub(&gf)?.scale_re(e))?;
        even = even.add(&fg.add(&gf)?.scale_re(e))?;
    }
    Ok((g.with_poly(odd), g.with_poly(even)))
}

/// Spatial potential that can report symmetric differences V(x + s) − V(x − s).
pub trait Potential: Sync {
    fn grid(&self) -> Grid2D;
    fn difference(&self, shift: [f64; 2]) -> Vec<f64>;
    fn gradient(&self) -> [Vec<f64>; 2];
}

/// Band-limited potential evaluated spectrally (exact shifts on the torus).
#[derive(Clone, Debug)]
pub struct SpectralPotential {
    field: ScalarField,
    spectrum: Vec<C64>,
}

impl SpectralPotential {
    pub fn new(field: &ScalarField) -> Self {
        Self { spectrum: field.spectrum(), field: field.clone() }
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }
}

impl Potential for SpectralPotential {
    fn grid(&self) -> Grid2D {
        self.field.grid
    }

    fn difference(&self, s: [f64; 2]) -> Vec<f64> {
        let g = self.field.grid;
        let (k1, k2) = (g.k1(), g.k2());
        let mut data = self.spectrum.clone();
        for j in 0..g.ny {
            for i in 0..g.nx {
                data[i + g.nx * j] *= C64::new(0.0, 2.0 * (k1[i] * s[0] + k2[j] * s[1]).sin());
            }
        }
        crate::fields::scalar::real_from_spectrum(&g, data)
    }

    fn gradient(&self) -> [Vec<f64>; 2] {
        let [a, b] = self.field.grad();
        [a.values, b.values]
    }
}

/// V(x) = c + b·x + ½ xᵀ Q x evaluated analytically at grid coordinates.
#[derive(Clone, Debug)]
pub struct QuadraticPotential {
    pub grid: Grid2D,
    pub c: f64,
    pub b: [f64; 2],
    pub q: [[f64; 2]; 2],
}

impl Potential for QuadraticPotential {
    fn grid(&self) -> Grid2D {
        self.grid
    }

    fn difference(&self, s: [f64; 2]) -> Vec<f64> {
        (0..self.grid.len())
            .map(|idx| {
                let (x, y) = self.grid.coords(idx);
                let qx = [self.q[0][0] * x + self.q[0][1] * y, self.q[1][0] * x + self.q[1][1] * y];
                2.0 * ((self.b[0] + qx[0]) * s[0] + (self.b[1] + qx[1]) * s[1])
            })
            .collect()
    }

    fn gradient(&self) -> [Vec<f64>; 2] {
        let mut out = [vec![0.0; self.grid.len()], vec![0.0; self.grid.len()]];
        for idx in 0..self.grid.len() {
            let (x, y) = self.grid.coords(idx);
            out[0][idx] = self.b[0] + self.q[0][0] * x + self.q[0][1] * y;
            out[1][idx] = self.b[1] + self.q[1][0] * x + self.q[1][1] * y;
        }
        out
    }
}

/// θ_ε[V] in the dual (η) representation of p: multiplication by i D(x, η) with
/// D = (V(x + εη/2) − V(x − εη/2))/ε, and D = η·∇V at ε = 0.
pub struct ThetaOperator {
    pub grid: Grid2D,
    pub pgrid: PGrid,
    pub eps: f64,
    table: Vec<f64>,
}

impl ThetaOperator {
    pub fn new<P: Potential + ?Sized>(v: &P, pgrid: PGrid, eps: f64) -> Result<Self> {
        if eps < 0.0 {
            return Err(Error::Invalid(format!("eps must be non-negative, got {eps}")));
        }
        let grid = v.grid();
        let np = pgrid.np;
        let eta = pgrid.eta();
        let half_domain = 0.5 * grid.lx.min(grid.ly);
        let max_shift = 0.5 * eps * eta.iter().fold(0.0f64, |m, e| m.max(e.abs())) * std::f64::consts::SQRT_2;
        if max_shift > half_domain {
            log::warn!(
                "theta shift {max_shift:.3} exceeds half the domain ({half_domain:.3}); p-grid under-resolves V"
            );
        }
        let nyq = np / 2;
        let grad = if eps == 0.0 { Some(v.gradient()) } else { None };
        let columns: Vec<Vec<f64>> = par::map_range(np * np, |ip| {
            let (i, j) = (ip % np, ip / np);
            if i == nyq || j == nyq || (eta[i] == 0.0 && eta[j] == 0.0) {
                return vec![0.0; grid.len()];
            }
            match &grad {
                Some([g1, g2]) => g1.iter().zip(g2).map(|(a, b)| eta[i] * a + eta[j] * b).collect(),
                None => {
                    let s = [0.5 * eps * eta[i], 0.5 * eps * eta[j]];
                    v.difference(s).into_iter().map(|d| d / eps).collect()
                }
            }
        });
        let n = grid.len();
        let np2 = np * np;
        let mut table = vec![0.0; n * np2];
        for (ip, col) in columns.iter().enumerate() {
            for ix in 0..n {
                table[ix * np2 + ip] = col[ix];
            }
        }
        Ok(Self { grid, pgrid, eps, table })
    }

    fn transform_blocks<F>(&self, w: &PhaseSpaceField, op: F) -> PhaseSpaceField
    where
        F: Fn(f64, C64) -> C64 + Sync,
    {
        let np2 = self.pgrid.len();
        let fft = Fft2::get(self.pgrid.np, self.pgrid.np);
        let mut out = w.clone();
        for comp in out.comps.iter_mut() {
            par::for_each_chunk(comp, np2, |ix, block| {
                let mut buf: Vec<C64> = block.iter().map(|&v| C64::new(v, 0.0)).collect();
                let mut scratch = Vec::new();
                fft.forward(&mut buf, &mut scratch);
                let d = &self.table[ix * np2..(ix + 1) * np2];
                for (z, &dv) in buf.iter_mut().zip(d) {
                    *z = op(dv, *z);
                }
                fft.inverse(&mut buf, &mut scratch);
                for (b, z) in block.iter_mut().zip(&buf) {
                    *b = z.re;
                }
            });
        }
        out
    }

    /// θ_ε[V] W applied to every Pauli component.
    pub fn apply(&self, w: &PhaseSpaceField) -> PhaseSpaceField {
        self.transform_blocks(w, |d, z| C64::new(0.0, d) * z)
    }

    /// Exact solution of ∂t W = θ_ε[V] W over `dt`.
    pub fn propagate(&self, w: &PhaseSpaceField, dt: f64) -> PhaseSpaceField {
        self.transform_blocks(w, |d, z| C64::from_polar(1.0, d * dt) * z)
    }
}

/// θ_ε[V] f for a band-limited potential field.
pub fn theta_apply(v: &ScalarField, f: &PhaseSpaceField, eps: f64) -> Result<PhaseSpaceField> {
    Ok(ThetaOperator::new(&SpectralPotential::new(v), f.pgrid, eps)?.apply(f))
}

/// Returns ⟨θ_ε[V] f⟩ and ⟨p θ_ε[V] f⟩ + ∇V ⟨f⟩ per node; both vanish identically.
pub fn theta_moments_check<P: Potential + ?Sized>(
    v: &P,
    f: &PhaseSpaceField,
    eps: f64,
) -> Result<(PauliField, [PauliField; 2])> {
    let tf = ThetaOperator::new(v, f.pgrid, eps)?.apply(f);
    let m0 = tf.moment((0, 0));
    let f0 = f.moment((0, 0));
    let grad = v.gradient();
    let mut second = [tf.moment((1, 0)), tf.moment((0, 1))];
    for (k, sec) in second.iter_mut().enumerate() {
        for (i, c) in sec.iter_mut().enumerate() {
            *c += f0[i].scale_re(grad[k][i]);
        }
    }
    Ok((m0, second))
}

/// max |2 V #_odd f − iε θ_ε[V] f| over the sampled phase-space grid.
pub fn odd_product_identity_residual(v: &ScalarField, f: &GaussianSymbol, eps: f64, pgrid: PGrid) -> Result<f64> {
    let vp = SymbolPoly::scalar(v, f.poly.dmax, (0, 0))?;
    let (odd, _) = moyal_odd_even(&vp, f, eps)?;
    // 2 V#_odd f / (iε) should equal θ_ε[V] f
    let scaled = odd.scale(C64::new(0.0, -2.0 / eps));
    let imag = scaled.poly.terms().flat_map(|(_, c)| c.iter().map(|z| z.max_imag())).fold(0.0, f64::max);
    let lhs = scaled.sample(pgrid);
    let rhs = theta_apply(v, &f.sample(pgrid), eps)?;
    Ok(eps * lhs.sub(&rhs).max_abs().max(imag))
}

/// Per-component spatial gradients of W, computed spectrally for every p node.
fn x_gradients(w: &PhaseSpaceField, comps: &[usize]) -> Vec<[Vec<f64>; 2]> {
    let grid = w.grid;
    let n = grid.len();
    let np2 = w.pgrid.len();
    let fft = Fft2::get(grid.nx, grid.ny);
    let (k1, k2) = (grid.k1(), grid.k2());
    comps
        .iter()
        .map(|&k| {
            let src = &w.comps[k];
            let per_p: Vec<(Vec<f64>, Vec<f64>)> = par::map_range(np2, |ip| {
                let mut buf: Vec<C64> = (0..n).map(|ix| C64::new(src[ix * np2 + ip], 0.0)).collect();
                let mut scratch = Vec::new();
                fft.forward(&mut buf, &mut scratch);
                let mut d1 = buf.clone();
                for j in 0..grid.ny {
                    for i in 0..grid.nx {
                        let idx = i + grid.nx * j;
                        d1[idx] *= C64::new(0.0, k1[i]);
                        buf[idx] *= C64::new(0.0, k2[j]);
                    }
                }
                fft.inverse(&mut d1, &mut scratch);
                fft.inverse(&mut buf, &mut scratch);
                (d1.iter().map(|z| z.re).collect(), buf.iter().map(|z| z.re).collect())
            });
            let mut g1 = vec![0.0; n * np2];
            let mut g2 = vec![0.0; n * np2];
            for (ip, (a, b)) in per_p.iter().enumerate() {
                for ix in 0..n {
                    g1[ix * np2 + ip] = a[ix];
                    g2[ix * np2 + ip] = b[ix];
                }
            }
            [g1, g2]
        })
        .collect()
}

/// Transport operator with explicit coupling weights:
/// σ0: p·∇w0 + c0 ∇⊥·w − θw0;  σ: p·∇w + c1 ∇⊥w0 − θw − 2α p⊥×w.
pub fn transport_apply_weighted(
    w: &PhaseSpaceField,
    theta: &ThetaOperator,
    alpha: f64,
    couplings: (f64, f64),
) -> PhaseSpaceField {
    let grads = x_gradients(w, &[0, 1, 2, 3]);
    let th = theta.apply(w);
    let np2 = w.pgrid.len();
    let mut out = PhaseSpaceField::zeros(w.grid, w.pgrid);
    let (c0, c1) = couplings;
    for i in 0..w.len() {
        let (p1, p2) = w.pgrid.momentum(i % np2);
        let stream = |k: usize| p1 * grads[k][0][i] + p2 * grads[k][1][i];
        let (w1, w2, w3) = (w.comps[1][i], w.comps[2][i], w.comps[3][i]);
        // ∇⊥·w = ∂2 w1 − ∂1 w2, ∇⊥w0 = (∂2 w0, −∂1 w0, 0)
        let div_perp = grads[1][1][i] - grads[2][0][i];
        let p_cross_w = [-p1 * w3, -p2 * w3, p1 * w1 + p2 * w2];
        out.comps[0][i] = stream(0) + c0 * div_perp - th.comps[0][i];
        out.comps[1][i] = stream(1) + c1 * grads[0][1][i] - th.comps[1][i] - 2.0 * alpha * p_cross_w[0];
        out.comps[2][i] = stream(2) - c1 * grads[0][0][i] - th.comps[2][i] - 2.0 * alpha * p_cross_w[1];
        out.comps[3][i] = stream(3) - th.comps[3][i] - 2.0 * alpha * p_cross_w[2];
    }
    out
}

/// Spinorial transport operator T W with the physical couplings αε.
pub fn transport_apply(w: &PhaseSpaceField, v: &ScalarField, eps: f64, alpha: f64) -> Result<PhaseSpaceField> {
    let theta = ThetaOperator::new(&SpectralPotential::new(v), w.pgrid, eps)?;
    Ok(transport_apply_weighted(w, &theta, alpha, (alpha * eps, alpha * eps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliCoeffs;

    fn grid() -> Grid2D {
        Grid2D::square(16).unwrap()
    }

    #[test]
    fn order_zero_with_unit_symbol_is_identity() {
        let a0 = ScalarField::from_fn(grid(), |x, y| 0.2 * x.sin() * y.cos());
        let g = GaussianSymbol::exp_h0(1.0, &a0, 6);
        let one = SymbolPoly::constant(grid(), 6, (0, 0), PauliCoeffs::IDENTITY).unwrap();
        let r = moyal_j(&one, &g, MoyalOrder::new(0).unwrap()).unwrap();
        assert!(r.sub(&g).unwrap().poly.max_abs() < 1e-15);
        assert!(MoyalOrder::new(5).is_err());
    }

    #[test]
    fn order_one_is_poisson_bracket() {
        // f = p1 (x-independent), g = exp(β h0): (1/2i) ∂p1 f ∂x1 g = (1/2i) β ∂1a0 g
        let a0 = ScalarField::from_fn(grid(), |x, _| 0.3 * x.cos());
        let g = GaussianSymbol::exp_h0(0.5, &a0, 6);
        let f = SymbolPoly::constant(grid(), 6, (1, 0), PauliCoeffs::IDENTITY).unwrap();
        let r = moyal_j(&f, &g, MoyalOrder::new(1).unwrap()).unwrap();
        let da = a0.dx1();
        let node = 21;
        let p = (0.3, 0.9);
        let expected = g.eval(node, p).scale(C64::new(0.0, -0.5 * 0.5 * da.values[node]));
        assert!((r.eval(node, p) - expected).max_abs() < 1e-13);
    }
}
