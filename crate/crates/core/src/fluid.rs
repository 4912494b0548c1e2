//! Local quantum-spin fluid model, its reductions, the nonlocal right-hand
//! side through the semiclassical closure, and an IMEX integrator.

use crate::error::{Error, Result};
use crate::fields::scalar::{real_from_spectrum, spectrum_of};
use crate::fields::{Grid2D, ScalarField, SpinField};
use crate::maxwellian::{curl_perp, current_density, multipliers_from_moments};
use crate::pauli::C64;
use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

type SF = ScalarField;

/// Dealiased pointwise product.
pub fn prod(a: &SF, b: &SF) -> SF {
    (a * b).dealias()
}

fn div2(f: &[SF; 2]) -> SF {
    &f[0].dx1() + &f[1].dx2()
}

fn cross_d(a: &[SF; 3], b: &[SF; 3]) -> [SF; 3] {
    [
        &prod(&a[1], &b[2]) - &prod(&a[2], &b[1]),
        &prod(&a[2], &b[0]) - &prod(&a[0], &b[2]),
        &prod(&a[0], &b[1]) - &prod(&a[1], &b[0]),
    ]
}

/// 1/n0 with the density floor 1e−8·max(n0).
fn reciprocal(n0: &SF) -> SF {
    let floor = 1e-8 * n0.max();
    n0.map(|v| 1.0 / v.max(floor)).dealias()
}

fn require_positive(f: &SF, what: &str) -> Result<()> {
    if let Some(i) = f.values.iter().position(|&v| !(v > 0.0)) {
        let (x, y) = f.grid.coords(i);
        return Err(Error::NonPhysical(format!("{what} = {:.3e} at ({x:.3}, {y:.3})", f.values[i])));
    }
    Ok(())
}

/// Physical parameters shared by all fluid models.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FluidParams {
    pub eps: f64,
    pub alpha: f64,
    pub tau: f64,
    pub potential: SF,
    /// +1 for the physical Bohm term; −1 flips its sign in the local charge equation.
    pub bohm_sign: f64,
    /// Drops the ε³ term of the local spin equation.
    pub drop_eps3: bool,
}

impl FluidParams {
    pub fn new(eps: f64, alpha: f64, tau: f64, potential: SF) -> Self {
        Self { eps, alpha, tau, potential, bohm_sign: 1.0, drop_eps3: false }
    }

    pub fn grid(&self) -> Grid2D {
        self.potential.grid
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::Invalid(format!("eps = {} must be finite and non-negative", self.eps)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::Invalid(format!("alpha = {} must be finite", self.alpha)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Invalid(format!("tau = {} must be positive", self.tau)));
        }
        if !self.potential.is_finite() {
            return Err(Error::Invalid("potential has non-finite values".into()));
        }
        Ok(())
    }
}

/// Bohm potential Δ√n0/√n0.
pub fn bohm(n0: &SF) -> Result<SF> {
    require_positive(n0, "n0")?;
    let s = n0.map(f64::sqrt);
    Ok(prod(&s.laplacian(), &reciprocal(&s)))
}

/// Coefficient fields A, B, C, D of the ε² spin flux.
#[derive(Clone, Debug)]
pub struct CoefficientFields {
    /// A_k.
    pub a: [SF; 2],
    /// B_j = Δn_j/n0 − ∇n_j·∇n0/n0².
    pub b: [SF; 3],
    /// C_lk.
    pub c: [[SF; 2]; 2],
    /// D_jk.
    pub d: [[SF; 2]; 3],
}

impl CoefficientFields {
    pub fn new(n: &SpinField) -> Self {
        let inv = reciprocal(&n.n0);
        let grad0 = n.n0.grad();
        let g = [0, 1].map(|k| prod(&grad0[k], &inv));
        let b = [0, 1, 2].map(|j| prod(&n.n[j], &inv));
        let gsq = &prod(&g[0], &g[0]) + &prod(&g[1], &g[1]);
        let bsq = &(&prod(&b[0], &b[0]) + &prod(&b[1], &b[1])) + &prod(&b[2], &b[2]);
        let lap_ratio = prod(&n.n0.laplacian(), &inv);
        let h = n.n0.hessian();
        let h_ratio = [0, 1].map(|l| [0, 1].map(|k| prod(&h[l][k], &inv)));
        let dn = [0, 1, 2].map(|j| n.n[j].grad());

        let a = [0, 1].map(|k| {
            let mut acc = prod(&gsq, &g[k]).scale(2.0);
            for j in 0..3 {
                acc.add_scaled(-4.0, &prod(&prod(&b[j], &dn[j][k]), &inv));
            }
            acc.add_scaled(-1.0, &prod(&g[k], &lap_ratio));
            for l in 0..2 {
                acc.add_scaled(-1.0, &prod(&g[l], &h_ratio[l][k]));
            }
            acc
        });
        let b_coef = [0, 1, 2].map(|j| {
            let mut acc = prod(&n.n[j].laplacian(), &inv);
            for k in 0..2 {
                acc.add_scaled(-1.0, &prod(&prod(&dn[j][k], &g[k]), &inv));
            }
            acc
        });
        let diag = &(&lap_ratio - &gsq) + &bsq.scale(4.0);
        let c = [0, 1].map(|l| [0, 1].map(|k| if l == k { &diag + &h_ratio[l][k] } else { h_ratio[l][k].clone() }));
        let d = [0, 1, 2].map(|j| {
            let hn = n.n[j].hessian();
            let gd = &prod(&dn[j][0], &g[0]) + &prod(&dn[j][1], &g[1]);
            [0, 1].map(|k| &(&prod(&g[0], &hn[0][k]) + &prod(&g[1], &hn[1][k])) - &prod(&gd, &g[k]))
        });
        Self { a, b: b_coef, c, d }
    }

    /// div(∇n_j/n0), the divergence form of B.
    pub fn b_divergence_form(n: &SpinField) -> [SF; 3] {
        let inv = reciprocal(&n.n0);
        [0, 1, 2].map(|j| {
            let dn = n.n[j].grad();
            div2(&[prod(&dn[0], &inv), prod(&dn[1], &inv)])
        })
    }
}

/// Right-hand side of the local quantum-spin model, as `[n0, n1, n2, n3]`.
pub fn rhs_local(n: &SpinField, p: &FluidParams) -> Result<[SF; 4]> {
    let (eps, alpha, tau) = (p.eps, p.alpha, p.tau);
    let dv = p.potential.grad();
    let grad0 = n.n0.grad();
    let dq = bohm(&n.n0)?.grad();
    let cb = p.bohm_sign * eps * eps / 6.0;
    let f0 = [0, 1].map(|k| {
        let mut f = &grad0[k] + &prod(&n.n0, &dv[k]);
        f.add_scaled(-cb, &prod(&n.n0, &dq[k]));
        f
    });
    let rhs0 = div2(&f0).scale(tau);

    let coef = CoefficientFields::new(n);
    let curl = curl_perp(&n.n);
    let gate = cross_d(&p.potential.grad_perp(), &n.n);
    let n_x_b = cross_d(&n.n, &coef.b);
    let eps3 = if p.drop_eps3 || eps == 0.0 {
        None
    } else {
        let inv = reciprocal(&n.n0);
        let ratio = [0, 1, 2].map(|j| prod(&n.n[j], &inv));
        let inner = cross_d(&ratio, &coef.b);
        let diff = [0, 1, 2].map(|j| &inner[j] - &coef.b[j]);
        Some(cross_d(&n.n, &diff))
    };
    let relax = [1.0, 1.0, 2.0];
    let grad0 = n.n0.grad();
    let spin = [0, 1, 2].map(|j| {
        let dn = n.n[j].grad();
        let drift = div2(&[&dn[0] + &prod(&n.n[j], &dv[0]), &dn[1] + &prod(&n.n[j], &dv[1])]);
        let mut out = drift.scale(tau);
        out.add_scaled(-2.0 * alpha * tau * 2.0, &curl[j]);
        out.add_scaled(-2.0 * alpha * tau, &gate[j]);
        out.add_scaled(-4.0 * alpha * alpha * tau * relax[j], &n.n[j]);
        out.add_scaled(eps * eps / 6.0, &n_x_b[j]);
        let lap = n.n[j].laplacian();
        let flux = [0, 1].map(|k| {
            let mut f = prod(&n.n[j], &coef.a[k]);
            f.add_scaled(-1.0, &lap.deriv_mixed(usize::from(k == 0), usize::from(k == 1)));
            for (l, dnl) in dn.iter().enumerate() {
                f = &f + &prod(dnl, &coef.c[l][k]);
            }
            f = &f + &prod(&coef.b[j], &grad0[k]);
            &f + &coef.d[j][k]
        });
        out.add_scaled(eps * eps * tau / 12.0, &div2(&flux));
        if let Some(e3) = &eps3 {
            out.add_scaled(eps.powi(3) * tau / 3.0, &e3[j]);
        }
        out
    });
    let [s1, s2, s3] = spin;
    Ok([rhs0, s1, s2, s3])
}

/// Right-hand side of the spin-vector drift-diffusion model.
/// ∇⊥×n is taken as the divergence of [[−n3, 0], [0, −n3], [n1, n2]].
pub fn rhs_spin_vector(n: &SpinField, p: &FluidParams) -> [SF; 4] {
    let (alpha, tau) = (p.alpha, p.tau);
    let [v1, v2] = p.potential.grad();
    let dd = |f: &SF| {
        let g = f.grad();
        div2(&[&g[0] + &prod(f, &v1), &g[1] + &prod(f, &v2)]).scale(tau)
    };
    let [n1, n2, n3] = &n.n;
    let curl = [
        div2(&[n3.scale(-1.0), SF::zeros(n.grid())]),
        div2(&[SF::zeros(n.grid()), n3.scale(-1.0)]),
        div2(&[n1.clone(), n2.clone()]),
    ];
    let gate = [prod(&v1, n3).scale(-1.0), prod(&v2, n3).scale(-1.0), &prod(&v2, n2) + &prod(&v1, n1)];
    let rates = [4.0, 4.0, 8.0];
    let spin = [0, 1, 2].map(|j| {
        let mut out = dd(&n.n[j]);
        out.add_scaled(-4.0 * alpha * tau, &curl[j]);
        out.add_scaled(-2.0 * alpha * tau, &gate[j]);
        out.add_scaled(-rates[j] * alpha * alpha * tau, &n.n[j]);
        out
    });
    let [s1, s2, s3] = spin;
    [dd(&n.n0), s1, s2, s3]
}

/// Right-hand side of the two-component model for (n₊, n₋).
pub fn rhs_two_component(np: &SF, nm: &SF, p: &FluidParams) -> Result<[SF; 2]> {
    let dv = p.potential.grad();
    let c = p.eps * p.eps / 6.0;
    let one = |a: &SF, other: &SF| -> Result<SF> {
        let dq = bohm(a)?.grad();
        let da = a.grad();
        let f = [0, 1].map(|k| {
            let mut f = &da[k] + &prod(a, &dv[k]);
            f.add_scaled(-c, &prod(a, &dq[k]));
            f
        });
        let mut out = div2(&f).scale(p.tau);
        out.add_scaled(-4.0 * p.alpha * p.alpha * p.tau, &(a - other));
        Ok(out)
    };
    Ok([one(np, nm)?, one(nm, np)?])
}

/// Right-hand side of the entropic spinless model with its energy diagnostics.
#[derive(Clone, Debug)]
pub struct EntropicRhs {
    pub rhs: SF,
    /// E = ∫ n0 (a0 + V).
    pub energy: f64,
    /// −τ ∫ n0 |∇(a0 + V)|².
    pub dissipation: f64,
}

/// a0 + V with the semiclassical spinless multiplier.
pub fn entropic_potential(n0: &SF, p: &FluidParams) -> Result<SF> {
    let state = SpinField::spinless(n0.clone(), p.eps);
    let a0 = multipliers_from_moments(&state, p.alpha)?.a0();
    Ok(&a0 + &p.potential)
}

pub fn rhs_entropic_spinless(n0: &SF, p: &FluidParams) -> Result<EntropicRhs> {
    require_positive(n0, "n0")?;
    let phi = entropic_potential(n0, p)?;
    let dphi = phi.grad();
    let flux = [prod(n0, &dphi[0]), prod(n0, &dphi[1])];
    let rhs = div2(&flux).scale(p.tau);
    let energy = (n0 * &phi).integral();
    let dissipation = -p.tau * (&(&flux[0] * &dphi[0]) + &(&flux[1] * &dphi[1])).integral();
    Ok(EntropicRhs { rhs, energy, dissipation })
}

fn gateaux_multiplier(n: &SpinField, alpha: f64, dir: &[SF; 3]) -> Result<[SF; 3]> {
    let size = dir.iter().map(SF::max_abs).fold(0.0, f64::max);
    if size == 0.0 {
        return Ok([0, 1, 2].map(|_| SF::zeros(n.grid())));
    }
    let scale = n.n.iter().map(SF::max_abs).fold(n.n0.max_abs() / n.eps.max(1.0), f64::max);
    let h = 1e-4 * scale / size;
    let shifted = |s: f64| {
        let moved = [0, 1, 2].map(|j| {
            let mut f = n.n[j].clone();
            f.add_scaled(s * h, &dir[j]);
            f
        });
        multipliers_from_moments(&SpinField::new(n.n0.clone(), moved, n.eps), alpha).map(|m| m.avec())
    };
    let (plus, minus) = (shifted(1.0)?, shifted(-1.0)?);
    Ok([0, 1, 2].map(|j| (&plus[j] - &minus[j]).scale(0.5 / h)))
}

/// Nonlocal model right-hand side evaluated through the semiclassical closure.
/// Read-only probe; requires ε > 0.
pub fn nonlocal_rhs_probe(n: &SpinField, p: &FluidParams) -> Result<[SF; 4]> {
    let (eps, alpha, tau) = (p.eps, p.alpha, p.tau);
    if !(eps > 0.0) {
        return Err(Error::Invalid("nonlocal probe requires eps > 0".into()));
    }
    let mult = multipliers_from_moments(n, alpha)?;
    let a0 = mult.a0();
    let a = mult.avec();
    let v = &p.potential;
    let da0 = a0.grad();
    let dv = v.grad();
    let da = [0, 1, 2].map(|j| a[j].grad());
    let n_x_a = cross_d(&n.n, &a);

    let charge_flux = [0, 1].map(|k| {
        let mut f = &prod(&n.n0, &da0[k]) + &prod(&n.n0, &dv[k]);
        for j in 0..3 {
            f.add_scaled(eps * eps, &prod(&n.n[j], &da[j][k]));
        }
        f
    });
    let mut rhs0 = div2(&charge_flux).scale(tau);
    let perp_div = &n_x_a[0].dx2() - &n_x_a[1].dx1();
    rhs0.add_scaled(2.0 * alpha * eps * eps * tau, &perp_div);

    let cur = current_density(&mult, 3)?;
    let jcol = [0, 1].map(|k| [cur.spin[0][k].clone(), cur.spin[1][k].clone(), cur.spin[2][k].clone()]);
    let jt_x_a = [0, 1].map(|k| cross_d(&jcol[k], &a));
    let grassmann =
        [0, 1, 2].map(|j| &(&prod(&a[j], &cur.p_perp_dot) - &prod(&a[0], &jcol[1][j])) + &prod(&a[1], &jcol[0][j]));
    let curl_a = curl_perp(&a);
    let phi = &a0 + v;
    let gate = cross_d(&phi.grad_perp(), &n.n);
    let dt_a = gateaux_multiplier(n, alpha, &n_x_a.clone().map(|f| f.scale(-2.0)))?;
    let twist = cross_d(&n_x_a, &a);
    let n_x_dta = cross_d(&n.n, &dt_a);

    let spin = [0, 1, 2].map(|j| {
        let flux = [0, 1].map(|k| {
            let mut f = &(&prod(&n.n0, &da[j][k]) + &prod(&n.n[j], &da0[k])) + &prod(&n.n[j], &dv[k]);
            f.add_scaled(2.0 / eps, &jt_x_a[k][j]);
            f
        });
        let mut out = n_x_a[j].scale(-2.0);
        out.add_scaled(tau, &div2(&flux));
        let mut rashba = &prod(&n.n0, &curl_a[j]) + &gate[j];
        rashba.add_scaled(-2.0 / eps, &grassmann[j]);
        out.add_scaled(-2.0 * alpha * tau, &rashba);
        out.add_scaled(-4.0 * eps * tau, &(&twist[j] + &n_x_dta[j]));
        out
    });
    let [s1, s2, s3] = spin;
    Ok([rhs0, s1, s2, s3])
}

/// Leading-order cross-diffusion matrix [[1 − ε²|b|², ε² bᵀ], [−b, I]].
pub fn diffusion_matrix(b: [f64; 3], eps: f64) -> Matrix4<f64> {
    let e2 = eps * eps;
    let bsq = b.iter().map(|v| v * v).sum::<f64>();
    let mut m = Matrix4::identity();
    m[(0, 0)] = 1.0 - e2 * bsq;
    for j in 0..3 {
        m[(0, j + 1)] = e2 * b[j];
        m[(j + 1, 0)] = -b[j];
    }
    m
}

/// Eigenvalues of the diffusion matrix by a real Schur decomposition.
pub fn diffusion_eigenvalues(b: [f64; 3], eps: f64) -> [C64; 4] {
    let ev = diffusion_matrix(b, eps).complex_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    out
}

/// Closed form: 1, 1 and the roots of λ² − (2 − ε²|b|²)λ + 1.
pub fn diffusion_eigenvalues_analytic(b: [f64; 3], eps: f64) -> [C64; 4] {
    let t = 2.0 - eps * eps * b.iter().map(|v| v * v).sum::<f64>();
    let disc = C64::new(t * t - 4.0, 0.0).sqrt();
    let one = C64::new(1.0, 0.0);
    let mut out = [one, one, (t + disc) / 2.0, (t - disc) / 2.0];
    out.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    out
}

/// Smallest eigenvalue real part of the diffusion matrix over all nodes.
pub fn min_diffusion_real_part(n: &SpinField) -> f64 {
    let inv = n.n0.map(|v| 1.0 / v);
    (0..n.grid().len())
        .map(|i| {
            let b = [0, 1, 2].map(|j| n.n[j].values[i] * inv.values[i]);
            diffusion_eigenvalues(b, n.eps).iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Fluid model selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Local,
    SpinVector,
    TwoComponent,
    Entropic,
}

/// Time-dependent state: model components and time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidState {
    pub comps: Vec<SF>,
    pub t: f64,
}

const IMEX_GAMMA: f64 = 0.241_694_260_788_21;
const IMEX_BETA: f64 = 0.060_423_565_197_05;
const IMEX_ETA: f64 = 0.129_152_869_605_9;
const EXPLICIT_A: [[f64; 4]; 4] = [[0.0; 4], [0.0; 4], [0.0, 1.0, 0.0, 0.0], [0.0, 0.25, 0.25, 0.0]];
const WEIGHTS: [f64; 4] = [0.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0];

fn implicit_a() -> [[f64; 4]; 4] {
    let (g, b, e) = (IMEX_GAMMA, IMEX_BETA, IMEX_ETA);
    [[g, 0.0, 0.0, 0.0], [-g, g, 0.0, 0.0], [0.0, 1.0 - g, g, 0.0], [b, e, 0.5 - b - e - g, g]]
}

/// A fluid model with its stiff linear symbol, advanced by IMEX-SSP3(4,3,3).
#[derive(Clone, Debug)]
pub struct FluidModel {
    pub kind: ModelKind,
    pub params: FluidParams,
    symbol: Vec<f64>,
}

impl FluidModel {
    pub fn new(kind: ModelKind, params: FluidParams) -> Result<Self> {
        params.validate()?;
        let g = params.grid();
        let (k1, k2) = (g.k1(), g.k2());
        let quartic = match kind {
            ModelKind::SpinVector => 0.0,
            _ => params.eps * params.eps * params.tau / 12.0,
        };
        let mut symbol = vec![0.0; g.len()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                let ksq = k1[i] * k1[i] + k2[j] * k2[j];
                symbol[g.index(i, j)] = -params.tau * ksq - quartic * ksq * ksq;
            }
        }
        Ok(Self { kind, params, symbol })
    }

    pub fn grid(&self) -> Grid2D {
        self.params.grid()
    }

    /// Model components from a spin field.
    pub fn state_from_spin(&self, n: &SpinField, t: f64) -> Result<FluidState> {
        let comps = match self.kind {
            ModelKind::Local | ModelKind::SpinVector => n.components().iter().map(|f| (*f).clone()).collect(),
            ModelKind::TwoComponent => {
                if n.n[0].max_abs() > 0.0 || n.n[1].max_abs() > 0.0 {
                    return Err(Error::Invalid("two-component model requires n1 = n2 = 0".into()));
                }
                let mut plus = n.n0.clone();
                plus.add_scaled(self.params.eps, &n.n[2]);
                let mut minus = n.n0.clone();
                minus.add_scaled(-self.params.eps, &n.n[2]);
                vec![plus, minus]
            }
            ModelKind::Entropic => vec![n.n0.clone()],
        };
        let state = FluidState { comps, t };
        self.check_state(&state)?;
        Ok(state)
    }

    /// Spin field view of a state.
    pub fn spin_of(&self, s: &FluidState) -> SpinField {
        let eps = self.params.eps;
        let g = self.grid();
        match self.kind {
            ModelKind::Local | ModelKind::SpinVector => SpinField::from_components(
                [s.comps[0].clone(), s.comps[1].clone(), s.comps[2].clone(), s.comps[3].clone()],
                eps,
            ),
            ModelKind::TwoComponent => {
                let n0 = (&s.comps[0] + &s.comps[1]).scale(0.5);
                let n3 = if eps > 0.0 { (&s.comps[0] - &s.comps[1]).scale(0.5 / eps) } else { SF::zeros(g) };
                SpinField::new(n0, [SF::zeros(g), SF::zeros(g), n3], eps)
            }
            ModelKind::Entropic => SpinField::spinless(s.comps[0].clone(), eps),
        }
    }

    pub fn rhs(&self, comps: &[SF]) -> Result<Vec<SF>> {
        let p = &self.params;
        let spin = || {
            SpinField::from_components([comps[0].clone(), comps[1].clone(), comps[2].clone(), comps[3].clone()], p.eps)
        };
        Ok(match self.kind {
            ModelKind::Local => rhs_local(&spin(), p)?.to_vec(),
            ModelKind::SpinVector => rhs_spin_vector(&spin(), p).to_vec(),
            ModelKind::TwoComponent => rhs_two_component(&comps[0], &comps[1], p)?.to_vec(),
            ModelKind::Entropic => vec![rhs_entropic_spinless(&comps[0], p)?.rhs],
        })
    }

    /// Entropic energy ∫ n0 (a0 + V); only defined for the entropic model.
    pub fn energy(&self, s: &FluidState) -> Result<Option<f64>> {
        if self.kind != ModelKind::Entropic {
            return Ok(None);
        }
        Ok(Some(rhs_entropic_spinless(&s.comps[0], &self.params)?.energy))
    }

    pub fn check_state(&self, s: &FluidState) -> Result<()> {
        let breakdown = |reason: String| Error::Breakdown { time: s.t, reason };
        if s.comps.iter().any(|f| !f.is_finite()) {
            return Err(breakdown("non-finite value".into()));
        }
        match self.kind {
            ModelKind::Local | ModelKind::SpinVector => {
                self.spin_of(s).check_physical().map_err(|e| breakdown(e.to_string()))
            }
            _ => {
                for (k, f) in s.comps.iter().enumerate() {
                    require_positive(f, &format!("component {k}")).map_err(|e| breakdown(e.to_string()))?;
                }
                Ok(())
            }
        }
    }

    /// Heuristic bound on dt for the explicit part.
    pub fn stability_bound(&self, s: &FluidState) -> f64 {
        let p = &self.params;
        let k = 2.0 * self.grid().kmax() / 3.0;
        let [v1, v2] = p.potential.grad();
        let gv = v1.max_abs().max(v2.max_abs());
        let lv = p.potential.laplacian().max_abs();
        let mut rho = p.tau * (k * gv + lv);
        rho += p.alpha.abs() * p.tau * (4.0 * k + 2.0 * gv) + 8.0 * p.alpha * p.alpha * p.tau;
        if p.eps > 0.0 && self.kind != ModelKind::SpinVector {
            let n = self.spin_of(s);
            let n0min = n.n0.min().max(1e-300);
            let [g1, g2] = n.n0.grad();
            let g = g1.max_abs().max(g2.max_abs()) / n0min;
            let b = n.spin_magnitude().max_abs() / n0min;
            let e2 = p.eps * p.eps;
            rho += e2 * p.tau * (k.powi(3) * g + k * k * (g * g + b * b + 1.0));
            rho += e2 * b * k * k;
        }
        if rho == 0.0 {
            f64::INFINITY
        } else {
            1.5 / rho
        }
    }

    /// Spectrum of rhs(u) − L u, given the state and its spectrum.
    fn explicit_part(&self, s: &FluidState, spectra: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
        let g = self.grid();
        let f = self.rhs(&s.comps).map_err(|e| Error::Breakdown { time: s.t, reason: e.to_string() })?;
        Ok(f.iter()
            .zip(spectra)
            .map(|(fc, u)| {
                let fh = spectrum_of(&g, &fc.values);
                fh.iter().zip(u).zip(&self.symbol).map(|((a, z), l)| a - z * l).collect()
            })
            .collect())
    }

    /// One IMEX step of size `dt`.
    pub fn step(&self, s: &FluidState, dt: f64) -> Result<FluidState> {
        let bound = self.stability_bound(s);
        if dt > bound {
            return Err(Error::StepTooLarge { dt, bound });
        }
        let g = self.grid();
        let m = s.comps.len();
        let imp = implicit_a();
        let base: Vec<Vec<C64>> = s.comps.iter().map(|f| spectrum_of(&g, &f.values)).collect();
        let mut lin: Vec<Vec<Vec<C64>>> = Vec::with_capacity(4);
        let mut expl: Vec<Option<Vec<Vec<C64>>>> = Vec::with_capacity(4);
        // stage 1 carries α·N(u_n) explicitly
        let n_base = self.explicit_part(s, &base)?;
        for i in 0..4 {
            let denom: Vec<f64> = self.symbol.iter().map(|l| 1.0 - dt * imp[i][i] * l).collect();
            let mut stage_hat: Vec<Vec<C64>> = Vec::with_capacity(m);
            for c in 0..m {
                let mut acc = base[c].clone();
                for j in 0..i {
                    let (ae, ai) = (EXPLICIT_A[i][j], imp[i][j]);
                    if ai != 0.0 {
                        for (a, l) in acc.iter_mut().zip(&lin[j][c]) {
                            *a += dt * ai * l;
                        }
                    }
                    if ae != 0.0 {
                        let nj = expl[j].as_ref().expect("explicit stage evaluated");
                        for (a, e) in acc.iter_mut().zip(&nj[c]) {
                            *a += dt * ae * e;
                        }
                    }
                }
                if i == 0 {
                    for (a, e) in acc.iter_mut().zip(&n_base[c]) {
                        *a += dt * imp[0][0] * e;
                    }
                }
                for (a, d) in acc.iter_mut().zip(&denom) {
                    *a /= d;
                }
                stage_hat.push(acc);
            }
            lin.push(stage_hat.iter().map(|u| u.iter().zip(&self.symbol).map(|(z, l)| z * l).collect()).collect());
            if i == 0 {
                expl.push(None);
                continue;
            }
            let stage: Vec<SF> = stage_hat.iter().map(|u| SF::new(g, real_from_spectrum(&g, u.clone()))).collect();
            let probe = FluidState { comps: stage, t: s.t + dt };
            self.check_state(&probe)?;
            expl.push(Some(self.explicit_part(&probe, &stage_hat)?));
        }
        let mut comps = Vec::with_capacity(m);
        for c in 0..m {
            let mut acc = base[c].clone();
            for i in 1..4 {
                let nj = expl[i].as_ref().expect("explicit stage evaluated");
                for ((a, e), l) in acc.iter_mut().zip(&nj[c]).zip(&lin[i][c]) {
                    *a += dt * WEIGHTS[i] * (e + l);
                }
            }
            comps.push(SF::new(g, real_from_spectrum(&g, acc)));
        }
        let out = FluidState { comps, t: s.t + dt };
        self.check_state(&out)?;
        Ok(out)
    }

    /// Advances to `t_end` with steps no larger than `dt`, calling `observe`
    /// with the step index after every step and once at the start.
    pub fn integrate<F>(&self, state: &mut FluidState, dt: f64, t_end: f64, mut observe: F) -> Result<()>
    where
        F: FnMut(&FluidState, usize) -> Result<()>,
    {
        if !(dt > 0.0) {
            return Err(Error::Invalid(format!("dt = {dt} must be positive")));
        }
        observe(state, 0)?;
        let span = t_end - state.t;
        if span <= 0.0 {
            return Ok(());
        }
        let steps = (span / dt - 1e-9).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        let t0 = state.t;
        for k in 1..=steps {
            let mut next = self.step(state, h)?;
            next.t = t0 + k as f64 * h;
            *state = next;
            observe(state, k)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid2D {
        Grid2D::square(32).unwrap()
    }

    fn params(eps: f64, alpha: f64) -> FluidParams {
        FluidParams::new(eps, alpha, 1.0, SF::zeros(grid()))
    }

    #[test]
    fn bohm_of_constant_is_zero() {
        assert!(bohm(&SF::constant(grid(), 3.0)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn bohm_matches_closed_form() {
        let g = grid();
        let n0 = SF::from_fn(g, |x, _| x.cos().exp());
        let exact = SF::from_fn(g, |x, _| x.sin().powi(2) / 4.0 - x.cos() / 2.0);
        assert!((&bohm(&n0).unwrap() - &exact).max_abs() < 1e-8);
        let scaled = bohm(&n0.scale(7.5)).unwrap();
        assert!((&scaled - &exact).max_abs() < 1e-8);
    }

    #[test]
    fn bohm_rejects_non_positive() {
        let n0 = SF::from_fn(grid(), |x, _| x.cos());
        assert!(matches!(bohm(&n0), Err(Error::NonPhysical(_))));
    }

    #[test]
    fn spin_vector_relaxation_of_constant_state() {
        let g = grid();
        let c = 0.3;
        let n = SpinField::new(SF::constant(g, 2.0), [SF::zeros(g), SF::zeros(g), SF::constant(g, c)], 0.0);
        let alpha = 0.4;
        let r = rhs_spin_vector(&n, &params(0.0, alpha));
        assert!(r[0].max_abs() < 1e-14 && r[1].max_abs() < 1e-14 && r[2].max_abs() < 1e-14);
        assert!((&r[3] - &SF::constant(g, -8.0 * alpha * alpha * c)).max_abs() < 1e-13);
    }

    #[test]
    fn homogeneous_equilibrium_has_zero_local_rhs() {
        let g = grid();
        let n = SpinField::spinless(SF::constant(g, 2.0), 0.2);
        for f in rhs_local(&n, &params(0.2, 0.5)).unwrap() {
            assert!(f.max_abs() < 1e-13);
        }
    }

    #[test]
    fn b_forms_agree() {
        let g = Grid2D::square(64).unwrap();
        let n0 = SF::from_fn(g, |x, y| 3.0 + x.cos() + 0.5 * (x - y).sin());
        let n = [
            SF::from_fn(g, |x, y| 0.3 * y.cos() + 0.2 * x.sin()),
            SF::from_fn(g, |x, y| 0.2 * (x + y).cos()),
            SF::from_fn(g, |x, _| 0.5 + 0.1 * (2.0 * x).sin()),
        ];
        let s = SpinField::new(n0, n, 0.1);
        let c = CoefficientFields::new(&s);
        let d = CoefficientFields::b_divergence_form(&s);
        for j in 0..3 {
            let e = (&c.b[j] - &d[j]).max_abs();
            assert!(e < 1e-10, "{e:e}");
        }
    }

    #[test]
    fn two_component_balanced_has_no_relaxation() {
        let g = grid();
        let np = SF::constant(g, 1.5);
        let r = rhs_two_component(&np, &np, &params(0.1, 0.7)).unwrap();
        assert!(r[0].max_abs() < 1e-13 && r[1].max_abs() < 1e-13);
    }

    #[test]
    fn eigenvalues_match_closed_form() {
        for (b, eps) in [([0.3, -0.2, 0.5], 0.4), ([0.0, 0.0, 0.0], 0.1), ([2.0, 1.0, -1.0], 0.3)] {
            let num = diffusion_eigenvalues(b, eps);
            let ana = diffusion_eigenvalues_analytic(b, eps);
            for (x, y) in num.iter().zip(&ana) {
                assert!((x - y).norm() < 1e-10, "{num:?} vs {ana:?}");
            }
        }
    }

    #[test]
    fn heat_mode_decays_exactly() {
        let g = grid();
        let tau = 1.0;
        let n0 = SF::from_fn(g, |x, _| 2.0 + 0.1 * x.cos());
        let model = FluidModel::new(ModelKind::Local, FluidParams::new(0.0, 0.0, tau, SF::zeros(g))).unwrap();
        let mut s = model.state_from_spin(&SpinField::spinless(n0, 0.0), 0.0).unwrap();
        model.integrate(&mut s, 0.01, 1.0, |_, _| Ok(())).unwrap();
        let exact = SF::from_fn(g, |x, _| 2.0 + 0.1 * (-tau).exp() * x.cos());
        assert!((&s.comps[0] - &exact).max_abs() < 1e-6);
        assert!((s.t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_rhs_state_is_fixed() {
        let g = grid();
        let model = FluidModel::new(ModelKind::Local, params(0.1, 0.3)).unwrap();
        let s = model.state_from_spin(&SpinField::spinless(SF::constant(g, 2.0 * PI), 0.1), 0.0).unwrap();
        let next = model.step(&s, 0.01).unwrap();
        for (a, b) in next.comps.iter().zip(&s.comps) {
            assert!((a - b).max_abs() < 1e-13);
        }
    }

    #[test]
    fn oversized_step_is_rejected() {
        let g = grid();
        let v = SF::from_fn(g, |x, _| x.cos());
        let model = FluidModel::new(ModelKind::SpinVector, FluidParams::new(0.0, 1.0, 1.0, v)).unwrap();
        let s = model.state_from_spin(&SpinField::spinless(SF::constant(g, 1.0), 0.0), 0.0).unwrap();
        assert!(matches!(model.step(&s, 10.0), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn boltzmann_profile_is_fixed() {
        let g = grid();
        let v = SF::from_fn(g, |x, y| 0.5 * x.cos() + 0.3 * (y + 0.5).sin());
        let n0 = SF::from_fn(g, |x, y| (-(0.5 * x.cos() + 0.3 * (y + 0.5).sin())).exp());
        let model = FluidModel::new(ModelKind::Local, FluidParams::new(0.0, 0.4, 1.0, v)).unwrap();
        let s = model.state_from_spin(&SpinField::spinless(n0, 0.0), 0.0).unwrap();
        let next = model.step(&s, 0.01).unwrap();
        for (a, b) in next.comps.iter().zip(&s.comps) {
            assert!((a - b).max_abs() < 1e-13);
        }
    }

    #[test]
    fn step_is_third_order_in_time() {
        let g = Grid2D::square(16).unwrap();
        let v = SF::from_fn(g, |x, y| 0.4 * x.cos() + 0.2 * (x + y).sin());
        let n0 = SF::from_fn(g, |x, y| 1.5 + 0.3 * x.cos() + 0.2 * y.sin());
        let spin = [
            SF::from_fn(g, |x, y| 0.2 + 0.15 * (x + y).cos()),
            SF::from_fn(g, |_, y| 0.1 * y.sin()),
            SF::from_fn(g, |x, y| -0.1 + 0.2 * (x - y).cos()),
        ];
        let model = FluidModel::new(ModelKind::Local, FluidParams::new(0.1, 0.5, 1.0, v)).unwrap();
        let start = model.state_from_spin(&SpinField::new(n0, spin, 0.1), 0.0).unwrap();
        let run = |dt: f64| {
            let mut s = start.clone();
            model.integrate(&mut s, dt, 0.2, |_, _| Ok(())).unwrap();
            s
        };
        let reference = run(0.2 / 320.0);
        let errs: Vec<f64> = [10.0, 20.0, 40.0]
            .iter()
            .map(|m| {
                let s = run(0.2 / m);
                s.comps.iter().zip(&reference.comps).map(|(a, b)| (a - b).max_abs()).fold(0.0, f64::max)
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 3.0).abs() < 0.5, "observed order {order} from {errs:?}");
        }
    }
}
