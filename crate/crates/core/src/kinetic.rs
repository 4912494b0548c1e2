//! Spinorial Wigner–BGK reference solver in hydrodynamic scaling,
//! ∂t W + T W = (M(N) − W)/τ, by Strang splitting with exact substeps.
//!
//! The spin components are stored divided by ε, so ε = 0 is admissible.

use crate::error::{Error, Result};
use crate::fields::fft::Fft2;
use crate::fields::{Grid2D, PGrid, PhaseSpaceField, ScalarField, SpinField};
use crate::fluid::{FluidModel, FluidParams, FluidState, ModelKind};
use crate::maxwellian::{maxwellian, multipliers_from_moments};
use crate::moyal::{SpectralPotential, ThetaOperator};
use crate::par;
use crate::pauli::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Fraction of |W| allowed in the outermost p-cells before a run aborts.
pub const LEAK_LIMIT: f64 = 1e-5;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KineticParams {
    pub eps: f64,
    pub alpha: f64,
    pub tau: f64,
    pub pgrid: PGrid,
    /// Maxwellian order used in the BGK step (1 or 3).
    pub closure_order: usize,
}

impl KineticParams {
    pub fn new(eps: f64, alpha: f64, tau: f64, pgrid: PGrid) -> Self {
        Self { eps, alpha, tau, pgrid, closure_order: 1 }
    }
}

/// Phase-space state; `w.comps[1..4]` hold w/ε.
#[derive(Clone, Debug)]
pub struct KineticState {
    pub w: PhaseSpaceField,
    pub t: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

pub struct KineticSolver {
    pub params: KineticParams,
    pub potential: ScalarField,
    theta: ThetaOperator,
    gauss: Vec<f64>,
    gauss_mass: f64,
}

impl KineticSolver {
    pub fn new(params: KineticParams, potential: ScalarField) -> Result<Self> {
        if !(params.tau > 0.0) {
            return Err(Error::Invalid(format!("tau = {} must be positive", params.tau)));
        }
        if !(params.eps >= 0.0) {
            return Err(Error::Invalid(format!("eps = {} must be non-negative", params.eps)));
        }
        if params.closure_order != 1 && params.closure_order != 3 {
            return Err(Error::Invalid(format!("closure order {} must be 1 or 3", params.closure_order)));
        }
        let theta = ThetaOperator::new(&SpectralPotential::new(&potential), params.pgrid, params.eps)?;
        let pg = params.pgrid;
        let gauss: Vec<f64> = (0..pg.len())
            .map(|ip| {
                let (p1, p2) = pg.momentum(ip);
                (-(p1 * p1 + p2 * p2) / 2.0).exp()
            })
            .collect();
        let gauss_mass = gauss.iter().sum::<f64>() * pg.cell_area();
        Ok(Self { params, potential, theta, gauss, gauss_mass })
    }

    pub fn grid(&self) -> Grid2D {
        self.potential.grid
    }

    /// Moments (n0, n) of a state.
    pub fn moments(&self, w: &PhaseSpaceField) -> SpinField {
        let m = w.moment((0, 0));
        let g = w.grid;
        let comp = |k: usize| ScalarField::new(g, m.iter().map(|c| c.component(k).re).collect());
        SpinField::new(comp(0), [comp(1), comp(2), comp(3)], self.params.eps)
    }

    /// Maxwellian of N sampled on the p-grid, renormalized so its quadrature moments equal N.
    pub fn sample_maxwellian(&self, n: &SpinField) -> Result<PhaseSpaceField> {
        let pg = self.params.pgrid;
        let np2 = pg.len();
        let g = n.grid();
        let alpha = self.params.alpha;
        let eps = self.params.eps;
        let mut m = if self.params.closure_order == 1 || eps == 0.0 {
            if let Some(i) = n.n0.values.iter().position(|&v| !(v > 0.0)) {
                return Err(Error::NonPhysical(format!("n0 = {:.3e} at node {i}", n.n0.values[i])));
            }
            let mut out = PhaseSpaceField::zeros(g, pg);
            for ix in 0..g.len() {
                let n0 = n.n0.values[ix];
                let b = [0, 1, 2].map(|j| n.n[j].values[ix] / n0);
                let pref = n0 / (2.0 * PI);
                for ip in 0..np2 {
                    let (p1, p2) = pg.momentum(ip);
                    let e = pref * self.gauss[ip];
                    let i = ix * np2 + ip;
                    out.comps[0][i] = e;
                    out.comps[1][i] = e * (b[0] - alpha * p2);
                    out.comps[2][i] = e * (b[1] + alpha * p1);
                    out.comps[3][i] = e * b[2];
                }
            }
            out
        } else {
            let mult = multipliers_from_moments(n, alpha)?;
            let mut out = maxwellian(&mult, self.params.closure_order)?.sample(pg);
            for k in 1..4 {
                for v in out.comps[k].iter_mut() {
                    *v /= eps;
                }
            }
            out
        };
        let target = [n.n0.values.as_slice(), &n.n[0].values, &n.n[1].values, &n.n[2].values];
        let da = pg.cell_area();
        for (k, comp) in m.comps.iter_mut().enumerate() {
            for ix in 0..g.len() {
                let block = &mut comp[ix * np2..(ix + 1) * np2];
                let have = block.iter().sum::<f64>() * da;
                let c = (target[k][ix] - have) / self.gauss_mass;
                for (v, gw) in block.iter_mut().zip(&self.gauss) {
                    *v += c * gw;
                }
            }
        }
        Ok(m)
    }

    pub fn initial_state(&self, n: &SpinField) -> Result<KineticState> {
        if n.grid() != self.grid() {
            return Err(Error::Grid("initial data and potential live on different grids".into()));
        }
        Ok(KineticState { w: self.sample_maxwellian(n)?, t: 0.0 })
    }

    /// Exact free streaming with the Rashba x-couplings over `dt`.
    pub fn transport_substep(&self, w: &mut PhaseSpaceField, dt: f64) {
        let g = w.grid;
        let pg = w.pgrid;
        let n = g.len();
        let np2 = pg.len();
        let (k1, k2) = (g.k1(), g.k2());
        let fft = Fft2::get(g.nx, g.ny);
        let (alpha, eps) = (self.params.alpha, self.params.eps);
        let src = &w.comps;
        let blocks: Vec<[Vec<f64>; 4]> = par::map_range(np2, |ip| {
            let (p1, p2) = pg.momentum(ip);
            let mut scratch = Vec::new();
            let mut hat: [Vec<C64>; 4] = [0, 1, 2, 3].map(|k| {
                let mut buf: Vec<C64> = (0..n).map(|ix| C64::new(src[k][ix * np2 + ip], 0.0)).collect();
                fft.forward(&mut buf, &mut scratch);
                buf
            });
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let idx = i + g.nx * j;
                    let (a, b) = (k1[i], k2[j]);
                    let kk = (a * a + b * b).sqrt();
                    if kk > 0.0 && alpha != 0.0 {
                        let omega = alpha * eps * kk;
                        let c = (omega * dt).cos();
                        let s = alpha * kk * dt * sinc(omega * dt);
                        let q0 = (b * hat[1][idx] - a * hat[2][idx]) / kk;
                        let w0 = hat[0][idx];
                        let iu = C64::new(0.0, 1.0);
                        hat[0][idx] = c * w0 - iu * (eps * eps * s) * q0;
                        let dq = (c - 1.0) * q0 - iu * s * w0;
                        hat[1][idx] += dq * (b / kk);
                        hat[2][idx] -= dq * (a / kk);
                    }
                    let phase = C64::from_polar(1.0, -(p1 * a + p2 * b) * dt);
                    for h in hat.iter_mut() {
                        h[idx] *= phase;
                    }
                }
            }
            hat.map(|mut h| {
                fft.inverse(&mut h, &mut scratch);
                h.into_iter().map(|z| z.re).collect()
            })
        });
        for (ip, block) in blocks.iter().enumerate() {
            for k in 0..4 {
                for ix in 0..n {
                    w.comps[k][ix * np2 + ip] = block[k][ix];
                }
            }
        }
    }

    /// Exact solution of ∂t W = θ_ε[V] W over `dt`.
    pub fn potential_substep(&self, w: &mut PhaseSpaceField, dt: f64) {
        if self.potential.max_abs() > 0.0 {
            *w = self.theta.propagate(w, dt);
        }
    }

    /// Rotation of w about p⊥ by the angle 2α|p⊥|dt.
    pub fn precession_substep(&self, w: &mut PhaseSpaceField, dt: f64) {
        let alpha = self.params.alpha;
        if alpha == 0.0 {
            return;
        }
        let pg = w.pgrid;
        let np2 = pg.len();
        let rot: Vec<[f64; 4]> = (0..np2)
            .map(|ip| {
                let (p1, p2) = pg.momentum(ip);
                let r = (p1 * p1 + p2 * p2).sqrt();
                let angle = 2.0 * alpha * r * dt;
                if r == 0.0 {
                    [0.0, 0.0, 1.0, 0.0]
                } else {
                    [p2 / r, -p1 / r, angle.cos(), angle.sin()]
                }
            })
            .collect();
        let [_, c1, c2, c3] = &mut w.comps;
        let n = c1.len();
        for i in 0..n {
            let [k1, k2, c, s] = rot[i % np2];
            let v = [c1[i], c2[i], c3[i]];
            let kv = k1 * v[0] + k2 * v[1];
            let kxv = [k2 * v[2], -k1 * v[2], k1 * v[1] - k2 * v[0]];
            let kk = [k1, k2, 0.0];
            let out = [0, 1, 2].map(|j| v[j] * c + kxv[j] * s + kk[j] * kv * (1.0 - c));
            c1[i] = out[0];
            c2[i] = out[1];
            c3[i] = out[2];
        }
    }

    /// W ← M(N) + e^{−dt/τ}(W − M(N)) with N = ⟨W⟩ frozen.
    pub fn bgk_substep(&self, w: &mut PhaseSpaceField, dt: f64) -> Result<()> {
        let n = self.moments(w);
        let m = self.sample_maxwellian(&n)?;
        let decay = (-dt / self.params.tau).exp();
        for (wc, mc) in w.comps.iter_mut().zip(&m.comps) {
            for (a, b) in wc.iter_mut().zip(mc) {
                *a = b + decay * (*a - b);
            }
        }
        Ok(())
    }

    fn check(&self, s: &KineticState) -> Result<()> {
        let fraction = s.w.boundary_fraction(1);
        if !(fraction <= LEAK_LIMIT) {
            return Err(Error::BoundaryLeak { fraction, limit: LEAK_LIMIT });
        }
        Ok(())
    }

    /// `steps` Strang steps of size `dt`, with adjacent transport half-steps merged.
    pub fn advance(&self, s: &mut KineticState, dt: f64, steps: usize) -> Result<()> {
        if !(dt > 0.0) || dt > 0.5 * self.params.tau {
            return Err(Error::StepTooLarge { dt, bound: 0.5 * self.params.tau });
        }
        if steps == 0 {
            return Ok(());
        }
        let h = 0.5 * dt;
        self.transport_substep(&mut s.w, h);
        for k in 0..steps {
            self.potential_substep(&mut s.w, h);
            self.precession_substep(&mut s.w, h);
            self.bgk_substep(&mut s.w, dt).map_err(|e| Error::Breakdown { time: s.t, reason: e.to_string() })?;
            self.precession_substep(&mut s.w, h);
            self.potential_substep(&mut s.w, h);
            self.transport_substep(&mut s.w, if k + 1 == steps { h } else { dt });
            s.t += dt;
            self.check(s)?;
        }
        Ok(())
    }

    /// One Strang step.
    pub fn step(&self, s: &mut KineticState, dt: f64) -> Result<()> {
        self.advance(s, dt, 1)
    }
}

/// Setup shared by the kinetic and fluid runs of a hydrodynamic comparison.
#[derive(Clone, Debug)]
pub struct HydroConfig {
    pub initial: SpinField,
    pub potential: ScalarField,
    pub alpha: f64,
    pub pgrid: PGrid,
    pub t_end: f64,
    pub samples: usize,
    /// Kinetic dt as a fraction of τ.
    pub dt_over_tau: f64,
    pub fluid_dt: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HydroRow {
    pub tau: f64,
    pub dt: f64,
    /// sup_t ‖N_kin − N_fluid‖.
    pub abs_error: f64,
    /// sup_t ‖N_fluid − N_fluid(0)‖.
    pub fluid_change: f64,
    /// abs_error / fluid_change.
    pub rel_error: f64,
    /// sup_t ‖N_kin − N_fluid‖ / ‖N_fluid‖.
    pub rel_deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HydroReport {
    pub rows: Vec<HydroRow>,
    /// rel_error(τ_i) / rel_error(τ_{i+1}).
    pub ratios: Vec<f64>,
}

fn l2_all(a: &SpinField, b: Option<&SpinField>) -> f64 {
    let ca = a.components();
    (0..4)
        .map(|k| {
            let d = match b {
                Some(b) => ca[k] - b.components()[k],
                None => ca[k].clone(),
            };
            d.l2().powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Kinetic (ε = initial.eps) against the local fluid model at each τ.
pub fn hydrodynamic_compare(cfg: &HydroConfig, taus: &[f64]) -> Result<HydroReport> {
    if cfg.samples == 0 || !(cfg.t_end > 0.0) {
        return Err(Error::Invalid("hydrodynamic comparison needs t_end > 0 and samples > 0".into()));
    }
    let eps = cfg.initial.eps;
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        let kin = KineticSolver::new(KineticParams::new(eps, cfg.alpha, tau, cfg.pgrid), cfg.potential.clone())?;
        let fluid = FluidModel::new(ModelKind::Local, FluidParams::new(eps, cfg.alpha, tau, cfg.potential.clone()))?;
        let mut ks = kin.initial_state(&cfg.initial)?;
        let mut fs: FluidState = fluid.state_from_spin(&cfg.initial, 0.0)?;
        let dt_target = tau * cfg.dt_over_tau;
        let interval = cfg.t_end / cfg.samples as f64;
        let steps = (interval / dt_target - 1e-9).ceil().max(1.0) as usize;
        let dt = interval / steps as f64;
        let (mut abs_error, mut fluid_change, mut rel_deviation) = (0.0f64, 0.0f64, 0.0f64);
        for k in 1..=cfg.samples {
            kin.advance(&mut ks, dt, steps)?;
            fluid.integrate(&mut fs, cfg.fluid_dt, k as f64 * interval, |_, _| Ok(()))?;
            let nk = kin.moments(&ks.w);
            let nf = fluid.spin_of(&fs);
            let err = l2_all(&nk, Some(&nf));
            abs_error = abs_error.max(err);
            fluid_change = fluid_change.max(l2_all(&nf, Some(&cfg.initial)));
            rel_deviation = rel_deviation.max(err / l2_all(&nf, None));
        }
        let rel_error = if fluid_change > 0.0 { abs_error / fluid_change } else { f64::INFINITY };
        log::info!("hydrodynamic compare tau {tau}: abs {abs_error:.3e} rel {rel_error:.3e}");
        rows.push(HydroRow { tau, dt, abs_error, fluid_change, rel_error, rel_deviation });
    }
    let ratios = rows.windows(2).map(|w| w[0].rel_error / w[1].rel_error).collect();
    Ok(HydroReport { rows, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::transport_apply;

    fn setup(alpha: f64, eps: f64, tau: f64) -> KineticSolver {
        let g = Grid2D::square(16).unwrap();
        let pg = PGrid::new(24, 6.0).unwrap();
        KineticSolver::new(KineticParams::new(eps, alpha, tau, pg), ScalarField::zeros(g)).unwrap()
    }

    #[test]
    fn homogeneous_maxwellian_is_stationary() {
        let s = setup(0.5, 0.1, 0.1);
        let g = s.grid();
        let n = SpinField::spinless(ScalarField::constant(g, 2.0), 0.1);
        let mut st = s.initial_state(&n).unwrap();
        let w0 = st.w.clone();
        s.advance(&mut st, 0.05, 20).unwrap();
        let d = st.w.sub(&w0).max_abs();
        assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn homogeneous_spin_relaxes_at_dyakonov_perel_rates() {
        let (alpha, tau) = (0.5, 0.02);
        let s = setup(alpha, 0.0, tau);
        let g = s.grid();
        let n = SpinField::new(
            ScalarField::constant(g, 1.0),
            [ScalarField::constant(g, 0.3), ScalarField::zeros(g), ScalarField::constant(g, 0.3)],
            0.0,
        );
        let mut st = s.initial_state(&n).unwrap();
        let t = 2.0;
        s.advance(&mut st, tau / 2.0, (2.0 * t / tau) as usize).unwrap();
        let m = s.moments(&st.w);
        let r1 = -(m.n[0].values[0] / 0.3).ln() / t;
        let r3 = -(m.n[2].values[0] / 0.3).ln() / t;
        let (e1, e3) = (4.0 * alpha * alpha * tau, 8.0 * alpha * alpha * tau);
        assert!((r1 / e1 - 1.0).abs() < 0.05 && (r3 / e3 - 1.0).abs() < 0.05);
    }

    #[test]
    fn precession_preserves_spin_norm() {
        let s = setup(0.7, 0.1, 0.1);
        let g = s.grid();
        let pg = s.params.pgrid;
        let mut w = PhaseSpaceField::from_fn(g, pg, |x, y, p1, p2| {
            let e = (-(p1 * p1 + p2 * p2) / 2.0).exp();
            [e, e * x.cos(), e * (p1 + y.sin()), e * p2 * 0.3]
        });
        let before: Vec<f64> = (0..w.len()).map(|i| (1..4).map(|k| w.comps[k][i].powi(2)).sum::<f64>()).collect();
        s.precession_substep(&mut w, 0.37);
        for (i, b) in before.iter().enumerate() {
            let a: f64 = (1..4).map(|k| w.comps[k][i].powi(2)).sum();
            assert!((a.sqrt() - b.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn bgk_conserves_moments() {
        let s = setup(0.4, 0.2, 0.05);
        let g = s.grid();
        let pg = s.params.pgrid;
        let mut w = PhaseSpaceField::from_fn(g, pg, |x, y, p1, p2| {
            let e = (-(p1 - 0.3 * x.sin()).powi(2) / 2.0 - p2 * p2 / 1.6).exp();
            [2.0 * e, e * 0.2 * y.cos(), e * 0.1 * p1, e * 0.3]
        });
        let before = s.moments(&w);
        s.bgk_substep(&mut w, 0.02).unwrap();
        let after = s.moments(&w);
        for (a, b) in after.components().iter().zip(before.components().iter()) {
            assert!((*a - *b).max_abs() < 1e-12);
        }
    }

    #[test]
    fn free_streaming_matches_characteristics() {
        let s = setup(0.0, 0.0, 1e6);
        let g = s.grid();
        let pg = s.params.pgrid;
        let f = |x: f64, y: f64, p1: f64, p2: f64| (-(p1 * p1 + p2 * p2) / 2.0).exp() * (1.5 + (x + 2.0 * y).cos());
        let mut w = PhaseSpaceField::from_fn(g, pg, |x, y, p1, p2| [f(x, y, p1, p2), 0.0, 0.0, 0.0]);
        let t = 0.3;
        s.transport_substep(&mut w, t);
        let exact = PhaseSpaceField::from_fn(g, pg, |x, y, p1, p2| [f(x - p1 * t, y - p2 * t, p1, p2), 0.0, 0.0, 0.0]);
        assert!(w.sub(&exact).max_abs() < 1e-12);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let s = setup(0.0, 0.0, 0.01);
        let g = s.grid();
        let mut st = s.initial_state(&SpinField::spinless(ScalarField::constant(g, 1.0), 0.0)).unwrap();
        assert!(matches!(s.step(&mut st, 0.02), Err(Error::StepTooLarge { .. })));
    }

    fn smooth_w(g: Grid2D, pg: PGrid) -> PhaseSpaceField {
        PhaseSpaceField::from_fn(g, pg, |x, y, p1, p2| {
            let e = (-((p1 - 0.2).powi(2) + p2 * p2) / 2.0).exp();
            [e * (2.0 + x.cos() * y.sin()), e * 0.3 * (x + p2).sin(), e * 0.2 * (y - p1).cos(), e * 0.1 * p1 * x.sin()]
        })
    }

    #[test]
    fn transport_conserves_momentum() {
        let s = setup(0.6, 0.3, 1.0);
        let mut w = smooth_w(s.grid(), s.params.pgrid);
        let mom = |w: &PhaseSpaceField| {
            let m = w.moment((1, 0));
            let n = w.moment((0, 1));
            (m.iter().map(|c| c.component(0).re).sum::<f64>(), n.iter().map(|c| c.component(0).re).sum::<f64>())
        };
        let before = mom(&w);
        s.transport_substep(&mut w, 0.21);
        let after = mom(&w);
        assert!((after.0 - before.0).abs() < 1e-10 && (after.1 - before.1).abs() < 1e-10);
    }

    #[test]
    fn transport_substep_generator_matches_transport_operator() {
        let (eps, alpha) = (0.3, 0.6);
        let s = setup(alpha, eps, 1.0);
        let g = s.grid();
        let w = smooth_w(g, s.params.pgrid);
        let mut scaled = w.clone();
        for k in 1..4 {
            scaled.comps[k].iter_mut().for_each(|v| *v /= eps);
        }
        let h = 1e-4;
        let (mut fwd, mut bwd) = (scaled.clone(), scaled.clone());
        s.transport_substep(&mut fwd, h);
        s.transport_substep(&mut bwd, -h);
        let tw = transport_apply(&w, &ScalarField::zeros(g), eps, alpha).unwrap();
        let mut err = 0.0f64;
        for k in 0..4 {
            let unscale = if k == 0 { 1.0 } else { eps };
            for i in 0..w.len() {
                let d = (fwd.comps[k][i] - bwd.comps[k][i]) / (2.0 * h) * unscale;
                let rhs = -tw.comps[k][i];
                let prec = if k == 0 {
                    0.0
                } else {
                    let (p1, p2) = w.pgrid.momentum(i % w.pgrid.len());
                    let pc = [-p1 * w.comps[3][i], -p2 * w.comps[3][i], p1 * w.comps[1][i] + p2 * w.comps[2][i]];
                    2.0 * alpha * pc[k - 1]
                };
                err = err.max((d - (rhs - prec)).abs());
            }
        }
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn transport_moment_two_ways() {
        let (eps, alpha) = (0.2, 0.5);
        let s = setup(alpha, eps, 1.0);
        let g = s.grid();
        let w = smooth_w(g, s.params.pgrid);
        let v = ScalarField::from_fn(g, |x, y| 0.4 * x.cos() + 0.2 * (x + y).sin());
        let tw = transport_apply(&w, &v, eps, alpha).unwrap();
        let quad = tw.moment((0, 0));
        let part = |mu: (usize, usize), k: usize| {
            ScalarField::new(g, w.moment(mu).iter().map(|c| c.component(k).re).collect())
        };
        let analytic = part((1, 0), 0)
            .dx1()
            .zip_map(&part((0, 1), 0).dx2(), |a, b| a + b)
            .zip_map(&part((0, 0), 1).dx2().zip_map(&part((0, 0), 2).dx1(), |a, b| a - b), |a, b| a + alpha * eps * b);
        let err = quad.iter().zip(&analytic.values).map(|(q, a)| (q.component(0).re - a).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }
}
