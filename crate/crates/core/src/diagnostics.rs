//! Verification catalog: every identity, reduction and consistency property of
//! the model chain as a named, runnable check with a structured report.

use crate::error::{Error, Result};
use crate::fields::{FieldSpec, GaussianSymbol};
use crate::fields::{Grid2D, PGrid, PhaseSpaceField, ScalarField, SpinField};
use crate::fluid::{
    diffusion_eigenvalues, diffusion_eigenvalues_analytic, min_diffusion_real_part, nonlocal_rhs_probe, rhs_local,
    rhs_spin_vector, rhs_two_component, FluidModel, FluidParams, ModelKind,
};
use crate::kinetic::{hydrodynamic_compare, HydroConfig, HydroReport};
use crate::maxwellian::{
    current_density, maxwellian, maxwellian_leading_spin, moments_of, multipliers_from_moments, recursion_residual,
    residual_current, solve_leading_spin_magnitude, DMAX,
};
use crate::moyal::{
    odd_product_identity_residual, theta_apply, theta_moments_check, transport_apply, QuadraticPotential,
};
use crate::par;
use crate::pauli::{exp_spin, pauli_mul, PauliCoeffs, C64};
use crate::tolerances as tol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Operations that at least one catalog entry must exercise.
pub const REQUIRED_OPS: &[&str] = &[
    "moyal_j",
    "theta_apply",
    "theta_moments_check",
    "transport_apply",
    "g_order",
    "recursion_residual",
    "maxwellian",
    "multipliers_from_moments",
    "current_density",
    "residual_current",
    "bohm",
    "rhs_local",
    "rhs_spin_vector",
    "rhs_two_component",
    "rhs_entropic_spinless",
    "step",
    "kinetic_step",
    "hydrodynamic_compare",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub value: f64,
    /// Pass iff `value < limit`; informational when absent.
    pub limit: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub anchor: String,
    pub scenario: String,
    pub scenario_hash: String,
    pub resolution: String,
    pub residuals: BTreeMap<String, Measurement>,
    /// Primary tolerance (order window for ratio tests).
    pub tolerance: f64,
    pub expected_order: Option<f64>,
    pub slopes: Vec<f64>,
    pub status: Status,
    pub reason: Option<String>,
    pub covers: Vec<String>,
}

/// Smooth periodic test case for the catalog.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagScenario {
    pub name: String,
    pub n: usize,
    pub eps: f64,
    pub alpha: f64,
    pub tau: f64,
    pub n0: FieldSpec,
    pub spin: [FieldSpec; 3],
    pub potential: FieldSpec,
}

impl DiagScenario {
    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::square(self.n)
    }

    /// The scenario state with the given ε.
    pub fn state(&self, eps: f64) -> Result<SpinField> {
        let g = self.grid()?;
        let s = SpinField::new(self.n0.build(g), [0, 1, 2].map(|j| self.spin[j].build(g)), eps);
        s.check_physical()?;
        Ok(s)
    }

    pub fn potential_field(&self) -> Result<ScalarField> {
        Ok(self.potential.build(self.grid()?))
    }

    pub fn params(&self, eps: f64, bohm_sign: f64) -> Result<FluidParams> {
        let mut p = FluidParams::new(eps, self.alpha, self.tau, self.potential_field()?);
        p.bohm_sign = bohm_sign;
        Ok(p)
    }

    pub fn is_quantum(&self) -> bool {
        self.eps > 0.0
    }

    pub fn is_rashba(&self) -> bool {
        self.alpha != 0.0
    }
}

/// Hex SHA-256 of the canonical JSON encoding.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).unwrap_or_default();
    Sha256::digest(&bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Two smooth scenarios with different coefficients and a classical one.
pub fn default_scenarios() -> Vec<DiagScenario> {
    vec![
        DiagScenario {
            name: "smooth_a".into(),
            n: 32,
            eps: 0.1,
            alpha: 0.5,
            tau: 1.0,
            n0: FieldSpec::constant(1.5).with_mode(0.3, [1, 0], 0.0).with_mode(0.2, [0, 1], 0.4),
            spin: [
                FieldSpec::constant(0.2).with_mode(0.15, [1, 1], 0.0),
                FieldSpec::default().with_mode(0.1, [0, 1], 1.0),
                FieldSpec::constant(-0.1).with_mode(0.2, [1, -1], 0.3),
            ],
            potential: FieldSpec::default().with_mode(0.4, [1, 0], 0.0).with_mode(0.2, [1, 1], 0.7),
        },
        DiagScenario {
            name: "smooth_b".into(),
            n: 64,
            eps: 0.2,
            alpha: -0.3,
            tau: 0.5,
            n0: FieldSpec::constant(2.0).with_mode(0.5, [1, 1], 0.2).with_mode(0.2, [2, 0], 0.0),
            spin: [
                FieldSpec::default().with_mode(0.3, [0, 1], 0.0),
                FieldSpec::constant(0.1).with_mode(0.2, [1, 0], 0.5),
                FieldSpec::default().with_mode(0.25, [1, -1], 0.0).with_mode(0.1, [0, 2], 0.0),
            ],
            potential: FieldSpec::default().with_mode(0.3, [0, 1], 0.0).with_mode(0.2, [2, -1], 1.1),
        },
        DiagScenario {
            name: "classical".into(),
            n: 16,
            eps: 0.0,
            alpha: 0.0,
            tau: 1.0,
            n0: FieldSpec::constant(1.0).with_mode(0.3, [1, 0], 0.0),
            spin: [FieldSpec::default(), FieldSpec::default(), FieldSpec::default()],
            potential: FieldSpec::default().with_mode(0.5, [0, 1], 0.0),
        },
    ]
}

/// Shared setup of the hydrodynamic comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HydroScenario {
    pub n: usize,
    pub np: usize,
    pub pmax: f64,
    pub alpha: f64,
    pub n0: FieldSpec,
    pub spin: [FieldSpec; 3],
    pub potential: FieldSpec,
    pub t_end: f64,
    pub samples: usize,
}

impl HydroScenario {
    pub fn smooth(alpha: f64, spin_free: bool) -> Self {
        let spin = if spin_free {
            [FieldSpec::default(), FieldSpec::default(), FieldSpec::default()]
        } else {
            [
                FieldSpec::default().with_mode(0.2, [1, 1], -std::f64::consts::FRAC_PI_2),
                FieldSpec::default().with_mode(0.1, [0, 1], 0.0),
                FieldSpec::default().with_mode(0.15, [1, 0], 0.0),
            ]
        };
        Self {
            n: 16,
            np: 24,
            pmax: 6.0,
            alpha,
            n0: FieldSpec::constant(1.0).with_mode(0.3, [1, 0], 0.0).with_mode(
                0.2,
                [0, 1],
                -std::f64::consts::FRAC_PI_2,
            ),
            spin,
            potential: FieldSpec::default().with_mode(0.5, [1, 0], 0.0).with_mode(
                0.3,
                [1, -1],
                -std::f64::consts::FRAC_PI_2,
            ),
            t_end: tol::HYDRO_T_END,
            samples: 5,
        }
    }

    pub fn config(&self, dt_over_tau: f64) -> Result<HydroConfig> {
        let g = Grid2D::square(self.n)?;
        let initial = SpinField::new(self.n0.build(g), [0, 1, 2].map(|j| self.spin[j].build(g)), 0.0);
        initial.check_physical()?;
        Ok(HydroConfig {
            initial,
            potential: self.potential.build(g),
            alpha: self.alpha,
            pgrid: PGrid::new(self.np, self.pmax)?,
            t_end: self.t_end,
            samples: self.samples,
            dt_over_tau,
            fluid_dt: 0.01,
        })
    }

    pub fn run(&self, taus: &[f64], dt_over_tau: f64) -> Result<HydroReport> {
        hydrodynamic_compare(&self.config(dt_over_tau)?, taus)
    }
}

#[derive(Clone, Debug)]
pub struct CatalogConfig {
    pub scenarios: Vec<DiagScenario>,
    /// Substring filter on check names.
    pub only: Option<String>,
    /// ε levels of the ratio tests.
    pub eps_levels: Vec<f64>,
    /// Flips the sign of the Bohm term in the local model.
    pub mutate_bohm: bool,
    /// Runs the kinetic–fluid comparison (the slowest entry).
    pub include_kinetic: bool,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        Self {
            scenarios: default_scenarios(),
            only: None,
            eps_levels: tol::EPS_LEVELS.to_vec(),
            mutate_bohm: false,
            include_kinetic: true,
        }
    }
}

impl CatalogConfig {
    fn bohm_sign(&self) -> f64 {
        if self.mutate_bohm {
            -1.0
        } else {
            1.0
        }
    }
}

// ---------------------------------------------------------------------------
// Independent oracles and measurements.

type Mat2 = [[C64; 2]; 2];

fn sigma(k: usize) -> Mat2 {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    match k {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    }
}

fn mat_of(a: &PauliCoeffs) -> Mat2 {
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..4 {
        let s = sigma(k);
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] += a.component(k) * s[r][c];
            }
        }
    }
    m
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            m[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    m
}

/// Pauli coefficients tr(σ_k M)/2.
fn coeffs_of(m: &Mat2) -> [C64; 4] {
    [0, 1, 2, 3].map(|k| {
        let p = mat_mul(&sigma(k), m);
        (p[0][0] + p[1][1]) * 0.5
    })
}

fn max_diff(a: &PauliCoeffs, b: &[C64; 4]) -> f64 {
    (0..4).map(|k| (a.component(k) - b[k]).norm()).fold(0.0, f64::max)
}

/// Truncated power series of exp(β a·σ) with explicit matrices.
pub fn exp_series_oracle(beta: f64, a: [f64; 3], terms: usize) -> [C64; 4] {
    let gen = mat_of(&PauliCoeffs::real(0.0, a.map(|v| beta * v)));
    let mut term = sigma(0);
    let mut acc = sigma(0);
    for n in 1..terms {
        term = mat_mul(&term, &gen);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= n as f64;
            }
        }
        for r in 0..2 {
            for c in 0..2 {
                acc[r][c] += term[r][c];
            }
        }
    }
    coeffs_of(&acc)
}

/// Worst errors of pauli_mul on random triples and of exp_spin against the series.
pub fn pauli_oracle_errors(samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        PauliCoeffs::new(c(), [c(), c(), c()])
    };
    let (mut mul_err, mut exp_err) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let prod = pauli_mul(&pauli_mul(&a, &b), &c);
        let oracle = coeffs_of(&mat_mul(&mat_mul(&mat_of(&a), &mat_of(&b)), &mat_of(&c)));
        mul_err = mul_err.max(max_diff(&prod, &oracle));
        let beta = rng.gen_range(0.0..1.0);
        let v = [0, 1, 2].map(|_| rng.gen_range(-2.0..2.0));
        exp_err = exp_err.max(max_diff(&exp_spin(beta, v), &exp_series_oracle(beta, v, tol::EXP_SPIN_SERIES_TERMS)));
    }
    (mul_err, exp_err)
}

/// Leading-order spin Maxwellian against e^{h0} times the matrix series, and
/// the |a| returned when the leading spin moment is forced to vanish.
pub fn leading_spin_oracle() -> Result<(f64, f64)> {
    let g = Grid2D::square(16)?;
    let a0 = ScalarField::from_fn(g, |x, y| 0.3 * x.cos() - 0.2 * y.sin());
    let avec = [
        ScalarField::from_fn(g, |x, _| 0.8 * x.sin()),
        ScalarField::from_fn(g, |_, y| -0.6 + 0.3 * y.cos()),
        ScalarField::from_fn(g, |x, y| 1.1 * (x + y).cos()),
    ];
    let m = maxwellian_leading_spin(&a0, &avec)?;
    let mut err = 0.0f64;
    for node in (0..g.len()).step_by(7) {
        for p in [(0.0, 0.0), (0.7, -1.2), (-2.0, 0.5)] {
            let a = [0, 1, 2].map(|j| avec[j].values[node]);
            let weight = (a0.values[node] - 0.5 * (p.0 * p.0 + p.1 * p.1)).exp();
            let oracle = exp_series_oracle(1.0, a, tol::EXP_SPIN_SERIES_TERMS).map(|c| c * weight);
            err = err.max(max_diff(&m.eval(node, p), &oracle));
        }
    }
    Ok((err, solve_leading_spin_magnitude(0.0, 1.3)))
}

/// Worst order-k recursion residual over the sampled β values.
pub fn recursion_worst(s: &DiagScenario, k: usize) -> Result<f64> {
    let n = s.state(1.0)?;
    let inv = n.n0.map(|v| 1.0 / v);
    let a0 = n.n0.map(|v| (v / (2.0 * std::f64::consts::PI)).ln());
    let avec = [0, 1, 2].map(|j| &n.n[j] * &inv);
    recursion_residual(k, &tol::RECURSION_BETAS, &a0, &avec, s.alpha)
}

/// Charge error and raw spin error (ε units) of moments ∘ Maxwellian ∘ closure.
pub fn roundtrip_errors(s: &DiagScenario, eps: f64) -> Result<(f64, f64)> {
    let n = s.state(eps)?;
    let mult = multipliers_from_moments(&n, s.alpha)?;
    let back = moments_of(&maxwellian(&mult, 3)?, eps)?;
    let charge = (&back.n0 - &n.n0).max_abs();
    let spin = (0..3).map(|j| (&back.n[j] - &n.n[j]).max_abs()).fold(0.0, f64::max) * eps;
    Ok((charge, spin))
}

/// Residuals of the θ identities: ⟨θf⟩ (spectral V) and the quadratic-V
/// moment identities.
pub fn theta_residuals(s: &DiagScenario) -> Result<[f64; 3]> {
    let g = s.grid()?;
    let pg = PGrid::new(tol::THETA_PGRID.0, tol::THETA_PGRID.1)?;
    let v = s.potential_field()?;
    let f = PhaseSpaceField::from_fn(g, pg, |x, y, p1, p2| {
        let e = (-((p1 - 0.3 * x.sin()).powi(2) + (p2 + 0.2 * y.cos()).powi(2)) / 2.0).exp();
        [e * (1.0 + 0.2 * (x - y).cos()), 0.2 * e * p1, 0.1 * e * y.sin(), -0.3 * e * p2 * x.cos()]
    });
    let mass = theta_apply(&v, &f, s.eps)?.moment((0, 0)).iter().map(|c| c.max_abs()).fold(0.0, f64::max);
    let quad = QuadraticPotential { grid: g, c: 0.1, b: [0.4, -0.3], q: [[0.2, 0.05], [0.05, -0.1]] };
    let (m0, m1) = theta_moments_check(&quad, &f, s.eps)?;
    let sup = |field: &[PauliCoeffs]| field.iter().map(|c| c.max_abs()).fold(0.0, f64::max);
    Ok([mass, sup(&m0), sup(&m1[0]).max(sup(&m1[1]))])
}

/// 2V #_odd f − iεθf for f = exp(h0) built from the scenario density.
pub fn odd_product_residual(s: &DiagScenario, eps: f64) -> Result<f64> {
    let n = s.state(eps)?;
    let a0 = n.n0.map(|v| (v / (2.0 * std::f64::consts::PI)).ln());
    let sym = GaussianSymbol::exp_h0(1.0, &a0, DMAX);
    let pg = PGrid::new(tol::THETA_PGRID.0, tol::THETA_PGRID.1)?;
    odd_product_identity_residual(&s.potential_field()?, &sym, eps, pg)
}

/// Spin part of ⟨T M⟩ from analytic Gaussian moments of the order-3 Maxwellian.
fn transport_moment_spin(n: &SpinField, alpha: f64) -> Result<[ScalarField; 3]> {
    let eps = n.eps;
    let mult = multipliers_from_moments(n, alpha)?;
    let m = maxwellian(&mult, 3)?;
    let n0m = moments_of(&m, eps)?.n0;
    let cur = current_density(&mult, 3)?;
    let j = &cur.spin;
    // ⟨p⊥×M⟩ = (−⟨p1 M3⟩, −⟨p2 M3⟩, ⟨p1 M1⟩ + ⟨p2 M2⟩)
    let cross = [j[2][0].scale(-1.0), j[2][1].scale(-1.0), &j[0][0] + &j[1][1]];
    let gperp = n0m.grad_perp();
    Ok([0, 1, 2].map(|c| {
        let mut out = &j[c][0].dx1() + &j[c][1].dx2();
        out.add_scaled(alpha * eps, &gperp[c]);
        out.add_scaled(-2.0 * alpha, &cross[c]);
        out
    }))
}

fn sup3(f: &[ScalarField; 3]) -> f64 {
    f.iter().map(ScalarField::max_abs).fold(0.0, f64::max)
}

/// |⟨TM⟩ − 2ε n×a| / |2ε n×a| and |⟨TM⟩| at the given ε.
pub fn residual_current_errors(s: &DiagScenario, eps: f64) -> Result<(f64, f64)> {
    let n = s.state(eps)?;
    let tm = transport_moment_spin(&n, s.alpha)?;
    let rc = residual_current(&n, s.alpha)?;
    let diff = [0, 1, 2].map(|j| &tm[j] - &rc[j]);
    Ok((sup3(&diff) / sup3(&rc), sup3(&tm)))
}

/// Analytic ⟨TM⟩ against transport_apply on the sampled Maxwellian.
pub fn transport_moment_quadrature_error(s: &DiagScenario) -> Result<f64> {
    let n = s.state(s.eps)?;
    let analytic = transport_moment_spin(&n, s.alpha)?;
    let mult = multipliers_from_moments(&n, s.alpha)?;
    let w = maxwellian(&mult, 3)?.sample(PGrid::new(48, 9.0)?);
    let tw = transport_apply(&w, &s.potential_field()?, s.eps, s.alpha)?.moment((0, 0));
    let mut err = 0.0f64;
    for j in 0..3 {
        for (i, c) in tw.iter().enumerate() {
            err = err.max((c.component(j + 1).re - analytic[j].values[i]).abs());
        }
    }
    Ok(err)
}

/// ε = 0 local right-hand side against the spin-vector model.
pub fn spin_vector_reduction_error(s: &DiagScenario, bohm_sign: f64) -> Result<f64> {
    let n = s.state(0.0)?;
    let p = s.params(0.0, bohm_sign)?;
    let l = rhs_local(&n, &p)?;
    let v = rhs_spin_vector(&n, &p);
    Ok((0..4).map(|k| (&l[k] - &v[k]).max_abs()).fold(0.0, f64::max))
}

fn longitudinal_state(s: &DiagScenario, eps: f64) -> Result<SpinField> {
    let mut n = s.state(eps)?;
    let g = n.grid();
    n.n[0] = ScalarField::zeros(g);
    n.n[1] = ScalarField::zeros(g);
    Ok(n)
}

/// Local model projected on n± = n0 ± εn3 minus the two-component model.
pub fn two_component_residual(s: &DiagScenario, eps: f64, bohm_sign: f64) -> Result<f64> {
    let n = longitudinal_state(s, eps)?;
    let p = s.params(eps, bohm_sign)?;
    let l = rhs_local(&n, &p)?;
    let mut plus = n.n0.clone();
    plus.add_scaled(eps, &n.n[2]);
    let mut minus = n.n0.clone();
    minus.add_scaled(-eps, &n.n[2]);
    let [rp, rm] = rhs_two_component(&plus, &minus, &p)?;
    let mut lp = l[0].clone();
    lp.add_scaled(eps, &l[3]);
    let mut lm = l[0].clone();
    lm.add_scaled(-eps, &l[3]);
    Ok((&lp - &rp).max_abs().max((&lm - &rm).max_abs()))
}

/// Nonlocal (closure-based) minus local charge right-hand side.
pub fn nonlocal_charge_residual(s: &DiagScenario, eps: f64, bohm_sign: f64) -> Result<f64> {
    let n = s.state(eps)?;
    let p = s.params(eps, bohm_sign)?;
    let nl = nonlocal_rhs_probe(&n, &p)?;
    let l = rhs_local(&n, &p)?;
    Ok((&nl[0] - &l[0]).max_abs())
}

/// Observed orders between consecutive levels.
pub fn observed_orders(levels: &[f64], errors: &[f64]) -> Vec<f64> {
    levels.windows(2).zip(errors.windows(2)).map(|(l, e)| (e[0] / e[1]).ln() / (l[0] / l[1]).ln()).collect()
}

/// True iff every slope lies within the order window around `expected`.
pub fn orders_within(slopes: &[f64], expected: f64) -> bool {
    !slopes.is_empty() && slopes.iter().all(|s| s.is_finite() && (s - expected).abs() <= tol::ORDER_WINDOW)
}

fn stable_dt(model: &FluidModel, state: &crate::fluid::FluidState, cap: f64) -> f64 {
    (0.5 * model.stability_bound(state)).min(cap)
}

/// Relative drift of ∫n0 under the local model over the given horizon.
pub fn charge_drift(s: &DiagScenario, t_end: f64, bohm_sign: f64) -> Result<f64> {
    let model = FluidModel::new(ModelKind::Local, s.params(s.eps, bohm_sign)?)?;
    let mut st = model.state_from_spin(&s.state(s.eps)?, 0.0)?;
    let m0 = st.comps[0].integral();
    let mut worst = 0.0f64;
    let chunks = (t_end / 0.1).ceil().max(1.0) as usize;
    for k in 1..=chunks {
        let dt = stable_dt(&model, &st, 0.01);
        model.integrate(&mut st, dt, t_end * k as f64 / chunks as f64, |x, _| {
            worst = worst.max((x.comps[0].integral() - m0).abs() / m0.abs());
            Ok(())
        })?;
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropicProbe {
    /// max over output steps of E(t_{k+1}) − E(t_k).
    pub max_energy_increment: f64,
    /// Richardson dE/dt at t = 0.
    pub de_dt: f64,
    pub dissipation: f64,
    pub relative_mismatch: f64,
}

/// Energy decay along an entropic trajectory and dE/dt against the dissipation.
pub fn entropic_probe(s: &DiagScenario) -> Result<EntropicProbe> {
    let p = s.params(s.eps, 1.0)?;
    let model = FluidModel::new(ModelKind::Entropic, p.clone())?;
    let n = SpinField::spinless(s.n0.build(s.grid()?), s.eps);
    let start = model.state_from_spin(&n, 0.0)?;
    let energy = |st: &crate::fluid::FluidState| -> Result<f64> {
        model.energy(st)?.ok_or_else(|| Error::Invalid("entropic energy unavailable".into()))
    };
    let e0 = energy(&start)?;
    let h = 1e-3;
    let mut st = start.clone();
    model.integrate(&mut st, h, h, |_, _| Ok(()))?;
    let e1 = energy(&st)?;
    model.integrate(&mut st, h, 2.0 * h, |_, _| Ok(()))?;
    let e2 = energy(&st)?;
    let de_dt = (4.0 * e1 - e2 - 3.0 * e0) / (2.0 * h);
    let dissipation = crate::fluid::rhs_entropic_spinless(&start.comps[0], &p)?.dissipation;

    let mut st = start;
    let dt = stable_dt(&model, &st, 0.01);
    let mut last = e0;
    let mut worst = f64::NEG_INFINITY;
    let outputs = 10;
    for k in 1..=outputs {
        model.integrate(&mut st, dt, 0.05 * k as f64, |_, _| Ok(()))?;
        let e = energy(&st)?;
        worst = worst.max(e - last);
        last = e;
    }
    Ok(EntropicProbe {
        max_energy_increment: worst,
        de_dt,
        dissipation,
        relative_mismatch: (de_dt - dissipation).abs() / dissipation.abs(),
    })
}

/// Measured and expected decay rates of a homogeneous spin under the local model.
pub fn relaxation_rates(alpha: f64, tau: f64, eps: f64) -> Result<[(f64, f64); 3]> {
    let g = Grid2D::square(16)?;
    let init = [0.2, -0.15, 0.3];
    let n = SpinField::new(ScalarField::constant(g, 1.0), init.map(|c| ScalarField::constant(g, c)), eps);
    let model = FluidModel::new(ModelKind::Local, FluidParams::new(eps, alpha, tau, ScalarField::zeros(g)))?;
    let mut st = model.state_from_spin(&n, 0.0)?;
    let base = 4.0 * alpha * alpha * tau;
    let t_end = 1.0 / base;
    model.integrate(&mut st, t_end / 200.0, t_end, |_, _| Ok(()))?;
    let expected = [base, base, 2.0 * base];
    Ok([0, 1, 2].map(|j| (-(st.comps[j + 1].values[0] / init[j]).ln() / t_end, expected[j])))
}

/// Smallest eigenvalue real part over random physical states, and the worst
/// numeric/closed-form eigenvalue disagreement.
pub fn parabolicity_probe(samples: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Grid2D::square(16)?;
    let (mut min_re, mut agree) = (f64::INFINITY, 0.0f64);
    let mut drawn = 0;
    while drawn < samples {
        let field = |rng: &mut ChaCha8Rng, c: f64, a: f64| {
            let mut f = FieldSpec::constant(c);
            for _ in 0..3 {
                let m = [rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3)];
                f = f.with_mode(rng.gen_range(-a..a), m, rng.gen_range(0.0..std::f64::consts::TAU));
            }
            f.build(g)
        };
        let eps = rng.gen_range(0.05..1.0);
        let n0 = field(&mut rng, 2.0, 0.3);
        let spin = [0, 1, 2].map(|_| field(&mut rng, 0.0, 0.6));
        let n = SpinField::new(n0, spin, eps);
        if !n.is_physical() {
            continue;
        }
        drawn += 1;
        min_re = min_re.min(min_diffusion_real_part(&n));
        for i in (0..g.len()).step_by(5) {
            let b = [0, 1, 2].map(|j| n.n[j].values[i] / n.n0.values[i]);
            let (x, y) = (diffusion_eigenvalues(b, eps), diffusion_eigenvalues_analytic(b, eps));
            agree = agree.max(x.iter().zip(&y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        }
    }
    Ok((min_re, agree))
}

// ---------------------------------------------------------------------------
// Catalog assembly.

#[derive(Default)]
struct Outcome {
    residuals: BTreeMap<String, Measurement>,
    slopes: Vec<f64>,
    expected_order: Option<f64>,
    tolerance: f64,
}

impl Outcome {
    fn limit(mut self, name: &str, value: f64, limit: f64) -> Self {
        if self.tolerance == 0.0 {
            self.tolerance = limit;
        }
        self.residuals.insert(name.into(), Measurement { value, limit: Some(limit) });
        self
    }

    fn info(mut self, name: &str, value: f64) -> Self {
        self.residuals.insert(name.into(), Measurement { value, limit: None });
        self
    }

    fn order(mut self, slopes: Vec<f64>, expected: f64) -> Self {
        self.slopes = slopes;
        self.expected_order = Some(expected);
        if self.tolerance == 0.0 {
            self.tolerance = tol::ORDER_WINDOW;
        }
        self
    }

    fn verdict(&self) -> (Status, Option<String>) {
        let mut fails = Vec::new();
        for (k, m) in &self.residuals {
            if let Some(l) = m.limit {
                if !(m.value < l) {
                    fails.push(format!("{k} = {:.3e} not below {l:.1e}", m.value));
                }
            }
        }
        if let Some(e) = self.expected_order {
            if !orders_within(&self.slopes, e) {
                fails.push(format!("observed orders {:?} outside {e} ± {}", round3(&self.slopes), tol::ORDER_WINDOW));
            }
        }
        if fails.is_empty() {
            (Status::Pass, None)
        } else {
            (Status::Fail, Some(fails.join("; ")))
        }
    }
}

fn round3(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1000.0).round() / 1000.0).collect()
}

#[derive(Clone, Copy)]
enum Scope {
    Global,
    PerScenario { quantum: bool, rashba: bool },
}

type Runner = fn(&CatalogConfig, Option<&DiagScenario>) -> Result<Outcome>;

struct CheckDef {
    name: &'static str,
    anchor: &'static str,
    covers: &'static [&'static str],
    scope: Scope,
    run: Runner,
}

fn scn(s: Option<&DiagScenario>) -> Result<&DiagScenario> {
    s.ok_or_else(|| Error::Invalid("check needs a scenario".into()))
}

fn ratio_test<F>(cfg: &CatalogConfig, f: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64) -> Result<f64>,
{
    if cfg.eps_levels.len() < 2 {
        return Err(Error::Invalid("ratio tests need at least two eps levels".into()));
    }
    let errs = cfg.eps_levels.iter().map(|&e| f(e)).collect::<Result<Vec<_>>>()?;
    Ok((observed_orders(&cfg.eps_levels, &errs), errs))
}

fn with_levels(mut o: Outcome, cfg: &CatalogConfig, errs: &[f64]) -> Outcome {
    for (e, v) in cfg.eps_levels.iter().zip(errs) {
        o = o.info(&format!("error@eps={e}"), *v);
    }
    o
}

fn recursion_check(s: &DiagScenario, k: usize) -> Result<Outcome> {
    Ok(Outcome::default().limit("residual", recursion_worst(s, k)?, tol::RECURSION))
}

fn catalog_defs() -> Vec<CheckDef> {
    let quantum = Scope::PerScenario { quantum: true, rashba: false };
    let always = Scope::PerScenario { quantum: false, rashba: false };
    vec![
        CheckDef {
            name: "pauli_matrix_oracle",
            anchor: "Pauli product and spin exponential against explicit 2x2 matrices",
            covers: &["pauli_mul", "exp_spin"],
            scope: Scope::Global,
            run: |_, _| {
                let (m, e) = pauli_oracle_errors(tol::PAULI_SAMPLES / 5, tol::SEED);
                Ok(Outcome::default().limit("mul", m, tol::PAULI_MATRIX).limit("exp_series", e, tol::EXP_SPIN_SERIES))
            },
        },
        CheckDef {
            name: "leading_spin_exponential",
            anchor: "leading-order Maxwellian with an O(1) spin multiplier is exp(h0) times cosh/sinh",
            covers: &["maxwellian"],
            scope: Scope::Global,
            run: |_, _| {
                let (e, r) = leading_spin_oracle()?;
                Ok(Outcome::default().limit("series", e, tol::LEADING_SPIN).limit(
                    "zero_moment_multiplier",
                    r,
                    tol::SPIN_SOLVER,
                ))
            },
        },
        CheckDef {
            name: "recursion_k1",
            anchor: "recursive ordinary differential equations in beta, order one",
            covers: &["g_order", "recursion_residual", "moyal_j"],
            scope: quantum,
            run: |_, s| recursion_check(scn(s)?, 1),
        },
        CheckDef {
            name: "recursion_k2",
            anchor: "recursive ordinary differential equations in beta, order two",
            covers: &["g_order", "recursion_residual", "moyal_j"],
            scope: quantum,
            run: |_, s| recursion_check(scn(s)?, 2),
        },
        CheckDef {
            name: "recursion_k3",
            anchor: "recursive ordinary differential equations in beta, order three",
            covers: &["g_order", "recursion_residual", "moyal_j"],
            scope: quantum,
            run: |_, s| recursion_check(scn(s)?, 3),
        },
        CheckDef {
            name: "roundtrip_charge_order",
            anchor: "semiclassical expansion of the Lagrange multipliers, charge moment",
            covers: &["maxwellian", "multipliers_from_moments"],
            scope: quantum,
            run: |c, s| {
                let s = scn(s)?;
                let (slopes, errs) = ratio_test(c, |e| roundtrip_errors(s, e).map(|r| r.0))?;
                Ok(with_levels(Outcome::default(), c, &errs).order(slopes, tol::ROUNDTRIP_CHARGE_ORDER))
            },
        },
        CheckDef {
            name: "roundtrip_spin_order",
            anchor: "semiclassical expansion of the Lagrange multipliers, spin moment",
            covers: &["maxwellian", "multipliers_from_moments"],
            scope: quantum,
            run: |c, s| {
                let s = scn(s)?;
                let (slopes, errs) = ratio_test(c, |e| roundtrip_errors(s, e).map(|r| r.1))?;
                Ok(with_levels(Outcome::default(), c, &errs).order(slopes, tol::ROUNDTRIP_SPIN_ORDER_DERIVED))
            },
        },
        CheckDef {
            name: "theta_identities",
            anchor: "moments of the pseudo-differential potential operator and the odd Moyal product",
            covers: &["theta_apply", "theta_moments_check", "moyal_j"],
            scope: quantum,
            run: |c, s| {
                let s = scn(s)?;
                let [mass, m0, m1] = theta_residuals(s)?;
                let odd = odd_product_residual(s, tol::ODD_PRODUCT_EPS)?;
                let (slopes, errs) = ratio_test(c, |e| odd_product_residual(s, e))?;
                Ok(with_levels(Outcome::default(), c, &errs)
                    .limit("mass_spectral_v", mass, tol::THETA_MOMENTS)
                    .limit("mass_quadratic_v", m0, tol::THETA_MOMENTS)
                    .limit("momentum_quadratic_v", m1, tol::THETA_MOMENTS)
                    .limit("odd_product", odd, tol::ODD_PRODUCT)
                    .order(slopes, tol::ODD_PRODUCT_ORDER))
            },
        },
        CheckDef {
            name: "residual_current",
            anchor: "equilibrium residual current 2 eps n x a",
            covers: &["current_density", "residual_current", "maxwellian", "transport_apply"],
            scope: quantum,
            run: |c, s| {
                let s = scn(s)?;
                let (rel, _) = residual_current_errors(s, tol::RESIDUAL_CURRENT_EPS)?;
                let quad = transport_moment_quadrature_error(s)?;
                let (slopes, errs) = ratio_test(c, |e| residual_current_errors(s, e).map(|r| r.1))?;
                Ok(with_levels(Outcome::default(), c, &errs)
                    .limit("relative_error", rel, tol::RESIDUAL_CURRENT)
                    .limit("quadrature_vs_analytic", quad, tol::TRANSPORT_MOMENT)
                    .order(slopes, tol::RESIDUAL_CURRENT_ORDER))
            },
        },
        CheckDef {
            name: "spin_vector_reduction",
            anchor: "eps = 0 reduces the local model to the spin-vector drift-diffusion model",
            covers: &["rhs_local", "rhs_spin_vector"],
            scope: always,
            run: |c, s| {
                Ok(Outcome::default().limit(
                    "max_abs",
                    spin_vector_reduction_error(scn(s)?, c.bohm_sign())?,
                    tol::SPIN_VECTOR_REDUCTION,
                ))
            },
        },
        CheckDef {
            name: "two_component_consistency",
            anchor: "n+- = n0 +- eps n3 solve the two-component model",
            covers: &["rhs_two_component", "rhs_local", "bohm"],
            scope: quantum,
            run: |c, s| {
                let s = scn(s)?;
                let (slopes, errs) = ratio_test(c, |e| two_component_residual(s, e, c.bohm_sign()))?;
                Ok(with_levels(Outcome::default(), c, &errs).order(slopes, tol::TWO_COMPONENT_ORDER_DERIVED))
            },
        },
        CheckDef {
            name: "nonlocal_charge_consistency",
            anchor: "nonlocal charge equation through the semiclassical closure matches the local one",
            covers: &["rhs_local", "current_density", "multipliers_from_moments", "bohm"],
            scope: quantum,
            run: |c, s| {
                let s = scn(s)?;
                let (slopes, errs) = ratio_test(c, |e| nonlocal_charge_residual(s, e, c.bohm_sign()))?;
                Ok(with_levels(Outcome::default(), c, &errs).order(slopes, tol::NONLOCAL_CHARGE_ORDER))
            },
        },
        CheckDef {
            name: "charge_conservation",
            anchor: "divergence-form charge equation conserves the total charge",
            covers: &["step", "rhs_local"],
            scope: always,
            run: |c, s| {
                let d = charge_drift(scn(s)?, tol::CONSERVATION_T_END, c.bohm_sign())?;
                Ok(Outcome::default().limit("relative_drift", d, tol::CHARGE_DRIFT))
            },
        },
        CheckDef {
            name: "entropic_energy_decay",
            anchor: "energy of the entropic model is a decreasing function of time",
            covers: &["rhs_entropic_spinless", "step"],
            scope: always,
            run: |_, s| {
                let e = entropic_probe(scn(s)?)?;
                Ok(Outcome::default()
                    .limit("dissipation_mismatch", e.relative_mismatch, tol::DISSIPATION_MATCH)
                    .limit("max_energy_increment", e.max_energy_increment, 0.0)
                    .info("de_dt", e.de_dt)
                    .info("dissipation", e.dissipation))
            },
        },
        CheckDef {
            name: "relaxation_rates",
            anchor: "D'yakonov-Perel' spin relaxation rates",
            covers: &["step", "rhs_local"],
            scope: Scope::PerScenario { quantum: false, rashba: true },
            run: |_, s| {
                let s = scn(s)?;
                let r = relaxation_rates(s.alpha, s.tau, s.eps)?;
                let worst = r.iter().map(|(m, e)| (m / e - 1.0).abs()).fold(0.0, f64::max);
                Ok(Outcome::default()
                    .limit("relative_rate_error", worst, tol::RELAXATION_RATE)
                    .info("rate_n1", r[0].0)
                    .info("rate_n3", r[2].0))
            },
        },
        CheckDef {
            name: "parabolicity",
            anchor: "eigenvalues of the cross-diffusion matrix have positive real parts",
            covers: &["rhs_local"],
            scope: Scope::Global,
            run: |_, _| {
                let (min_re, agree) = parabolicity_probe(tol::PARABOLIC_SAMPLES, tol::SEED)?;
                Ok(Outcome::default().limit("negated_min_real_part", -min_re, 0.0).limit(
                    "closed_form",
                    agree,
                    tol::EIGEN_AGREEMENT,
                ))
            },
        },
        CheckDef {
            name: "hydrodynamic_ratio",
            anchor: "kinetic BGK model against the local fluid model, first order in tau",
            covers: &["kinetic_step", "hydrodynamic_compare", "rhs_local", "step"],
            scope: Scope::Global,
            run: |c, _| {
                if !c.include_kinetic {
                    return Err(Error::Invalid("kinetic comparison disabled".into()));
                }
                let r = HydroScenario::smooth(0.5, false).run(&tol::TAU_LEVELS, tol::KINETIC_DT_OVER_TAU)?;
                let (lo, hi) = tol::TAU_RATIO;
                let worst = r.ratios.iter().map(|x| (x - 0.5 * (lo + hi)).abs()).fold(0.0, f64::max);
                let mut o =
                    Outcome::default().limit("ratio_distance_from_center", worst, 0.5 * (hi - lo) + f64::EPSILON);
                for row in &r.rows {
                    o = o.info(&format!("rel_error@tau={}", row.tau), row.rel_error);
                }
                o.slopes = r.ratios.clone();
                Ok(o)
            },
        },
    ]
}

/// Names of required operations that no catalog entry exercises.
pub fn coverage_gaps() -> Vec<&'static str> {
    let defs = catalog_defs();
    REQUIRED_OPS.iter().copied().filter(|op| !defs.iter().any(|d| d.covers.contains(op))).collect()
}

struct Job<'a> {
    def: &'a CheckDef,
    scenario: Option<&'a DiagScenario>,
    name: String,
}

fn skip_reason(scope: Scope, s: &DiagScenario) -> Option<String> {
    match scope {
        Scope::PerScenario { quantum: true, .. } if !s.is_quantum() => Some("scenario has eps = 0".into()),
        Scope::PerScenario { rashba: true, .. } if !s.is_rashba() => Some("scenario has alpha = 0".into()),
        _ => None,
    }
}

fn run_job(cfg: &CatalogConfig, job: &Job) -> CheckReport {
    let (scenario, hash, resolution) = match job.scenario {
        Some(s) => (s.name.clone(), content_hash(&(s, &cfg.eps_levels, cfg.mutate_bohm)), format!("{0}x{0}", s.n)),
        None => {
            ("builtin".to_string(), content_hash(&(job.def.name, &cfg.eps_levels, cfg.mutate_bohm)), "builtin".into())
        }
    };
    let mut report = CheckReport {
        name: job.name.clone(),
        anchor: job.def.anchor.into(),
        scenario,
        scenario_hash: hash,
        resolution,
        residuals: BTreeMap::new(),
        tolerance: 0.0,
        expected_order: None,
        slopes: Vec::new(),
        status: Status::Skip,
        reason: None,
        covers: job.def.covers.iter().map(|s| s.to_string()).collect(),
    };
    if let Some(s) = job.scenario {
        if let Some(r) = skip_reason(job.def.scope, s) {
            report.reason = Some(r);
            return report;
        }
    }
    if job.def.name == "hydrodynamic_ratio" && !cfg.include_kinetic {
        report.reason = Some("kinetic comparison disabled".into());
        return report;
    }
    match (job.def.run)(cfg, job.scenario) {
        Ok(o) => {
            let (status, reason) = o.verdict();
            report.status = status;
            report.reason = reason;
            report.tolerance = o.tolerance;
            report.expected_order = o.expected_order;
            report.slopes = o.slopes;
            report.residuals = o.residuals;
        }
        Err(e) => {
            report.status = Status::Fail;
            report.reason = Some(format!("error: {e}"));
        }
    }
    log::info!("{} {:?}", report.name, report.status);
    report
}

/// Runs the catalog; results are sorted by name. A coverage entry is always included.
pub fn check_catalog(cfg: &CatalogConfig) -> Vec<CheckReport> {
    let defs = catalog_defs();
    let mut jobs = Vec::new();
    for def in &defs {
        match def.scope {
            Scope::Global => jobs.push(Job { def, scenario: None, name: def.name.to_string() }),
            Scope::PerScenario { .. } => {
                for s in &cfg.scenarios {
                    jobs.push(Job { def, scenario: Some(s), name: format!("{}/{}", def.name, s.name) });
                }
            }
        }
    }
    if let Some(pat) = &cfg.only {
        jobs.retain(|j| j.name.contains(pat.as_str()));
    }
    let mut reports = par::map_range(jobs.len(), |i| run_job(cfg, &jobs[i]));
    let gaps = coverage_gaps();
    reports.push(CheckReport {
        name: "catalog_coverage".into(),
        anchor: "every model operation is exercised by the catalog".into(),
        scenario: "builtin".into(),
        scenario_hash: content_hash(&REQUIRED_OPS),
        resolution: "builtin".into(),
        residuals: BTreeMap::from([(
            "missing_ops".to_string(),
            Measurement { value: gaps.len() as f64, limit: Some(0.5) },
        )]),
        tolerance: 0.5,
        expected_order: None,
        slopes: Vec::new(),
        status: if gaps.is_empty() { Status::Pass } else { Status::Fail },
        reason: (!gaps.is_empty()).then(|| format!("not covered: {}", gaps.join(", "))),
        covers: Vec::new(),
    });
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    reports
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.status != Status::Fail)
}

/// Fixed-width table, one line per check.
/// The limited measurement closest to (or furthest past) its limit, as `(value, limit)`.
fn worst_measurement(r: &CheckReport) -> Option<(f64, f64)> {
    let severity = |v: f64, l: f64| {
        if l > 0.0 {
            v / l
        } else if v < l {
            0.0
        } else {
            f64::INFINITY
        }
    };
    r.residuals
        .values()
        .filter_map(|m| m.limit.map(|l| (m.value, l)))
        .max_by(|a, b| severity(a.0, a.1).total_cmp(&severity(b.0, b.1)))
}

pub fn render_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<width$}  {:<6}  {:>10}  {:>8}  {}\n", "name", "status", "worst", "tol", "orders / note");
    for r in reports {
        let worst = worst_measurement(r);
        let status = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        let mut note = String::new();
        if !r.slopes.is_empty() {
            let _ = write!(note, "{:?}", round3(&r.slopes));
            if let Some(e) = r.expected_order {
                let _ = write!(note, " (expect {e})");
            }
        }
        if let Some(reason) = &r.reason {
            if !note.is_empty() {
                note.push_str("  ");
            }
            note.push_str(reason);
        }
        let (worst, limit) = match worst {
            Some((v, l)) => (format!("{v:.3e}"), l),
            None => ("-".to_string(), r.tolerance),
        };
        let _ = writeln!(out, "{:<width$}  {:<6}  {:>10}  {:>8.1e}  {}", r.name, status, worst, limit, note);
    }
    out
}

/// Convergence orders of the ratio-test quantities at the given ε levels.
pub fn ratio_harness(scenarios: &[DiagScenario], levels: &[f64]) -> Result<Vec<(String, Vec<f64>)>> {
    if levels.len() < 2 {
        return Err(Error::Invalid("ratio harness needs at least two eps levels".into()));
    }
    let mut out = Vec::new();
    for s in scenarios.iter().filter(|s| s.is_quantum()) {
        let series: [(&str, Box<dyn Fn(f64) -> Result<f64>>); 5] = [
            ("roundtrip_charge", Box::new(|e| roundtrip_errors(s, e).map(|r| r.0))),
            ("roundtrip_spin", Box::new(|e| roundtrip_errors(s, e).map(|r| r.1))),
            ("residual_current", Box::new(|e| residual_current_errors(s, e).map(|r| r.1))),
            ("two_component", Box::new(|e| two_component_residual(s, e, 1.0))),
            ("nonlocal_charge", Box::new(|e| nonlocal_charge_residual(s, e, 1.0))),
        ];
        for (name, f) in series {
            let errs = levels.iter().map(|&e| f(e)).collect::<Result<Vec<_>>>()?;
            out.push((format!("{name}/{}", s.name), observed_orders(levels, &errs)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_required_operation_is_covered() {
        assert!(coverage_gaps().is_empty(), "{:?}", coverage_gaps());
    }

    #[test]
    fn series_oracle_matches_closed_form() {
        let e = exp_series_oracle(0.7, [0.3, -0.4, 1.2], 40);
        let r = (0.09f64 + 0.16 + 1.44).sqrt();
        assert!((e[0].re - (0.7 * r).cosh()).abs() < 1e-13);
        assert!((e[3].re - (0.7 * r).sinh() * 1.2 / r).abs() < 1e-13);
    }

    #[test]
    fn orders_from_geometric_levels() {
        let levels = [0.2, 0.1, 0.05];
        let errs = levels.map(|e: f64| 3.0 * e.powi(4));
        let s = observed_orders(&levels, &errs);
        assert!(s.iter().all(|x| (x - 4.0).abs() < 1e-12));
        assert!(orders_within(&s, 4.4) && !orders_within(&s, 3.4));
    }

    #[test]
    fn classical_scenario_skips_quantum_checks() {
        let cfg = CatalogConfig {
            scenarios: default_scenarios().into_iter().filter(|s| s.name == "classical").collect(),
            only: Some("recursion".into()),
            ..CatalogConfig::default()
        };
        let reports = check_catalog(&cfg);
        let rec: Vec<_> = reports.iter().filter(|r| r.name.starts_with("recursion")).collect();
        assert_eq!(rec.len(), 3);
        assert!(rec.iter().all(|r| r.status == Status::Skip && r.reason.is_some()));
    }

    #[test]
    fn bohm_mutation_is_caught_by_the_consistency_checks() {
        let run = |mutate_bohm: bool, only: &str| {
            let cfg = CatalogConfig {
                scenarios: default_scenarios().into_iter().filter(|s| s.name == "smooth_a").collect(),
                only: Some(only.into()),
                mutate_bohm,
                ..CatalogConfig::default()
            };
            check_catalog(&cfg).into_iter().filter(|r| r.name != "catalog_coverage").collect::<Vec<_>>()
        };
        for name in ["two_component", "nonlocal_charge", "spin_vector"] {
            let clean = run(false, name);
            assert!(clean.iter().all(|r| r.status == Status::Pass), "{}", render_table(&clean));
            let mutated = run(true, name);
            let expect = if name == "spin_vector" { Status::Pass } else { Status::Fail };
            assert!(mutated.iter().all(|r| r.status == expect), "{}", render_table(&mutated));
        }
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let s = default_scenarios();
        assert_eq!(content_hash(&s[0]), content_hash(&s[0].clone()));
        assert_ne!(content_hash(&s[0]), content_hash(&s[1]));
        assert_eq!(content_hash(&s[0]).len(), 64);
    }
}
