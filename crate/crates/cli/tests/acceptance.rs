//! Acceptance criteria. Every criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use spinqdd::diagnostics::{
    charge_drift, default_scenarios, entropic_probe, observed_orders, odd_product_residual, orders_within,
    parabolicity_probe, pauli_oracle_errors, recursion_worst, relaxation_rates, residual_current_errors,
    roundtrip_errors, spin_vector_reduction_error, theta_residuals, transport_moment_quadrature_error,
    two_component_residual, DiagScenario, HydroScenario,
};
use spinqdd::tolerances as tol;
use std::process::ExitCode;
use std::time::Instant;

type Outcome = spinqdd::Result<Vec<(String, bool)>>;

fn below(label: &str, value: f64, limit: f64) -> (String, bool) {
    (format!("{label} {value:.3e} < {limit:.0e}"), value < limit)
}

fn order(label: &str, slopes: &[f64], expected: f64) -> (String, bool) {
    let s: Vec<String> = slopes.iter().map(|x| format!("{x:.3}")).collect();
    (
        format!("{label} orders [{}] vs {expected} ± {}", s.join(", "), tol::ORDER_WINDOW),
        orders_within(slopes, expected),
    )
}

fn quantum() -> Vec<DiagScenario> {
    default_scenarios().into_iter().filter(|s| s.is_quantum()).collect()
}

fn eps_series(f: impl Fn(f64) -> spinqdd::Result<f64>) -> spinqdd::Result<Vec<f64>> {
    let errs = tol::EPS_LEVELS.iter().map(|&e| f(e)).collect::<spinqdd::Result<Vec<_>>>()?;
    Ok(observed_orders(&tol::EPS_LEVELS, &errs))
}

fn c1_pauli() -> Outcome {
    let (mul, exp) = pauli_oracle_errors(tol::PAULI_SAMPLES, tol::SEED);
    Ok(vec![
        below("pauli_mul vs matrices", mul, tol::PAULI_MATRIX),
        below("exp_spin vs series", exp, tol::EXP_SPIN_SERIES),
    ])
}

fn c2_recursion() -> Outcome {
    let mut out = Vec::new();
    for s in quantum() {
        for k in 1..=3 {
            out.push(below(&format!("{} k={k}", s.name), recursion_worst(&s, k)?, tol::RECURSION));
        }
    }
    Ok(out)
}

fn c3_roundtrip() -> Outcome {
    let mut out = Vec::new();
    for s in quantum() {
        let charge = eps_series(|e| roundtrip_errors(&s, e).map(|r| r.0))?;
        let spin = eps_series(|e| roundtrip_errors(&s, e).map(|r| r.1))?;
        out.push(order(&format!("{} charge", s.name), &charge, tol::ROUNDTRIP_CHARGE_ORDER));
        out.push(order(&format!("{} spin", s.name), &spin, tol::ROUNDTRIP_SPIN_ORDER_STATED));
    }
    Ok(out)
}

fn c4_theta() -> Outcome {
    let mut out = Vec::new();
    for s in quantum() {
        let [mass, m0, m1] = theta_residuals(&s)?;
        out.push(below(&format!("{} <θf> spectral V", s.name), mass, tol::THETA_MOMENTS));
        out.push(below(&format!("{} <θf> quadratic V", s.name), m0, tol::THETA_MOMENTS));
        out.push(below(&format!("{} <pθf>+∇V<f> quadratic V", s.name), m1, tol::THETA_MOMENTS));
        let odd = odd_product_residual(&s, tol::ODD_PRODUCT_EPS)?;
        out.push(below(&format!("{} iεθf = 2V#f at ε={}", s.name, tol::ODD_PRODUCT_EPS), odd, tol::ODD_PRODUCT));
    }
    Ok(out)
}

fn c5_reductions() -> Outcome {
    let mut out = Vec::new();
    for s in default_scenarios() {
        out.push(below(
            &format!("{} ε=0 local vs spin-vector", s.name),
            spin_vector_reduction_error(&s, 1.0)?,
            tol::SPIN_VECTOR_REDUCTION,
        ));
    }
    for s in quantum() {
        let slopes = eps_series(|e| two_component_residual(&s, e, 1.0))?;
        let ok = !slopes.is_empty() && slopes.iter().all(|x| *x >= tol::TWO_COMPONENT_ORDER_STATED - tol::ORDER_WINDOW);
        let s_txt: Vec<String> = slopes.iter().map(|x| format!("{x:.3}")).collect();
        out.push((
            format!(
                "{} two-component orders [{}] >= {} - {}",
                s.name,
                s_txt.join(", "),
                tol::TWO_COMPONENT_ORDER_STATED,
                tol::ORDER_WINDOW
            ),
            ok,
        ));
    }
    Ok(out)
}

fn c6_conservation() -> Outcome {
    let mut out = Vec::new();
    for s in default_scenarios() {
        out.push(below(
            &format!("{} charge drift", s.name),
            charge_drift(&s, tol::CONSERVATION_T_END, 1.0)?,
            tol::CHARGE_DRIFT,
        ));
        let e = entropic_probe(&s)?;
        out.push((
            format!("{} max energy increment {:.3e} < 0", s.name, e.max_energy_increment),
            e.max_energy_increment < 0.0,
        ));
        out.push(below(&format!("{} dE/dt vs dissipation", s.name), e.relative_mismatch, tol::DISSIPATION_MATCH));
    }
    Ok(out)
}

fn c7_relaxation() -> Outcome {
    let mut out = Vec::new();
    for s in default_scenarios().into_iter().filter(|s| s.is_rashba()) {
        let rates = relaxation_rates(s.alpha, s.tau, s.eps)?;
        for (j, (m, e)) in rates.iter().enumerate() {
            out.push(below(
                &format!("{} n{} rate {m:.6} vs {e:.6}", s.name, j + 1),
                (m / e - 1.0).abs(),
                tol::RELAXATION_RATE,
            ));
        }
    }
    Ok(out)
}

fn hydro_lines(label: &str, h: &HydroScenario) -> Outcome {
    let (lo, hi) = tol::TAU_RATIO;
    let report = h.run(&tol::TAU_LEVELS, tol::KINETIC_DT_OVER_TAU)?;
    let mut out = Vec::new();
    for (w, r) in tol::TAU_LEVELS.windows(2).zip(&report.ratios) {
        out.push((format!("{label} ratio τ {}/{} = {r:.3} in [{lo}, {hi}]", w[0], w[1]), (lo..=hi).contains(r)));
    }
    let small = h.run(&[tol::SMALL_TAU], tol::SMALL_TAU_DT_OVER_TAU)?;
    out.push(below(
        &format!("{label} deviation at τ={}", tol::SMALL_TAU),
        small.rows[0].rel_deviation,
        tol::KINETIC_DEVIATION,
    ));
    Ok(out)
}

fn c8_hydrodynamic() -> Outcome {
    let mut out = hydro_lines("rashba", &HydroScenario::smooth(0.5, false))?;
    out.extend(hydro_lines("classical", &HydroScenario::smooth(0.0, true))?);
    Ok(out)
}

fn c9_residual_current() -> Outcome {
    let mut out = Vec::new();
    for s in quantum() {
        let (rel, _) = residual_current_errors(&s, tol::RESIDUAL_CURRENT_EPS)?;
        out.push(below(
            &format!("{} <TM> vs 2εn×a at ε={}", s.name, tol::RESIDUAL_CURRENT_EPS),
            rel,
            tol::RESIDUAL_CURRENT,
        ));
        let slopes = eps_series(|e| residual_current_errors(&s, e).map(|r| r.1))?;
        out.push(order(&format!("{} |<TM>|", s.name), &slopes, tol::RESIDUAL_CURRENT_ORDER));
        out.push(below(
            &format!("{} analytic vs quadrature <TM>", s.name),
            transport_moment_quadrature_error(&s)?,
            tol::TRANSPORT_MOMENT,
        ));
    }
    Ok(out)
}

fn c10_parabolicity() -> Outcome {
    let (min_re, agree) = parabolicity_probe(tol::PARABOLIC_SAMPLES, tol::SEED)?;
    Ok(vec![
        (format!("min eigenvalue real part {min_re:.3e} > 0 over {} states", tol::PARABOLIC_SAMPLES), min_re > 0.0),
        below("numeric vs closed-form eigenvalues", agree, tol::EIGEN_AGREEMENT),
    ])
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("pauli algebra", c1_pauli),
        ("recursion residuals", c2_recursion),
        ("closure round trip orders", c3_roundtrip),
        ("theta identities", c4_theta),
        ("reductions", c5_reductions),
        ("conservation and dissipation", c6_conservation),
        ("relaxation rates", c7_relaxation),
        ("kinetic-fluid consistency", c8_hydrodynamic),
        ("residual current", c9_residual_current),
        ("parabolicity", c10_parabolicity),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(lines) => {
                let pass = lines.iter().all(|(_, ok)| *ok);
                let detail: Vec<String> =
                    lines.iter().map(|(text, ok)| if *ok { text.clone() } else { format!("{text} [fails]") }).collect();
                (pass, detail.join("; "))
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let status = if pass { "PASS" } else { "FAIL" };
        println!("{status} criterion {id:>2} {title} ({:.1} s): {detail}", start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
