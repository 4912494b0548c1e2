//! Scenario runner and verification front end.
//!
//! `series.csv` columns, in order: `t`, `mass` (∫n0), `E_entropic` (empty
//! unless the entropic model is active), `max_abs_n_over_n0` (max of |n|/n0),
//! and `l2_n0` … `l2_n3` (L² norms over the torus).

pub mod run;
pub mod scenario;
#[cfg(test)]
mod shipped;

pub use run::{output_root, read_series, run_scenario, Manifest, Row, RunError, RunSummary, CSV_COLUMNS};
pub use scenario::{ModelChoice, Scenario, ScenarioError};

use serde::Serialize;
use spinqdd::diagnostics::{
    all_passed, check_catalog, default_scenarios, ratio_harness, render_table, CatalogConfig, CheckReport,
};
use std::fmt::Write as _;
use std::path::Path;

/// Maximum absolute column differences between two runs.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub rows: usize,
    pub max_abs_diff: Vec<(String, f64)>,
}

impl Comparison {
    pub fn render(&self) -> String {
        let mut out = format!("{} aligned rows\n", self.rows);
        for (c, d) in &self.max_abs_diff {
            let _ = writeln!(out, "{c:<20} {d:.6e}");
        }
        out
    }
}

/// Compares `series.csv` of two run directories on the given columns.
pub fn compare_runs(a: &Path, b: &Path, cols: &[String]) -> Result<Comparison, RunError> {
    let ra = read_series(&a.join("series.csv"))?;
    let rb = read_series(&b.join("series.csv"))?;
    let bad = |m: String| RunError::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, m));
    if ra.len() != rb.len() {
        return Err(bad(format!("row counts differ: {} vs {}", ra.len(), rb.len())));
    }
    for c in cols {
        if !CSV_COLUMNS.contains(&c.as_str()) {
            return Err(bad(format!("unknown column {c:?}; available: {}", CSV_COLUMNS.join(", "))));
        }
    }
    for (x, y) in ra.iter().zip(&rb) {
        if (x.t - y.t).abs() > 1e-12 * x.t.abs().max(1.0) {
            return Err(bad(format!("time grids differ at t = {} vs {}", x.t, y.t)));
        }
    }
    let max_abs_diff = cols
        .iter()
        .map(|c| {
            let d = ra
                .iter()
                .zip(&rb)
                .map(|(x, y)| match (x.column(c), y.column(c)) {
                    (Some(p), Some(q)) => (p - q).abs(),
                    (None, None) => 0.0,
                    _ => f64::INFINITY,
                })
                .fold(0.0, f64::max);
            (c.clone(), d)
        })
        .collect();
    Ok(Comparison { rows: ra.len(), max_abs_diff })
}

/// Final-row summary of one sweep member.
#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub dir: String,
    pub last: Row,
}

/// Runs `scenario` once per value of `param`, each into its own directory, and
/// writes `sweep.csv` with the final row of every run.
pub fn sweep(s: &Scenario, param: &str, values: &[f64], root: &Path) -> Result<Vec<SweepPoint>, RunError> {
    let base = root.join(format!("{}_sweep_{param}", s.name));
    let mut points = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let mut member = s.with_param(param, v)?;
        member.name = format!("{}_{param}_{i:03}", s.name);
        let summary = run_scenario(&member, &base)?;
        let last = summary.rows.last().cloned().expect("at least one row");
        points.push(SweepPoint { value: v, dir: summary.dir.display().to_string(), last });
    }
    let mut w = csv::Writer::from_path(base.join("sweep.csv"))?;
    w.write_record(std::iter::once(param).chain(CSV_COLUMNS))?;
    for p in &points {
        let mut rec = vec![p.value.to_string()];
        rec.extend(CSV_COLUMNS.iter().map(|c| p.last.column(c).map_or(String::new(), |v| v.to_string())));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(points)
}

/// Options of the `validate` command.
#[derive(Clone, Debug, Default)]
pub struct ValidateOptions {
    pub only: Option<String>,
    pub eps: Option<Vec<f64>>,
    pub mutate_bohm: bool,
    pub skip_kinetic: bool,
}

/// Runs the catalog; returns the reports, the rendered table and overall success.
pub fn validate(opts: &ValidateOptions) -> (Vec<CheckReport>, String, bool) {
    let mut cfg = CatalogConfig { only: opts.only.clone(), mutate_bohm: opts.mutate_bohm, ..CatalogConfig::default() };
    if let Some(e) = &opts.eps {
        cfg.eps_levels = e.clone();
    }
    cfg.include_kinetic = !opts.skip_kinetic;
    let reports = check_catalog(&cfg);
    let table = render_table(&reports);
    let ok = all_passed(&reports);
    (reports, table, ok)
}

/// Observed convergence orders of every ratio test at the given ε levels.
pub fn ratio_orders(levels: &[f64]) -> spinqdd::Result<String> {
    let rows = ratio_harness(&default_scenarios(), levels)?;
    let mut out = format!("eps levels {levels:?}\n");
    for (name, orders) in rows {
        let o: Vec<String> = orders.iter().map(|x| format!("{x:.3}")).collect();
        let _ = writeln!(out, "{name:<32} {}", o.join("  "));
    }
    Ok(out)
}
