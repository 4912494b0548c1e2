//! Scenario runs: time-series CSV, field snapshots and a deterministic manifest.

use crate::scenario::{ModelChoice, Scenario, ScenarioError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spinqdd::fields::io::write_snapshot;
use spinqdd::fields::{ScalarField, SpinField};
use spinqdd::fluid::{nonlocal_rhs_probe, rhs_local, FluidModel};
use spinqdd::kinetic::{KineticParams, KineticSolver};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "SPINQDD_OUTPUT_ROOT";
/// Columns of `series.csv`, in order.
pub const CSV_COLUMNS: [&str; 8] = ["t", "mass", "E_entropic", "max_abs_n_over_n0", "l2_n0", "l2_n1", "l2_n2", "l2_n3"];

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] spinqdd::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("run failed at t = {time}: {reason} (last valid state in {dump})")]
    Failed { time: f64, reason: String, dump: String },
}

/// One row of the time series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub t: f64,
    pub mass: f64,
    #[serde(rename = "E_entropic")]
    pub e_entropic: Option<f64>,
    pub max_abs_n_over_n0: f64,
    pub l2_n0: f64,
    pub l2_n1: f64,
    pub l2_n2: f64,
    pub l2_n3: f64,
}

impl Row {
    pub fn of(t: f64, n: &SpinField, energy: Option<f64>) -> Self {
        Self {
            t,
            mass: n.n0.integral(),
            e_entropic: energy,
            max_abs_n_over_n0: n.max_spin_ratio(),
            l2_n0: n.n0.l2(),
            l2_n1: n.n[0].l2(),
            l2_n2: n.n[1].l2(),
            l2_n3: n.n[2].l2(),
        }
    }

    pub fn column(&self, name: &str) -> Option<f64> {
        match name {
            "t" => Some(self.t),
            "mass" => Some(self.mass),
            "E_entropic" => self.e_entropic,
            "max_abs_n_over_n0" => Some(self.max_abs_n_over_n0),
            "l2_n0" => Some(self.l2_n0),
            "l2_n1" => Some(self.l2_n1),
            "l2_n2" => Some(self.l2_n2),
            "l2_n3" => Some(self.l2_n3),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run; byte-identical for identical inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: Scenario,
    pub scenario_sha256: String,
    pub versions: Versions,
    pub parallel: bool,
    pub steps: usize,
    pub t_final: f64,
    pub status: String,
    pub outputs: Vec<OutputFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Versions {
    pub spinqdd: String,
    pub spinqdd_cli: String,
}

impl Versions {
    pub fn current() -> Self {
        Self { spinqdd: spinqdd::VERSION.into(), spinqdd_cli: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub rows: Vec<Row>,
    pub manifest: Manifest,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Output root: explicit value, else the environment variable, else `runs`.
pub fn output_root(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

struct Writer {
    dir: PathBuf,
    rows: Vec<Row>,
    snapshots: Vec<PathBuf>,
}

impl Writer {
    fn snapshot(&mut self, tag: &str, t: f64, n: &SpinField) -> Result<(), RunError> {
        let dir = self.dir.join("snapshots");
        for (k, f) in n.components().iter().enumerate() {
            let name = format!("n{k}");
            let bin = write_snapshot(&dir, &format!("{tag}_{name}"), &name, t, f)?;
            self.snapshots.push(bin.clone());
            self.snapshots.push(bin.with_extension("json"));
        }
        Ok(())
    }

    fn dump(&self, t: f64, n: &SpinField) -> Result<String, RunError> {
        let dir = self.dir.join("failure");
        for (k, f) in n.components().iter().enumerate() {
            let name = format!("n{k}");
            write_snapshot(&dir, &format!("last_valid_{name}"), &name, t, f)?;
        }
        Ok(dir.display().to_string())
    }
}

fn write_series(path: &Path, rows: &[Row]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_series(path: &Path) -> Result<Vec<Row>, RunError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<Row>, _>>()?)
}

/// Runs a scenario into `<root>/<name>` and returns the recorded series.
pub fn run_scenario(s: &Scenario, root: &Path) -> Result<RunSummary, RunError> {
    s.validate()?;
    let dir = root.join(&s.name);
    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::create_dir_all(&dir)?;
    let start = Instant::now();
    let mut w = Writer { dir: dir.clone(), rows: Vec::new(), snapshots: Vec::new() };
    let outcome = match s.model {
        ModelChoice::Kinetic => run_kinetic(s, &mut w),
        ModelChoice::NonlocalRhsProbe => run_probe(s, &mut w),
        _ => run_fluid(s, &mut w),
    };
    let (steps, t_final, status) = match &outcome {
        Ok((steps, t)) => (*steps, *t, "completed".to_string()),
        Err(e) => (0, f64::NAN, format!("failed: {e}")),
    };
    let series = dir.join("series.csv");
    write_series(&series, &w.rows)?;
    let mut files = vec![series];
    files.extend(w.snapshots.iter().cloned());
    let outputs = files
        .iter()
        .map(|p| {
            Ok(OutputFile {
                path: p.strip_prefix(&dir).unwrap_or(p).display().to_string(),
                sha256: sha256_hex(&fs::read(p)?),
            })
        })
        .collect::<Result<Vec<_>, std::io::Error>>()?;
    let manifest = Manifest {
        scenario: s.clone(),
        scenario_sha256: sha256_hex(&serde_json::to_vec(s)?),
        versions: Versions::current(),
        parallel: spinqdd::par::is_parallel(),
        steps,
        t_final: if t_final.is_finite() { t_final } else { w.rows.last().map_or(0.0, |r| r.t) },
        status,
        outputs,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    let timing = serde_json::json!({ "wall_time_s": start.elapsed().as_secs_f64() });
    fs::write(dir.join("timing.json"), serde_json::to_string_pretty(&timing)? + "\n")?;
    outcome?;
    log::info!("{}: {} rows in {}", s.name, w.rows.len(), dir.display());
    Ok(RunSummary { dir, rows: w.rows, manifest })
}

fn steps_for(s: &Scenario) -> (usize, f64) {
    let it = &s.integrator;
    let steps = (it.t_end / it.dt - 1e-9).ceil().max(1.0) as usize;
    (steps, it.t_end / steps as f64)
}

fn is_output(k: usize, steps: usize, every: usize) -> bool {
    k.is_multiple_of(every) || k == steps
}

fn is_snapshot(k: usize, steps: usize, every: usize) -> bool {
    k == 0 || k == steps || (every > 0 && k.is_multiple_of(every))
}

fn run_fluid(s: &Scenario, w: &mut Writer) -> Result<(usize, f64), RunError> {
    let kind = s.model.fluid_kind().expect("fluid model");
    let model = FluidModel::new(kind, s.fluid_params()?)?;
    let mut state = model.state_from_spin(&s.initial_state()?, 0.0)?;
    let (steps, h) = steps_for(s);
    let it = &s.integrator;
    let mut last_valid = state.clone();
    for k in 0..=steps {
        if k > 0 {
            match model.step(&state, h) {
                Ok(mut next) => {
                    next.t = k as f64 * h;
                    state = next;
                }
                Err(e) => {
                    let dump = w.dump(last_valid.t, &model.spin_of(&last_valid))?;
                    return Err(RunError::Failed { time: last_valid.t, reason: e.to_string(), dump });
                }
            }
        }
        last_valid = state.clone();
        let n = model.spin_of(&state);
        if is_output(k, steps, it.output_every) {
            w.rows.push(Row::of(state.t, &n, model.energy(&state)?));
        }
        if is_snapshot(k, steps, it.snapshot_every) {
            w.snapshot(&format!("step{k:06}"), state.t, &n)?;
        }
    }
    Ok((steps, state.t))
}

fn run_kinetic(s: &Scenario, w: &mut Writer) -> Result<(usize, f64), RunError> {
    let p = &s.params;
    let mut kp = KineticParams::new(p.eps, p.alpha, p.tau, s.pgrid()?);
    kp.closure_order = s.kinetic_spec().closure_order;
    let solver = KineticSolver::new(kp, s.potential_field()?)?;
    let mut state = solver.initial_state(&s.initial_state()?)?;
    let (steps, h) = steps_for(s);
    let it = &s.integrator;
    for k in 0..=steps {
        if k > 0 {
            let before = state.clone();
            if let Err(e) = solver.step(&mut state, h) {
                let dump = w.dump(before.t, &solver.moments(&before.w))?;
                return Err(RunError::Failed { time: before.t, reason: e.to_string(), dump });
            }
            state.t = k as f64 * h;
        }
        let n = solver.moments(&state.w);
        if is_output(k, steps, it.output_every) {
            w.rows.push(Row::of(state.t, &n, None));
        }
        if is_snapshot(k, steps, it.snapshot_every) {
            w.snapshot(&format!("step{k:06}"), state.t, &n)?;
        }
    }
    Ok((steps, state.t))
}

/// Writes the nonlocal and local right-hand sides and their difference.
fn run_probe(s: &Scenario, w: &mut Writer) -> Result<(usize, f64), RunError> {
    let n = s.initial_state()?;
    let p = s.fluid_params()?;
    let nl = nonlocal_rhs_probe(&n, &p)?;
    let local = rhs_local(&n, &p)?;
    w.rows.push(Row::of(0.0, &n, None));
    let dir = w.dir.join("snapshots");
    let mut diff = Vec::new();
    for k in 0..4 {
        let d: ScalarField = &nl[k] - &local[k];
        diff.push(d.max_abs());
        for (tag, f) in [("nonlocal", &nl[k]), ("local", &local[k]), ("difference", &d)] {
            let bin = write_snapshot(&dir, &format!("{tag}_rhs_n{k}"), &format!("{tag}_rhs_n{k}"), 0.0, f)?;
            w.snapshots.push(bin.clone());
            w.snapshots.push(bin.with_extension("json"));
        }
    }
    let path = w.dir.join("probe.json");
    fs::write(&path, serde_json::to_string_pretty(&serde_json::json!({ "max_abs_difference": diff }))? + "\n")?;
    w.snapshots.push(path);
    Ok((0, 0.0))
}
