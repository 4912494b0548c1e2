use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("symbol degree {degree} exceeds dmax {dmax}")]
    DegreeOverflow { degree: usize, dmax: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("non-physical state: {0}")]
    NonPhysical(String),
    #[error("time step {dt} exceeds stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("integration broke down at t = {time}: {reason}")]
    Breakdown { time: f64, reason: String },
    #[error("p-boundary mass fraction {fraction:.3e} exceeds {limit:.1e}")]
    BoundaryLeak { fraction: f64, limit: f64 },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
