use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("wrong side of the turning point: {0}")]
    WrongSide(String),
    #[error("inside the turning region: {0}; use the blowup charts")]
    TurningRegion(String),
    #[error("outside the chart window: {0}")]
    Window(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("degenerate well: {0}")]
    DegenerateWell(String),
    #[error("integration failed at t = {t}: {reason} (h = {h:e}, steps = {steps})")]
    Integration {
        t: f64,
        h: f64,
        steps: usize,
        reason: String,
    },
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("eigenvalue search failed for n = {n}: {reason}")]
    Eigen { n: usize, reason: String },
    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
