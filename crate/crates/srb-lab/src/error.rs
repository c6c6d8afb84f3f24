use thiserror::Error;

/// Failure modes shared across the lab. Hard errors abort a run (CLI exit 1);
/// soft findings are carried inside reports instead and never surface here.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("model misconfigured: {0}")]
    ModelMisconfigured(String),

    #[error("curve is degenerate at s = {s}: |sigma'| = {speed:.3e} below 1e-12")]
    DegenerateCurve { s: f64, speed: f64 },

    #[error("curve regularity violated: min |sigma'| = {min_speed:.3e} on the check grid (needs > 1e-9)")]
    RegularityViolation { min_speed: f64 },

    #[error("curve self-intersects on the check grid near s = {s1:.6} and s = {s2:.6}")]
    SelfIntersection { s1: f64, s2: f64 },

    #[error("derivative order {requested} not available (max {available})")]
    OrderUnavailable { requested: usize, available: usize },

    #[error("subdivision depth cap {cap} exhausted on [{lo:.9}, {hi:.9}] at orbit time {time}")]
    DepthCapExhausted { lo: f64, hi: f64, time: usize, cap: u32 },

    #[error("neutral-mass table not stabilized: corner drift {drift:.4} exceeds tolerance {tol:.4}")]
    NonStabilized { drift: f64, tol: f64 },

    #[error("test-function dictionary mismatch: measure built against '{found}', expected '{expected}'")]
    DictionaryMismatch { expected: String, found: String },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("inconsistent classification input: {0}")]
    InconsistentClassification(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
