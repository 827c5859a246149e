use thiserror::Error;

/// Errors raised by profile construction and evaluation.
#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("r = {r} outside domain [{lo}, {hi}]")]
    Domain { r: f64, lo: f64, hi: f64 },

    #[error("derivative order {0} unsupported (max 2)")]
    UnsupportedOrder(u8),

    #[error("ratio singular at r = {r}: {detail}")]
    Singularity { r: f64, detail: String },

    #[error("piece domains do not tile: {0}")]
    Tiling(String),

    #[error("value mismatch at knot r = {knot}: gap {gap:e}")]
    Continuity { knot: f64, gap: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-finite value in piece {kind} at r = {r}")]
    NonFinite { kind: String, r: f64 },
}

pub type Result<T> = std::result::Result<T, ProfileError>;
