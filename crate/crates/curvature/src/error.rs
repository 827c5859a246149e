use thiserror::Error;

/// One grid cell with its certified slack, used in failure reports.
#[derive(Debug, Clone, Copy)]
pub struct CellSlack {
    pub r_lo: f64,
    pub r_hi: f64,
    pub slack: f64,
}

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Profile(#[from] collapsar_profiles::ProfileError),

    #[error("Lipschitz budget unavailable on [{r_lo}, {r_hi}]: {detail}")]
    BudgetUnavailable { r_lo: f64, r_hi: f64, detail: String },

    #[error("certificate failed: worst cell [{}, {}] slack {:e}", worst.r_lo, worst.r_hi, worst.slack)]
    CertificateFailed { worst: CellSlack },

    #[error("cell limit {0} exceeded before margin stabilized")]
    CellLimit(usize),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, CurvatureError>;
