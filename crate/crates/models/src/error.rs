use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parameter rejected: {0}")]
    Params(String),

    #[error("construction failed ({clause}): {detail}")]
    Construction { clause: String, detail: String },

    #[error("smoothing failed at r0 = {r0}: {detail}")]
    Smoothing { r0: f64, detail: String },

    #[error("slope condition violated at r0 = {r0}: right slope {right} > left slope {left}")]
    SlopeIncrease { r0: f64, left: f64, right: f64 },

    #[error("fiber modification failed: {0}")]
    Modification(String),

    #[error(transparent)]
    Curvature(#[from] collapsar_curvature::CurvatureError),

    #[error(transparent)]
    Profile(#[from] collapsar_profiles::ProfileError),
}

pub type Result<T> = std::result::Result<T, ModelError>;
