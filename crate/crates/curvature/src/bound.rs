//! The family of lower-bound functions a certificate can assert.
//!
//! Each variant sits behind [`BoundFn`] and is registered by name, so
//! certificates and the CLI can select bounds at runtime.

use crate::error::{CurvatureError, Result};

/// A pointwise lower-bound function of the radius.
pub trait BoundFn: std::fmt::Debug + Send + Sync {
    /// Registry name, e.g. `"constant"`.
    fn kind(&self) -> &'static str;

    fn eval(&self, r: f64) -> f64;

    /// Sound upper bound of the function over a cell `[lo, hi]`, `lo >= 0`.
    fn max_on_cell(&self, lo: f64, hi: f64) -> f64;

    /// Named parameters in serialization order.
    fn params(&self) -> Vec<(&'static str, f64)>;

    /// Same bound with the leading coefficient replaced (for τ searches).
    fn with_coefficient(&self, tau: f64) -> Box<dyn BoundFn>;

    fn coefficient(&self) -> f64;

    fn boxed_clone(&self) -> Box<dyn BoundFn>;
}

impl Clone for Box<dyn BoundFn> {
    fn clone(&self) -> Self {
        self.boxed_clone()
    }
}

/// λ everywhere.
#[derive(Debug, Clone)]
pub struct ConstantBound {
    pub lambda: f64,
}

impl BoundFn for ConstantBound {
    fn kind(&self) -> &'static str {
        "constant"
    }
    fn eval(&self, _r: f64) -> f64 {
        self.lambda
    }
    fn max_on_cell(&self, _lo: f64, _hi: f64) -> f64 {
        self.lambda
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("lambda", self.lambda)]
    }
    fn with_coefficient(&self, tau: f64) -> Box<dyn BoundFn> {
        Box::new(ConstantBound { lambda: tau })
    }
    fn coefficient(&self) -> f64 {
        self.lambda
    }
    fn boxed_clone(&self) -> Box<dyn BoundFn> {
        Box::new(self.clone())
    }
}

/// τ/(1 + r²), decreasing on r ≥ 0.
#[derive(Debug, Clone)]
pub struct TauOverOnePlusRSq {
    pub tau: f64,
}

impl BoundFn for TauOverOnePlusRSq {
    fn kind(&self) -> &'static str {
        "tau-over-one-plus-r-squared"
    }
    fn eval(&self, r: f64) -> f64 {
        self.tau / (1.0 + r * r)
    }
    fn max_on_cell(&self, lo: f64, hi: f64) -> f64 {
        if self.tau >= 0.0 {
            self.eval(lo)
        } else {
            self.eval(hi)
        }
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("tau", self.tau)]
    }
    fn with_coefficient(&self, tau: f64) -> Box<dyn BoundFn> {
        Box::new(TauOverOnePlusRSq { tau })
    }
    fn coefficient(&self) -> f64 {
        self.tau
    }
    fn boxed_clone(&self) -> Box<dyn BoundFn> {
        Box::new(self.clone())
    }
}

/// τ/(r + κ), decreasing on r ≥ 0 for κ > 0.
#[derive(Debug, Clone)]
pub struct TauOverRPlusKappa {
    pub tau: f64,
    pub kappa: f64,
}

impl BoundFn for TauOverRPlusKappa {
    fn kind(&self) -> &'static str {
        "tau-over-r-plus-kappa"
    }
    fn eval(&self, r: f64) -> f64 {
        self.tau / (r + self.kappa)
    }
    fn max_on_cell(&self, lo: f64, hi: f64) -> f64 {
        if self.tau >= 0.0 {
            self.eval(lo)
        } else {
            self.eval(hi)
        }
    }
    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("tau", self.tau), ("kappa", self.kappa)]
    }
    fn with_coefficient(&self, tau: f64) -> Box<dyn BoundFn> {
        Box::new(TauOverRPlusKappa { tau, kappa: self.kappa })
    }
    fn coefficient(&self) -> f64 {
        self.tau
    }
    fn boxed_clone(&self) -> Box<dyn BoundFn> {
        Box::new(self.clone())
    }
}

/// Registered bound kinds.
pub const BOUND_KINDS: [&str; 3] =
    ["constant", "tau-over-one-plus-r-squared", "tau-over-r-plus-kappa"];

/// Build a bound from its registry name and named parameters.
pub fn build_bound(kind: &str, params: &[(String, f64)]) -> Result<Box<dyn BoundFn>> {
    let get = |name: &str| -> Result<f64> {
        params
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| CurvatureError::Domain(format!("bound {kind}: missing param {name}")))
    };
    match kind {
        "constant" => Ok(Box::new(ConstantBound { lambda: get("lambda")? })),
        "tau-over-one-plus-r-squared" => Ok(Box::new(TauOverOnePlusRSq { tau: get("tau")? })),
        "tau-over-r-plus-kappa" => {
            Ok(Box::new(TauOverRPlusKappa { tau: get("tau")?, kappa: get("kappa")? }))
        }
        other => Err(CurvatureError::Domain(format!("unknown bound kind {other}"))),
    }
}
