//! Admissible parameters and the constants a build produces.

use crate::error::{ModelError, Result};
use collapsar_profiles::json::JsonWriter;

/// User-facing knobs for the model builders.
#[derive(Debug, Clone)]
pub struct ModelParams {
    /// Sⁿ fiber dimension, n ≥ 2.
    pub n: u32,
    /// Cone-angle deficit, in (0, 1/100].
    pub epsilon: f64,
    /// Tail exponent of the S² factor, in (0, alpha0(n, epsilon)].
    pub alpha: f64,
    /// S² tail scale; `None` means the natural value delta0.
    pub delta: Option<f64>,
    /// Neck inner radius for the local model, in (0, 1/100].
    pub kappa: f64,
    /// Truncation radius; `None` means 4·R (computed).
    pub r_max: Option<f64>,
    /// Build the local-model tail with exponent alpha/2 instead of alpha
    /// (the corollary's proof variant).
    pub tail_exponent_halved: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n: 3,
            epsilon: 0.01,
            alpha: 1e-4,
            delta: None,
            kappa: 0.01,
            r_max: None,
            tail_exponent_halved: false,
        }
    }
}

/// Largest admissible tail exponent: half the value at which the tail's
/// Sⁿ-direction eigenvalue degenerates, capped at 1/4.
pub fn alpha0(n: u32, epsilon: f64) -> f64 {
    let nf = n as f64;
    let cap = (nf - 1.0) * (2.0 * epsilon - epsilon * epsilon)
        / (4.0 * (1.0 - epsilon) * (1.0 - epsilon));
    cap.min(0.25)
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(ModelError::Params(format!("n = {} must be >= 2", self.n)));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.01) {
            return Err(ModelError::Params(format!(
                "epsilon = {} outside (0, 1/100]",
                self.epsilon
            )));
        }
        let a0 = alpha0(self.n, self.epsilon);
        if !(self.alpha > 0.0 && self.alpha <= a0) {
            return Err(ModelError::Params(format!(
                "alpha = {} outside (0, {a0}]",
                self.alpha
            )));
        }
        if !(self.kappa > 0.0 && self.kappa <= 0.01) {
            return Err(ModelError::Params(format!("kappa = {} outside (0, 1/100]", self.kappa)));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0) {
                return Err(ModelError::Params(format!("delta = {d} must be > 0")));
            }
        }
        Ok(())
    }
}

/// Constants fixed by a build.
#[derive(Debug, Clone)]
pub struct ModelConstants {
    /// (10n)⁻³, the Part-1 terminal slope.
    pub c1: f64,
    /// 100/c1, where the Part-1 concave run ends.
    pub r1: f64,
    /// Solves phi(R1) = c1·(R1 + xi).
    pub xi: f64,
    /// rho(R1), for reference (close to, but not equal to, phi(R1)).
    pub rho_r1: f64,
    /// ln of the paper-scale constant exp(-R1²·alpha⁻²·c1⁻²·eps⁻²); the
    /// constant itself underflows every float format, so only its log is
    /// representable.
    pub c2_log: f64,
    /// Largest admissible tail exponent actually enforced.
    pub alpha0: f64,
    /// The quoted admissibility bound c1·eps/(10n), for reference.
    pub alpha0_paper: f64,
    /// Tail coefficient: phi = delta0·r^alpha on [x_b, r_max] when delta
    /// is left at its natural value.
    pub delta0: f64,
    /// Tail shift (identically zero in this construction).
    pub big_c: f64,
    /// Where rho meets the cone line (1-eps)·r.
    pub big_r: f64,
    /// Where the climb ends and the phi tail starts.
    pub x_b: f64,
    /// Certified coefficient of the curvature lower bound.
    pub tau: f64,
    /// Local-model fiber sphere radius 1/t (local model only).
    pub mu: Option<f64>,
    /// Rescale factor t = 2R/kappa (local model only).
    pub t_scale: Option<f64>,
    /// Part-3 re-cap parameters (s, t, theta), when delta < delta0.
    pub recap: Option<(f64, f64, f64)>,
}

impl ModelConstants {
    pub fn to_json(&self) -> String {
        let mut w = JsonWriter::new();
        let field = |w: &mut JsonWriter, first: bool, name: &str, v: f64| {
            if !first {
                w.raw(",");
            }
            w.string(name);
            w.raw(":");
            w.num(v);
        };
        w.raw("{");
        field(&mut w, true, "c1", self.c1);
        field(&mut w, false, "r1", self.r1);
        field(&mut w, false, "xi", self.xi);
        field(&mut w, false, "rho_r1", self.rho_r1);
        field(&mut w, false, "c2_log", self.c2_log);
        field(&mut w, false, "alpha0", self.alpha0);
        field(&mut w, false, "alpha0_paper", self.alpha0_paper);
        field(&mut w, false, "delta0", self.delta0);
        field(&mut w, false, "big_c", self.big_c);
        field(&mut w, false, "big_r", self.big_r);
        field(&mut w, false, "x_b", self.x_b);
        field(&mut w, false, "tau", self.tau);
        if let Some(mu) = self.mu {
            field(&mut w, false, "mu", mu);
        }
        if let Some(t) = self.t_scale {
            field(&mut w, false, "t_scale", t);
        }
        if let Some((s, t, theta)) = self.recap {
            field(&mut w, false, "recap_s", s);
            field(&mut w, false, "recap_t", t);
            field(&mut w, false, "recap_theta", theta);
        }
        w.raw("}");
        w.finish()
    }
}
