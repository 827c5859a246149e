//! The re-cap for δ < δ₀: a round cap t·sin(r/t) up to t·arccos(s), then
//! the original S² profile scaled by s = δ/δ₀ and advanced by
//! θ(t, s) = arcsin(t·√(s⁻² − 1)) − t·arccos(s). The junction matches in
//! value exactly (t·√(1 − s²) both sides) and drops the slope from s to
//! s·√(1 − t²(s⁻² − 1)), so the C¹ gluing applies. The Sⁿ profile is left
//! unchanged.

use crate::error::{ModelError, Result};
use crate::glue::smooth_c1_glue;
use collapsar_curvature::{certify_bound, CertifyOptions, TauOverOnePlusRSq};
use collapsar_profiles::form::SineCap;
use collapsar_profiles::{BoundaryKind, DoubleWarpProfile, ProfileFunction, ProfilePiece};

pub struct RecapOutcome {
    pub profile: DoubleWarpProfile,
    pub s: f64,
    pub t: f64,
    pub theta: f64,
}

fn junction_angle(t: f64, s: f64) -> f64 {
    (t * (1.0 / (s * s) - 1.0).sqrt()).asin() - t * s.acos()
}

fn recap_with(p: &DoubleWarpProfile, s: f64, t: f64) -> Result<DoubleWarpProfile> {
    let r_j = t * s.acos();
    let theta = junction_angle(t, s);
    if !(theta > 0.0) {
        return Err(ModelError::Construction {
            clause: "theta(t, s) > 0".into(),
            detail: format!("theta = {theta} for t = {t}, s = {s}"),
        });
    }
    let shifted = p.phi.scaled_shifted(s, theta)?;
    let tail = shifted.restricted(r_j, shifted.domain().1)?;
    let cap = ProfilePiece::new(Box::new(SineCap { amplitude: t }), 0.0, r_j)?;
    let phi = ProfileFunction::knot_join(&ProfileFunction::new(vec![cap], true)?, &tail)?;
    let rho_hi = p.rho.domain().1.min(phi.domain().1);
    let rho = p.rho.truncated(rho_hi)?;
    let phi = phi.truncated(rho_hi)?;
    DoubleWarpProfile::new(phi, rho, p.n, BoundaryKind::ClosedDisc).map_err(Into::into)
}

/// Shrink the S² factor to s·φ with a fresh round cap, sweeping t upward
/// (log-spaced) with certificate feedback on the cap region; the first t
/// that keeps the bound wins.
pub fn apply_recap(
    p: &DoubleWarpProfile,
    s: f64,
    tau: f64,
    n_for_caps: u32,
) -> Result<RecapOutcome> {
    if !(s > 0.0 && s < 1.0) {
        return Err(ModelError::Params(format!("recap scale s = {s} outside (0, 1)")));
    }
    let cap_span = 1.0 / (10.0 * n_for_caps as f64);
    let t_max = {
        let by_asin = 0.99 * s / (1.0 - s * s).sqrt();
        let by_cap = 0.5 * cap_span.sin() / (1.0 / (s * s) - 1.0).sqrt();
        by_asin.min(by_cap).min(0.5 * cap_span)
    };
    let t_min = (t_max * 1e-6).max(1e-12);
    let opts = CertifyOptions { base_cells: 1024, max_refines: 3, ..Default::default() };
    let mut failure: Option<String> = None;
    for k in 0..=24 {
        let t = t_min * (t_max / t_min).powf(k as f64 / 24.0);
        let candidate = match recap_with(p, s, t) {
            Ok(c) => c,
            Err(e) => {
                failure = Some(e.to_string());
                continue;
            }
        };
        let theta = junction_angle(t, s);
        let r_j = t * s.acos();
        // smooth the junction corner, then re-check the bound on the
        // affected region (the profile beyond is the scaled original,
        // whose eigenvalues only improve under s < 1)
        let smoothed = match smooth_c1_glue(&candidate, r_j, 0.45 * r_j, 1e-3) {
            Ok(sm) => sm,
            Err(e) => {
                failure = Some(e.to_string());
                continue;
            }
        };
        let check_hi = (2.0 * cap_span).min(smoothed.domain().1);
        let bound = TauOverOnePlusRSq { tau: tau * (1.0 - theta).max(0.5) };
        match certify_bound(&smoothed, "recap", (0.0, check_hi), &bound, &opts) {
            Ok(_) => {
                return Ok(RecapOutcome { profile: smoothed, s, t, theta });
            }
            Err(e) => failure = Some(e.to_string()),
        }
    }
    Err(ModelError::Construction {
        clause: "re-cap t sweep".into(),
        detail: failure.unwrap_or_else(|| "no candidate t".into()),
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn junction_value_identity() {
        // t·sin(t⁻¹·t·arccos s) = t·√(1-s²)
        for (t, s) in [(1e-3, 0.5f64), (2e-2, 0.9), (1e-5, 0.1)] {
            let lhs = t * ((t * s.acos()) / t).sin();
            let rhs = t * (1.0 - s * s).sqrt();
            assert!((lhs - rhs).abs() <= 1e-15 * rhs.abs().max(1e-300), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn junction_slopes_drop() {
        for (t, s) in [(1e-3, 0.5f64), (2e-2, 0.9)] {
            let left = s; // cos(arccos s)
            let right = s * (1.0 - t * t * (1.0 / (s * s) - 1.0)).sqrt();
            assert!(right <= left);
        }
    }
}
