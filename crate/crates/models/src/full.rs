//! The complete model profile: Part 1 cap, Part 2 tail, corner smoothing,
//! optional Part 3 re-cap, and the certified τ/(1 + r²) bound.

use crate::error::{ModelError, Result};
use crate::glue::smooth_c1_glue;
use crate::params::{alpha0, ModelConstants, ModelParams};
use crate::part1::fill_part2_constants;
use crate::part1::build_part1;
use crate::part2::build_part2;
use crate::part3::apply_recap;
use collapsar_curvature::{
    find_largest_tau, re_verify, CertifyOptions, CurvatureCertificate, TauOverOnePlusRSq,
};
use collapsar_profiles::DoubleWarpProfile;

pub struct FullModel {
    pub profile: DoubleWarpProfile,
    pub constants: ModelConstants,
    pub certificate: CurvatureCertificate,
}

/// Build the profile for (n, ε, α, δ) and certify Ric ≥ τ/(1 + r²) on its
/// whole domain; δ = None takes the natural tail scale δ₀, δ < δ₀ routes
/// through the re-cap.
pub fn build_full_profile(
    n: u32,
    epsilon: f64,
    alpha: f64,
    delta: Option<f64>,
    r_max: Option<f64>,
) -> Result<FullModel> {
    let params = ModelParams { n, epsilon, alpha, delta, r_max, ..Default::default() };
    params.validate()?;

    let part1 = build_part1(n)?;
    let ladder = build_part2(&part1, epsilon, alpha, r_max)?;
    let mut constants = part1.constants.clone();
    fill_part2_constants(&mut constants, n, epsilon, alpha);
    constants.delta0 = ladder.delta0;
    constants.big_r = ladder.big_r;
    constants.x_b = ladder.x_b;

    // smooth the two genuine corners: phi's tail handoff at x_b and rho's
    // slope drop where it meets the cone line at R
    let mut profile = ladder.profile;
    for r0 in [ladder.x_b, ladder.big_r] {
        profile = smooth_c1_glue(&profile, r0, 1e-3 * r0, 1e-3)?;
    }

    let opts = CertifyOptions::default();
    let (_, hi) = profile.domain();
    let mut certificate =
        find_largest_tau(&profile, "full-model", (0.0, hi), &TauOverOnePlusRSq { tau: 1.0 }, &opts)?;

    // delta below the natural scale: re-cap and re-certify
    if let Some(d) = delta {
        if d > ladder.delta0 * (1.0 + 1e-12) {
            return Err(ModelError::Params(format!(
                "delta = {d:e} exceeds delta0 = {:e}",
                ladder.delta0
            )));
        }
        let s = d / ladder.delta0;
        if s < 1.0 - 1e-12 {
            let recap = apply_recap(&profile, s, certificate.bound.coefficient(), n)?;
            profile = recap.profile;
            constants.recap = Some((recap.s, recap.t, recap.theta));
            let (_, hi) = profile.domain();
            certificate = find_largest_tau(
                &profile,
                "full-model",
                (0.0, hi),
                &TauOverOnePlusRSq { tau: 1.0 },
                &opts,
            )?;
        }
    }

    constants.tau = certificate.bound.coefficient();
    if !(constants.tau > 0.0) {
        return Err(ModelError::Construction {
            clause: "certified tau > 0".into(),
            detail: format!("tau = {}", constants.tau),
        });
    }
    Ok(FullModel { profile, constants, certificate })
}

/// Sanity re-check at 10x resolution; forwards the worst observed slack.
pub fn reverify_full(model: &FullModel) -> Result<f64> {
    Ok(re_verify(&model.profile, &model.certificate, 10)?)
}

/// α₀(n, ε) exposed for parameter validation in callers.
pub fn admissible_alpha0(n: u32, epsilon: f64) -> f64 {
    alpha0(n, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_rejection() {
        let err = build_full_profile(3, 0.2, 1e-4, None, None);
        assert!(matches!(err, Err(ModelError::Params(_))));
    }
}
