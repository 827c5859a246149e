//! The local model: the full profile rescaled by t = 2R/κ onto [0, 1],
//! whose neck [κ, 1] carries exactly dr² + (δ_neck·r^α)²g_{S²} +
//! ((1-ε)r)²g_{Sⁿ}, certified against τ/(r + κ).

use crate::error::{ModelError, Result};
use crate::full::{build_full_profile, FullModel};
use crate::params::{ModelConstants, ModelParams};
use collapsar_curvature::{find_largest_tau, CertifyOptions, CurvatureCertificate, TauOverRPlusKappa};
use collapsar_profiles::DoubleWarpProfile;

pub struct LocalModel {
    pub profile: DoubleWarpProfile,
    pub params: ModelParams,
    pub constants: ModelConstants,
    pub neck_interval: (f64, f64),
    pub certificate: CurvatureCertificate,
}

pub fn build_local_model(params: &ModelParams) -> Result<LocalModel> {
    params.validate()?;
    let alpha_eff = if params.tail_exponent_halved { params.alpha / 2.0 } else { params.alpha };
    let kappa = params.kappa;
    // dry construction to size the truncation radius: the rescale by
    // t = 2R/kappa needs the full profile out to t·1
    let part1 = crate::part1::build_part1(params.n)?;
    let ladder = crate::part2::build_part2(&part1, params.epsilon, alpha_eff, None)?;
    let r_max_needed = params
        .r_max
        .unwrap_or(2.0 * ladder.big_r / kappa * 1.02)
        .max(2.0 * ladder.big_r / kappa * 1.02);
    let full: FullModel =
        build_full_profile(params.n, params.epsilon, alpha_eff, params.delta, Some(r_max_needed))?;
    let t = 2.0 * full.constants.big_r / kappa;

    let scaled = full.profile.rescaled(t)?;
    let (_, hi) = scaled.domain();
    if hi < 1.0 {
        return Err(ModelError::Construction {
            clause: "rescaled domain covers [0, 1]".into(),
            detail: format!("domain ends at {hi}"),
        });
    }
    let profile = DoubleWarpProfile::new(
        scaled.phi.truncated(1.0)?,
        scaled.rho.truncated(1.0)?,
        scaled.n,
        scaled.boundary,
    )?;

    // the neck must carry the exact product form
    let delta_neck = full.constants.delta0 * t.powf(alpha_eff - 1.0);
    for k in 0..=8 {
        let r = kappa + (1.0 - kappa) * k as f64 / 8.0;
        let phi = profile.phi.eval(r, 0)?;
        let rho = profile.rho.eval(r, 0)?;
        let want_phi = delta_neck * r.powf(alpha_eff);
        let want_rho = (1.0 - params.epsilon) * r;
        if (phi - want_phi).abs() > 1e-12 * want_phi.abs()
            || (rho - want_rho).abs() > 1e-12 * want_rho.abs()
        {
            return Err(ModelError::Construction {
                clause: "neck matches the exact product form".into(),
                detail: format!("at r = {r}: phi {phi:e} vs {want_phi:e}, rho {rho:e} vs {want_rho:e}"),
            });
        }
    }

    let opts = CertifyOptions::default();
    let certificate = find_largest_tau(
        &profile,
        "local-model",
        (0.0, 1.0),
        &TauOverRPlusKappa { tau: 1.0, kappa },
        &opts,
    )?;

    let mut constants = full.constants.clone();
    constants.mu = Some(1.0 / t);
    constants.t_scale = Some(t);
    constants.tau = certificate.bound.coefficient();
    Ok(LocalModel {
        profile,
        params: params.clone(),
        constants,
        neck_interval: (kappa, 1.0),
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use collapsar_curvature::ricci_eigenvalues;

    #[test]
    fn rescaling_multiplies_eigenvalues_by_t_squared() {
        // eigenvalues of the rescaled profile at r equal t²·(original at t·r)
        let full = build_full_profile(3, 0.01, 1e-4, None, None).unwrap();
        let t = 1e3;
        let scaled = full.profile.rescaled(t).unwrap();
        for r in [1.0, 100.0, 2000.0] {
            let orig = ricci_eigenvalues(&full.profile, t * r).unwrap();
            let resc = ricci_eigenvalues(&scaled, r).unwrap();
            for (a, b) in [
                (orig.lambda0 * t * t, resc.lambda0),
                (orig.lambda1 * t * t, resc.lambda1),
                (orig.lambda2 * t * t, resc.lambda2),
            ] {
                let scale = a.abs().max(1e-300);
                assert!((a - b).abs() / scale < 1e-8, "{a} vs {b}");
            }
        }
    }
}
