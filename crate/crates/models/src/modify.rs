//! Sⁿ-fiber shrinking near a cap: replace ϕ by a function that equals δ·ϕ
//! on [μ/2, μ], stays within eps_tol of ϕ, keeps the cap smoothness
//! conditions, and preserves a certified constant lower bound.
//!
//! The multiplier is a C² even ramp m(r) (1 on [0, inner], δ beyond μ/2);
//! the transition of m·ϕ is laid down as a chain of quintic Hermite pieces
//! matching the exact product's value and first two derivatives at the
//! joints.

use crate::error::{ModelError, Result};
use collapsar_curvature::{certify_bound, CertifyOptions, ConstantBound, CurvatureCertificate};
use collapsar_profiles::form::{Hermite, Quartic};
use collapsar_profiles::{DoubleWarpProfile, ProfileFunction, ProfilePiece};

/// Quintic smoothstep and its first two derivatives on [0, 1].
fn smoothstep(t: f64) -> [f64; 3] {
    let t = t.clamp(0.0, 1.0);
    let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    let d1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    let d2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    [s, d1, d2]
}

/// m(r): 1 for r <= inner, delta for r >= outer, C² in between.
fn multiplier(r: f64, inner: f64, outer: f64, delta: f64) -> [f64; 3] {
    if r <= inner {
        return [1.0, 0.0, 0.0];
    }
    if r >= outer {
        return [delta, 0.0, 0.0];
    }
    let w = outer - inner;
    let [s, d1, d2] = smoothstep((r - inner) / w);
    [1.0 - (1.0 - delta) * s, -(1.0 - delta) * d1 / w, -(1.0 - delta) * d2 / w / w]
}

fn product_data(p: &DoubleWarpProfile, r: f64, inner: f64, outer: f64, delta: f64) -> Result<[f64; 3]> {
    let f = [p.rho.eval(r, 0)?, p.rho.eval(r, 1)?, p.rho.eval(r, 2)?];
    let m = multiplier(r, inner, outer, delta);
    Ok([
        m[0] * f[0],
        m[0] * f[1] + m[1] * f[0],
        m[0] * f[2] + 2.0 * m[1] * f[1] + m[2] * f[0],
    ])
}

/// Shrink the Sⁿ fiber by delta on the outer half of a cap profile.
///
/// `lambda` is the bound the input certificate asserts; the output carries
/// a fresh certificate for the same bound.
pub fn modify_fiber(
    p: &DoubleWarpProfile,
    delta: f64,
    eps_tol: f64,
    lambda: f64,
) -> Result<(DoubleWarpProfile, CurvatureCertificate)> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(ModelError::Params(format!("delta = {delta} outside (0, 1]")));
    }
    let (lo, mu) = p.domain();
    if lo != 0.0 {
        return Err(ModelError::Modification("profile must start at r = 0".into()));
    }
    // hypothesis form near 0: phi = A⁻¹ sin(A r), rho = A⁻¹ + A³ r⁴
    let phi0 = p.phi.pieces().first().unwrap();
    let rho0 = p.rho.pieces().first().unwrap();
    let amp = match (phi0.form.kind(), phi0.form.params().first()) {
        ("sine-cap", Some(&("amplitude", a))) => a,
        _ => {
            return Err(ModelError::Modification("phi cap is not a sine form".into()));
        }
    };
    let (b, c) = match rho0.form.kind() {
        "quartic" => {
            let ps = rho0.form.params();
            (ps[0].1, ps[1].1)
        }
        _ => return Err(ModelError::Modification("rho cap is not a quartic form".into())),
    };
    let a_inv = 1.0 / amp;
    if (b - amp).abs() > 1e-9 * amp || (c - a_inv * a_inv * a_inv).abs() > 1e-9 * a_inv.powi(3) {
        return Err(ModelError::Modification(format!(
            "rho cap (offset {b}, coeff {c}) does not match A⁻¹ + A³r⁴ for A = {a_inv}"
        )));
    }

    if delta == 1.0 {
        let opts = CertifyOptions { base_cells: 1024, ..Default::default() };
        let cert = certify_bound(p, "modify-fiber", (0.0, mu), &ConstantBound { lambda }, &opts)?;
        return Ok((p.clone(), cert));
    }

    let outer = 0.5 * mu;
    let mut attempt_err: Option<ModelError> = None;
    for k in 0..4 {
        let inner = mu / (2.0f64.powi(k + 2)); // mu/4, mu/8, ...
        match attempt(p, delta, eps_tol, lambda, inner, outer, mu) {
            Ok(out) => return Ok(out),
            Err(e) => attempt_err = Some(e),
        }
    }
    Err(attempt_err.unwrap_or_else(|| ModelError::Modification("no attempt ran".into())))
}

fn attempt(
    p: &DoubleWarpProfile,
    delta: f64,
    eps_tol: f64,
    lambda: f64,
    inner: f64,
    outer: f64,
    mu: f64,
) -> Result<(DoubleWarpProfile, CurvatureCertificate)> {
    // sup |rho - m·rho| = (1-delta)·max rho on [inner, mu]
    let mut sup = 0.0f64;
    for k in 0..=64 {
        let r = inner + (mu - inner) * k as f64 / 64.0;
        let v = p.rho.eval(r, 0)?;
        let m = multiplier(r, inner, outer, delta)[0];
        sup = sup.max(((1.0 - m) * v).abs());
    }
    if sup > eps_tol {
        return Err(ModelError::Modification(format!(
            "pointwise change {sup:e} exceeds eps_tol {eps_tol:e}"
        )));
    }

    // assemble the new rho: original cap to `inner`, hermite chain across
    // the transition, delta-scaled original beyond `outer`
    let keep = p.rho.restricted(0.0, inner)?;
    let mut pieces: Vec<ProfilePiece> = keep.pieces().to_vec();
    let chain = 12usize;
    for k in 0..chain {
        let a = inner + (outer - inner) * k as f64 / chain as f64;
        let b = inner + (outer - inner) * (k + 1) as f64 / chain as f64;
        let da = product_data(p, a, inner, outer, delta)?;
        let db = product_data(p, b, inner, outer, delta)?;
        pieces.push(ProfilePiece::new(Box::new(Hermite::quintic(a, b, da, db)), a, b)?);
    }
    let scaled_tail = p.rho.scaled_shifted(delta, 0.0)?.restricted(outer, mu)?;
    pieces.extend(scaled_tail.pieces().iter().cloned());
    let rho = ProfileFunction::new(pieces, true)?;
    let candidate = DoubleWarpProfile::new(p.phi.clone(), rho, p.n, p.boundary)?;

    let opts = CertifyOptions { base_cells: 2048, ..Default::default() };
    let cert =
        certify_bound(&candidate, "modify-fiber", (0.0, mu), &ConstantBound { lambda }, &opts)
            .map_err(|e| ModelError::Modification(format!("certificate failed: {e}")))?;
    Ok((candidate, cert))
}

/// Construct the hypothesis cap profile at scale A⁻¹ on [0, mu]:
/// phi = A⁻¹ sin(A r), rho = A⁻¹ + A³ r⁴.
pub fn hypothesis_cap(a_inv: f64, mu: f64, n: u32) -> Result<DoubleWarpProfile> {
    let amp = a_inv;
    let phi = ProfileFunction::new(
        vec![ProfilePiece::new(
            Box::new(collapsar_profiles::form::SineCap { amplitude: amp }),
            0.0,
            mu,
        )?],
        true,
    )?;
    let rho = ProfileFunction::new(
        vec![ProfilePiece::new(
            Box::new(Quartic { offset: amp, coeff: 1.0 / (amp * amp * amp) }),
            0.0,
            mu,
        )?],
        true,
    )?;
    DoubleWarpProfile::new(phi, rho, n, collapsar_profiles::BoundaryKind::ClosedDisc)
        .map_err(Into::into)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_one_is_identity() {
        let cap = hypothesis_cap(1.0, 0.1, 2).unwrap();
        let (out, _cert) = modify_fiber(&cap, 1.0, 1e-3, 0.5).unwrap();
        assert_eq!(
            collapsar_profiles::json::dwp_to_json(&cap),
            collapsar_profiles::json::dwp_to_json(&out)
        );
    }

    #[test]
    fn outer_half_is_exactly_scaled() {
        let cap = hypothesis_cap(1.0, 0.1, 2).unwrap();
        let (out, cert) = modify_fiber(&cap, 0.5, 0.6, 0.5).unwrap();
        let r = 0.08;
        let want = 0.5 * cap.rho.eval(r, 0).unwrap();
        let got = out.rho.eval(r, 0).unwrap();
        assert!((want - got).abs() < 1e-14, "{want} vs {got}");
        assert!(cert.margin > 0.0);
        // phi untouched
        assert_eq!(
            collapsar_profiles::json::profile_to_json(&cap.phi),
            collapsar_profiles::json::profile_to_json(&out.phi)
        );
    }

    #[test]
    fn unreachable_eps_tol_is_an_error() {
        let cap = hypothesis_cap(1.0, 0.1, 2).unwrap();
        let err = modify_fiber(&cap, 0.5, 1e-6, 0.5);
        assert!(matches!(err, Err(ModelError::Modification(_))), "{err:?}");
    }
}
