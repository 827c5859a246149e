//! C¹-corner smoothing: replace a knot with a slope drop by a quintic
//! blend, keeping the profiles unchanged outside the window, the sup
//! distance small, and the local eigenvalue infimum within tolerance.

use crate::error::{ModelError, Result};
use collapsar_curvature::min_eigenvalue_curve;
use collapsar_profiles::form::Hermite;
use collapsar_profiles::{DoubleWarpProfile, ProfileFunction, ProfilePiece, Side};

const SLOPE_TOL: f64 = 1e-12;

fn has_knot_at(f: &ProfileFunction, r0: f64) -> bool {
    f.knots().iter().any(|&k| k == r0)
}

/// One-sided (value, slope, second derivative) data.
fn side_data(f: &ProfileFunction, r: f64, side: Side) -> Result<[f64; 3]> {
    Ok([f.eval_side(r, 0, side)?, f.eval_side(r, 1, side)?, f.eval_side(r, 2, side)?])
}

/// Blend one profile function at r0 over [r0-w, r0+w]. Returns None when
/// the knot is already C² (nothing to smooth).
fn blend_function(f: &ProfileFunction, r0: f64, w: f64) -> Result<Option<ProfileFunction>> {
    let left = side_data(f, r0, Side::Left)?;
    let right = side_data(f, r0, Side::Right)?;
    let scale = left[1].abs().max(right[1].abs()).max(1.0);
    // only genuine slope corners get blended; a C¹ knot (even with a jump
    // in f'') is left untouched so the operation is idempotent
    let c1_match = (left[1] - right[1]).abs() <= SLOPE_TOL * scale;
    if c1_match {
        return Ok(None);
    }
    let lo = r0 - w;
    let hi = r0 + w;
    let at_lo = side_data(f, lo, Side::Left)?;
    let at_hi = side_data(f, hi, Side::Right)?;
    let blend = ProfilePiece::new(Box::new(Hermite::quintic(lo, hi, at_lo, at_hi)), lo, hi)?;
    Ok(Some(f.with_span_replaced(lo, hi, vec![blend])?))
}

fn sup_distance(orig: &ProfileFunction, new: &ProfileFunction, lo: f64, hi: f64) -> f64 {
    let mut sup: f64 = 0.0;
    for k in 0..=64 {
        let r = lo + (hi - lo) * k as f64 / 64.0;
        let a = orig.eval(r, 0).unwrap_or(f64::NAN);
        let b = new.eval(r, 0).unwrap_or(f64::NAN);
        sup = sup.max((a - b).abs());
    }
    sup
}

fn window_inf(p: &DoubleWarpProfile, lo: f64, hi: f64) -> Result<f64> {
    let (dlo, dhi) = p.domain();
    let a = lo.max(dlo);
    let b = hi.min(dhi);
    let curve = min_eigenvalue_curve(p, (a, b), (b - a) / 512.0)?;
    Ok(curve.iter().map(|c| c.min).fold(f64::INFINITY, f64::min))
}

/// Smooth the knot at r0. Preconditions: C⁰ match (guaranteed by the
/// profile invariants), one-sided slope drops (φ'₊ ≤ φ'₋, ϕ'₊ ≤ ϕ'₋), both
/// functions increasing near r0. Postcondition: unchanged outside
/// (r0-w, r0+w), C² inside, sup-distance within eps_tol, and the window
/// eigenvalue infimum over (r0-2w, r0+2w) loses at most eps_tol. The
/// window halves on failure, up to 8 times.
pub fn smooth_c1_glue(
    p: &DoubleWarpProfile,
    r0: f64,
    half_width: f64,
    eps_tol: f64,
) -> Result<DoubleWarpProfile> {
    let (dlo, dhi) = p.domain();
    if !(r0 > dlo && r0 < dhi) {
        return Err(ModelError::Smoothing { r0, detail: "knot not interior".into() });
    }
    for f in [&p.phi, &p.rho] {
        if !has_knot_at(f, r0) {
            continue;
        }
        let dl = f.eval_side(r0, 1, Side::Left)?;
        let dr = f.eval_side(r0, 1, Side::Right)?;
        let scale = dl.abs().max(dr.abs()).max(1.0);
        if dr > dl + SLOPE_TOL * scale {
            return Err(ModelError::SlopeIncrease { r0, left: dl, right: dr });
        }
        if dl < 0.0 || dr < -SLOPE_TOL * scale {
            return Err(ModelError::Smoothing {
                r0,
                detail: format!("function not increasing near the knot (slopes {dl}, {dr})"),
            });
        }
    }

    // keep the window inside the neighbouring pieces
    let mut gap = f64::INFINITY;
    for f in [&p.phi, &p.rho] {
        for k in f.knots() {
            if k != r0 {
                gap = gap.min((k - r0).abs());
            }
        }
        let (lo, hi) = f.domain();
        gap = gap.min(r0 - lo).min(hi - r0);
    }
    let mut w = half_width.min(0.45 * gap);
    if !(w > 0.0) {
        return Err(ModelError::Smoothing { r0, detail: "no room for a blend window".into() });
    }

    for _retry in 0..=8 {
        let before = window_inf(p, r0 - 2.0 * w, r0 + 2.0 * w)?;
        let phi_new = blend_function(&p.phi, r0, w)?;
        let rho_new = blend_function(&p.rho, r0, w)?;
        if phi_new.is_none() && rho_new.is_none() {
            // already C² on both: output equals input
            return Ok(p.clone());
        }
        let candidate = DoubleWarpProfile {
            phi: phi_new.clone().unwrap_or_else(|| p.phi.clone()),
            rho: rho_new.clone().unwrap_or_else(|| p.rho.clone()),
            n: p.n,
            boundary: p.boundary,
        };
        let mut dist: f64 = 0.0;
        let mut f_scale: f64 = 1.0;
        for (orig, new) in [(&p.phi, &phi_new), (&p.rho, &rho_new)] {
            if let Some(nf) = new {
                dist = dist.max(sup_distance(orig, nf, r0 - w, r0 + w));
                f_scale = f_scale.max(orig.eval(r0, 0)?.abs());
            }
        }
        let after = window_inf(&candidate, r0 - 2.0 * w, r0 + 2.0 * w)?;
        let inf_ok = after >= before - eps_tol * before.abs().max(1.0);
        let dist_ok = dist <= eps_tol * f_scale;
        if inf_ok && dist_ok {
            return Ok(candidate);
        }
        w *= 0.5;
    }
    Err(ModelError::Smoothing {
        r0,
        detail: format!("contract not met after 8 window halvings (eps_tol {eps_tol})"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use collapsar_profiles::form::{Affine, Quartic, SineCap};
    use collapsar_profiles::{BoundaryKind, ProfileFunction, ProfilePiece};

    fn corner_profile(drop: f64) -> DoubleWarpProfile {
        // phi: sine cap to r0 = 0.5, then affine with reduced slope
        let r0 = 0.5f64;
        let cap = ProfilePiece::new(Box::new(SineCap { amplitude: 1.0 }), 0.0, r0).unwrap();
        let slope = r0.cos() - drop;
        let aff = ProfilePiece::new(
            Box::new(Affine { slope, shift: r0.sin() / slope - r0 }),
            r0,
            1.0,
        )
        .unwrap();
        let phi = ProfileFunction::new(vec![cap, aff], true).unwrap();
        let rho = ProfileFunction::new(
            vec![ProfilePiece::new(Box::new(Quartic { offset: 1.0, coeff: 1.0 }), 0.0, 1.0).unwrap()],
            true,
        )
        .unwrap();
        DoubleWarpProfile::new(phi, rho, 2, BoundaryKind::ClosedDisc).unwrap()
    }

    #[test]
    fn corner_smoothing_meets_contract() {
        let p = corner_profile(0.1);
        let before = window_inf(&p, 0.4, 0.6).unwrap();
        let smoothed = smooth_c1_glue(&p, 0.5, 0.02, 1e-3).unwrap();
        let after = window_inf(&smoothed, 0.4, 0.6).unwrap();
        assert!(after >= before - 1e-3, "{after} vs {before}");
        // outside the window the profile is untouched
        let r = 0.6;
        assert_eq!(
            p.phi.eval(r, 0).unwrap().to_bits(),
            smoothed.phi.eval(r, 0).unwrap().to_bits()
        );
        // the blend made the knot at least C¹
        assert!(smoothed.phi.knot_classes().iter().all(|&c| c >= 1));
    }

    #[test]
    fn slope_increase_is_rejected() {
        let p = corner_profile(-0.05);
        let err = smooth_c1_glue(&p, 0.5, 0.02, 1e-3);
        assert!(matches!(err, Err(ModelError::SlopeIncrease { .. })));
    }

    #[test]
    fn smooth_knot_is_left_untouched() {
        // join sine to itself as an affine continuation with matching slope
        let p = corner_profile(0.0);
        let out = smooth_c1_glue(&p, 0.5, 0.02, 1e-3).unwrap();
        let a = collapsar_profiles::json::dwp_to_json(&p);
        let b = collapsar_profiles::json::dwp_to_json(&out);
        assert_eq!(a, b);
    }
}
