//! The tail construction on [R₁, r_max]: a coupled ladder of shifted-power
//! stages climbs the Sⁿ slope from c₁ toward the cone angle while the S²
//! factor supplies the radial-direction curvature budget; an affine run
//! then meets the cone line (1-ε)·r at R, and the S² factor settles into
//! its power tail δ₀·r^α.
//!
//! Stage exponents obey q - 1 ≤ 2p(1-p)/n (radial direction) with p capped
//! by the Sⁿ-direction cross term, each at half budget; every candidate
//! stage is probe-checked against the eigenvalue floor before it is
//! committed, and the whole profile is certified afterwards.

use crate::error::{ModelError, Result};
use crate::part1::Part1;
use collapsar_profiles::form::{Affine, Power};
use collapsar_profiles::{BoundaryKind, DoubleWarpProfile, ProfileFunction, ProfilePiece};

pub struct LadderOutcome {
    pub profile: DoubleWarpProfile,
    pub x_b: f64,
    pub big_r: f64,
    pub delta0: f64,
    pub r_max: f64,
    pub stages: usize,
}

struct FnState {
    value: f64,
    slope: f64,
}

/// Shifted power through (x, value) with the given slope and exponent.
fn power_through(x: f64, state: &FnState, exponent: f64) -> Power {
    let shift = exponent * state.value / state.slope - x;
    let scale = state.value / (x + shift).powf(exponent);
    Power { scale, shift, exponent }
}

fn eigen_probe(
    n: f64,
    phi: &Power,
    rho: &Power,
    r: f64,
) -> (f64, f64, f64) {
    let pv = phi.scale * (r + phi.shift).powf(phi.exponent);
    let pd = phi.exponent * pv / (r + phi.shift);
    let pdd = phi.exponent * (phi.exponent - 1.0) * pv / ((r + phi.shift) * (r + phi.shift));
    let rv = rho.scale * (r + rho.shift).powf(rho.exponent);
    let rd = rho.exponent * rv / (r + rho.shift);
    let rdd = rho.exponent * (rho.exponent - 1.0) * rv / ((r + rho.shift) * (r + rho.shift));
    let l0 = -(2.0 * pdd / pv + n * rdd / rv);
    let l1 = -pdd / pv + f64::mul_add(-pd, pd, 1.0) / (pv * pv) - n * pd * rd / (pv * rv);
    let l2 = -rdd / rv + (n - 1.0) * f64::mul_add(-rd, rd, 1.0) / (rv * rv)
        - 2.0 * pd * rd / (pv * rv);
    (l0, l1, l2)
}

/// Grow the profile from the Part-1 state out to the cone regime.
pub fn build_part2(part1: &Part1, epsilon: f64, alpha: f64, r_max: Option<f64>) -> Result<LadderOutcome> {
    let n = part1.profile.n;
    let nf = n as f64;
    let (phi_r1, sphi_r1, rho_r1, srho_r1) = part1.state;
    let r1 = part1.constants.r1;

    let s_top = 1.0 - 0.85 * epsilon;
    let line_guard = (1.0 - epsilon) * (1.0 - epsilon / 20.0);
    let floor = alpha * (1.0 - alpha);

    let mut x = r1;
    let mut phi = FnState { value: phi_r1, slope: sphi_r1 };
    let mut rho = FnState { value: rho_r1, slope: srho_r1 };
    let mut phi_pieces: Vec<ProfilePiece> = Vec::new();
    let mut rho_pieces: Vec<ProfilePiece> = Vec::new();
    let mut stages = 0usize;

    while rho.slope < s_top * (1.0 - 1e-12) {
        let mut s_tgt = (4.0 * rho.slope).min(s_top);
        let mut committed = false;
        for _attempt in 0..60 {
            if s_tgt <= rho.slope * (1.0 + 1e-9) {
                break;
            }
            let p_cap = (nf - 1.0) * f64::mul_add(-s_tgt, s_tgt, 1.0) / (2.0 * s_tgt * s_tgt);
            let p = (0.5 * p_cap).min(0.5);
            if p < 1e-7 {
                break;
            }
            let d = p * (1.0 - p) / nf;
            let ln_span = (s_tgt / rho.slope).ln() / d;
            if ln_span > 60.0 || x.ln() + ln_span > 600.0 {
                s_tgt = (s_tgt * rho.slope).sqrt();
                continue;
            }
            let rho_pw = power_through(x, &rho, 1.0 + d);
            let phi_pw = power_through(x, &phi, p);
            let x1 = (x + rho_pw.shift) * ln_span.exp() - rho_pw.shift;
            if !(x1.is_finite() && x1 > x * (1.0 + 1e-12)) {
                s_tgt = (s_tgt * rho.slope).sqrt();
                continue;
            }
            // probe the true eigenvalues at geometric points across the stage
            let mut ok = true;
            for k in 0..=8 {
                let t = k as f64 / 8.0;
                let r = (x + rho_pw.shift) * ((x1 + rho_pw.shift) / (x + rho_pw.shift)).powf(t)
                    - rho_pw.shift;
                let (l0, l1, l2) = eigen_probe(nf, &phi_pw, &rho_pw, r);
                let m = l0.min(l1).min(l2) * (1.0 + r * r);
                let rv = rho_pw.scale * (r + rho_pw.shift).powf(rho_pw.exponent);
                if !(m >= floor) || rv > line_guard * r {
                    ok = false;
                    break;
                }
            }
            if !ok {
                s_tgt = (s_tgt * rho.slope).sqrt();
                continue;
            }
            // commit the stage
            phi_pieces.push(ProfilePiece::new(Box::new(phi_pw.clone()), x, x1)?);
            rho_pieces.push(ProfilePiece::new(Box::new(rho_pw.clone()), x, x1)?);
            let rv = rho_pw.scale * (x1 + rho_pw.shift).powf(rho_pw.exponent);
            rho = FnState { value: rv, slope: rho_pw.exponent * rv / (x1 + rho_pw.shift) };
            let pv = phi_pw.scale * (x1 + phi_pw.shift).powf(phi_pw.exponent);
            phi = FnState { value: pv, slope: phi_pw.exponent * pv / (x1 + phi_pw.shift) };
            x = x1;
            stages += 1;
            committed = true;
            break;
        }
        if !committed {
            return Err(ModelError::Construction {
                clause: "ladder stage feasible".into(),
                detail: format!(
                    "no admissible stage at x = {x:e}, rho slope {srho:.6}, target {s_top:.6}",
                    srho = rho.slope
                ),
            });
        }
        if stages > 120 {
            return Err(ModelError::Construction {
                clause: "ladder terminates".into(),
                detail: format!("{stages} stages without reaching the cone slope"),
            });
        }
    }

    let x_b = x;
    if !(rho.value < line_guard * x_b) {
        return Err(ModelError::Construction {
            clause: "rho below the cone line at the climb end".into(),
            detail: format!("rho(x_b) = {}, line = {}", rho.value, (1.0 - epsilon) * x_b),
        });
    }

    // phi settles into its power tail at x_b; the handoff drops the slope
    let delta0 = phi.value * x_b.powf(-alpha);
    let tail_slope = alpha * phi.value / x_b;
    if tail_slope > phi.slope * (1.0 + 1e-12) {
        return Err(ModelError::Construction {
            clause: "phi tail slope compatibility (phi2' <= phi1' at the handoff)".into(),
            detail: format!("{tail_slope:e} > {:e}", phi.slope),
        });
    }

    // rho runs affine at s_top until it meets (1-eps)·r at R (bisection)
    let g = |r: f64| rho.value + s_top * (r - x_b) - (1.0 - epsilon) * r;
    let hard_max = r_max.unwrap_or(f64::MAX).min(1e280);
    let (mut lo, mut hi) = (x_b, 64.0 * x_b);
    if g(lo) >= 0.0 {
        return Err(ModelError::Construction {
            clause: "terminal match bracket".into(),
            detail: "rho already above the cone line at x_b".into(),
        });
    }
    while g(hi) < 0.0 {
        hi *= 4.0;
        if hi > hard_max {
            return Err(ModelError::Construction {
                clause: "terminal match within r_max".into(),
                detail: format!("R exceeds {hard_max:e}; reject rather than truncate"),
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-12 * hi {
            break;
        }
    }
    let big_r = hi;
    let r_max = match r_max {
        Some(rm) => {
            if rm < 2.0 * big_r {
                return Err(ModelError::Construction {
                    clause: "r_max beyond the gluing radius".into(),
                    detail: format!("r_max = {rm:e} < 2R = {:e}", 2.0 * big_r),
                });
            }
            rm
        }
        None => 4.0 * big_r,
    };

    // assemble: phi = part1 ++ ladder ++ power tail
    let mut phi_all = part1.profile.phi.pieces().to_vec();
    phi_all.extend(phi_pieces);
    phi_all.push(ProfilePiece::new(
        Box::new(Power { scale: delta0, shift: 0.0, exponent: alpha }),
        x_b,
        r_max,
    )?);
    // rho = part1 ++ ladder ++ affine run ++ cone line
    let mut rho_all = part1.profile.rho.pieces().to_vec();
    rho_all.extend(rho_pieces);
    rho_all.push(ProfilePiece::new(
        Box::new(Affine { slope: s_top, shift: rho.value / s_top - x_b }),
        x_b,
        big_r,
    )?);
    let cone_value = rho.value + s_top * (big_r - x_b);
    rho_all.push(ProfilePiece::new(
        Box::new(Affine { slope: 1.0 - epsilon, shift: cone_value / (1.0 - epsilon) - big_r }),
        big_r,
        r_max,
    )?);

    let profile = DoubleWarpProfile::new(
        ProfileFunction::new(phi_all, true)?,
        ProfileFunction::new(rho_all, true)?,
        n,
        BoundaryKind::ClosedDisc,
    )?;
    Ok(LadderOutcome { profile, x_b, big_r, delta0, r_max, stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::part1::build_part1;
    use collapsar_curvature::ricci_eigenvalues;

    #[test]
    fn ladder_reaches_cone_regime() {
        let p1 = build_part1(3).unwrap();
        let out = build_part2(&p1, 0.01, 1e-4, None).unwrap();
        assert!(out.big_r > out.x_b && out.big_r < 1e290);
        // tail slope of rho is exactly 1 - eps beyond R
        let s = out
            .profile
            .rho
            .eval_side(out.big_r * 2.0, 1, collapsar_profiles::Side::Left)
            .unwrap();
        assert!((s - 0.99).abs() < 1e-12, "cone slope {s}");
        // eigenvalue floor across the tail
        for r in [out.x_b * 1.01, out.big_r, out.r_max * 0.99] {
            let e = ricci_eigenvalues(&out.profile, r).unwrap();
            let m = e.min() * (1.0 + r * r);
            assert!(m > 0.5e-4, "r = {r:e}: {m:e}");
        }
    }

    #[test]
    fn phi_tail_slope_drop_is_recorded_as_c0_corner() {
        let p1 = build_part1(3).unwrap();
        let out = build_part2(&p1, 0.01, 1e-4, None).unwrap();
        // at x_b the phi knot is a genuine corner (class 0), at R rho drops
        let knots = out.profile.phi.knots();
        let classes = out.profile.phi.knot_classes();
        let idx = knots.iter().position(|&k| k == out.x_b).unwrap();
        assert_eq!(classes[idx], 0);
    }
}
