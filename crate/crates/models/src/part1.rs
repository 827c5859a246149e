//! The cap-and-settle construction on [0, R₁]: sine/quartic caps on
//! [0, 1/(10n)], constant-curvature bridges to slope 2c₁ at 1/(9n), and
//! concave runs settling both slopes to c₁ at R₁.

use crate::error::{ModelError, Result};
use crate::params::{alpha0, ModelConstants};
use collapsar_curvature::{certify_bound, CertifyOptions, ConstantBound};
use collapsar_profiles::form::{Hermite, Quartic, SineCap};
use collapsar_profiles::{BoundaryKind, DoubleWarpProfile, ProfileFunction, ProfilePiece};

/// Quadratic piece (a cubic Hermite with linear slope): value and slope
/// prescribed at `lo`, slope prescribed at `hi`; the end value follows.
fn slope_ramp(lo: f64, hi: f64, v0: f64, d0: f64, d1: f64) -> Result<(ProfilePiece, f64)> {
    let v1 = v0 + 0.5 * (hi - lo) * (d0 + d1);
    let piece = ProfilePiece::new(Box::new(Hermite::cubic(lo, hi, v0, d0, v1, d1)), lo, hi)?;
    Ok((piece, v1))
}

pub struct Part1 {
    pub profile: DoubleWarpProfile,
    pub constants: ModelConstants,
    /// (phi value, phi slope, rho value, rho slope) at R₁.
    pub state: (f64, f64, f64, f64),
}

pub fn build_part1(n: u32) -> Result<Part1> {
    if n < 2 {
        return Err(ModelError::Params(format!("n = {n} must be >= 2")));
    }
    let nf = n as f64;
    let a = 1.0 / (10.0 * nf);
    let b = 1.0 / (9.0 * nf);
    let c1 = (10.0 * nf).powi(-3);
    let r1 = 100.0 / c1;

    // phi: sine cap, bridge cos(a) -> 2c1, concave run 2c1 -> c1
    let cap_phi = ProfilePiece::new(Box::new(SineCap { amplitude: 1.0 }), 0.0, a)?;
    let (bridge_phi, v_b) = slope_ramp(a, b, a.sin(), a.cos(), 2.0 * c1)?;
    let (run_phi, phi_r1) = slope_ramp(b, r1, v_b, 2.0 * c1, c1)?;
    let phi = ProfileFunction::new(vec![cap_phi, bridge_phi, run_phi], true)?;

    // rho: quartic cap (slope 4a³ = 4c1 at a), bridge to 2c1, concave run to c1
    let cap_rho = ProfilePiece::new(Box::new(Quartic { offset: 1.0, coeff: 1.0 }), 0.0, a)?;
    let rho_a = 1.0 + a.powi(4);
    let (bridge_rho, w_b) = slope_ramp(a, b, rho_a, 4.0 * c1, 2.0 * c1)?;
    let (run_rho, rho_r1) = slope_ramp(b, r1, w_b, 2.0 * c1, c1)?;
    let rho = ProfileFunction::new(vec![cap_rho, bridge_rho, run_rho], true)?;

    let profile = DoubleWarpProfile::new(phi, rho, n, BoundaryKind::ClosedDisc)?;

    let xi = phi_r1 / c1 - r1;
    if !(xi > 0.0 && xi < r1) {
        return Err(ModelError::Construction {
            clause: "xi in (0, R1)".into(),
            detail: format!("xi = {xi}, R1 = {r1}"),
        });
    }
    // the paper assumes phi(R1) = rho(R1); here they differ by about 1
    if !(rho_r1 / phi_r1 < 2.0 && phi_r1 / rho_r1 < 2.0) {
        return Err(ModelError::Construction {
            clause: "rho(R1) compatible with phi(R1)".into(),
            detail: format!("phi = {phi_r1}, rho = {rho_r1}"),
        });
    }

    // all three eigenvalues strictly positive on [0, R1]
    let opts = CertifyOptions { base_cells: 2048, ..Default::default() };
    certify_bound(&profile, "part1", (0.0, r1), &ConstantBound { lambda: 0.0 }, &opts).map_err(
        |e| ModelError::Construction {
            clause: "Ricci positive on [0, R1]".into(),
            detail: e.to_string(),
        },
    )?;

    let constants = ModelConstants {
        c1,
        r1,
        xi,
        rho_r1,
        c2_log: f64::NAN, // set by part 2 (depends on alpha, epsilon)
        alpha0: f64::NAN,
        alpha0_paper: f64::NAN,
        delta0: f64::NAN,
        big_c: 0.0,
        big_r: f64::NAN,
        x_b: f64::NAN,
        tau: f64::NAN,
        mu: None,
        t_scale: None,
        recap: None,
    };
    Ok(Part1 { profile, constants, state: (phi_r1, c1, rho_r1, c1) })
}

/// Record the alpha/epsilon-dependent constants on a Part-1 output.
pub fn fill_part2_constants(c: &mut ModelConstants, n: u32, epsilon: f64, alpha: f64) {
    let nf = n as f64;
    c.c2_log = -(c.r1 * c.r1) / (alpha * alpha * c.c1 * c.c1 * epsilon * epsilon);
    c.alpha0 = alpha0(n, epsilon);
    c.alpha0_paper = c.c1 * epsilon / (10.0 * nf);
}

#[cfg(test)]
mod tests {
    use super::*;
    use collapsar_curvature::{min_eigenvalue_curve, ricci_eigenvalues};

    #[test]
    fn part1_terminal_slopes_and_xi() {
        let p1 = build_part1(2).unwrap();
        let c1 = (20.0f64).powi(-3);
        assert_eq!(c1, 1.0 / 8000.0);
        let r1 = p1.constants.r1;
        let slope = p1.profile.phi.eval_side(r1, 1, collapsar_profiles::Side::Left).unwrap();
        assert!((slope - c1).abs() < 1e-15, "phi'(R1) = {slope}");
        let rslope = p1.profile.rho.eval_side(r1, 1, collapsar_profiles::Side::Left).unwrap();
        assert!((rslope - c1).abs() < 1e-15);
        assert!(p1.constants.xi > 0.0 && p1.constants.xi < r1);
    }

    #[test]
    fn part1_cap_bounds_match_displayed_inequalities() {
        // n = 2: min lambda0 on [0, 1/18] >= 2 - 12/81; the cap bilinear
        // Sⁿ-direction value stays above (-12/81 + 1/2 - 8/81)·min(rho²)
        let p1 = build_part1(2).unwrap();
        let curve = min_eigenvalue_curve(&p1.profile, (0.0, 1.0 / 18.0), 1e-4).unwrap();
        let min_l0 = curve.iter().map(|p| p.lambda0).fold(f64::INFINITY, f64::min);
        assert!(min_l0 >= 2.0 - 12.0 / 81.0 - 1e-6, "min lambda0 = {min_l0}");
        let mut min_l2_sq = f64::INFINITY;
        let mut min_rho_sq = f64::INFINITY;
        for pt in &curve {
            let rho = p1.profile.rho.eval(pt.r, 0).unwrap();
            min_l2_sq = min_l2_sq.min(pt.lambda2 * rho * rho);
            min_rho_sq = min_rho_sq.min(rho * rho);
        }
        let bound = (-12.0 / 81.0 + 0.5 - 8.0 / 81.0) * min_rho_sq - 1e-6;
        assert!(min_l2_sq >= bound, "min lambda2·rho² = {min_l2_sq} vs {bound}");
    }

    #[test]
    fn part1_positive_everywhere() {
        let p1 = build_part1(3).unwrap();
        for r in [0.0, 0.02, 0.034, 0.036, 1.0, 1e3, 2.7e6] {
            let e = ricci_eigenvalues(&p1.profile, r).unwrap();
            assert!(e.min() > 0.0, "r = {r}: {e:?}");
        }
    }
}
