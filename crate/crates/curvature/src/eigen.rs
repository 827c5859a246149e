//! Ricci eigenvalues of dr² + φ²g_{S²} + ϕ²g_{Sⁿ} in the radial and two
//! fiber directions, plus the general single-warped-product operator and
//! the S²-fiber rescaling law.

use crate::error::{CurvatureError, Result};
use collapsar_profiles::{eval_ratio, DoubleWarpProfile, RatioKind, Side};

/// Eigenvalues of the Ricci operator on unit vectors (inverse length squared).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciEigenvalues {
    /// Radial direction.
    pub lambda0: f64,
    /// S² fiber direction.
    pub lambda1: f64,
    /// Sⁿ fiber direction.
    pub lambda2: f64,
}

impl RicciEigenvalues {
    pub fn min(&self) -> f64 {
        self.lambda0.min(self.lambda1).min(self.lambda2)
    }
}

/// One-sided eigenvalue evaluation (sides matter at interior knots).
pub fn ricci_eigenvalues_side(
    p: &DoubleWarpProfile,
    r: f64,
    side: Side,
) -> Result<RicciEigenvalues> {
    let n = p.n as f64;
    let phi = &p.phi;
    let rho = &p.rho;
    let a_phi = eval_ratio(phi, phi, r, RatioKind::SecondOverValue, side)?;
    let a_rho = eval_ratio(rho, rho, r, RatioKind::SecondOverValue, side)?;
    let b_phi = eval_ratio(phi, phi, r, RatioKind::OneMinusSlopeSqOverSq, side)?;
    let b_rho = eval_ratio(rho, rho, r, RatioKind::OneMinusSlopeSqOverSq, side)?;
    let x = eval_ratio(phi, rho, r, RatioKind::CrossSlopesOverProduct, side)?;
    Ok(RicciEigenvalues {
        lambda0: -(2.0 * a_phi + n * a_rho),
        lambda1: -a_phi + b_phi - n * x,
        lambda2: -a_rho + (n - 1.0) * b_rho - 2.0 * x,
    })
}

/// Eigenvalues at r (the right-limit at knots).
pub fn ricci_eigenvalues(p: &DoubleWarpProfile, r: f64) -> Result<RicciEigenvalues> {
    ricci_eigenvalues_side(p, r, Side::Right)
}

/// Conservative eigenvalues at r: the componentwise minimum of both
/// one-sided limits.
pub fn ricci_eigenvalues_two_sided_min(p: &DoubleWarpProfile, r: f64) -> Result<RicciEigenvalues> {
    let (lo, hi) = p.domain();
    let right = if r < hi { Some(ricci_eigenvalues_side(p, r, Side::Right)?) } else { None };
    let left = if r > lo { Some(ricci_eigenvalues_side(p, r, Side::Left)?) } else { None };
    match (left, right) {
        (Some(l), Some(rv)) => Ok(RicciEigenvalues {
            lambda0: l.lambda0.min(rv.lambda0),
            lambda1: l.lambda1.min(rv.lambda1),
            lambda2: l.lambda2.min(rv.lambda2),
        }),
        (Some(l), None) => Ok(l),
        (None, Some(rv)) => Ok(rv),
        (None, None) => Err(CurvatureError::Domain(format!("empty domain at r = {r}"))),
    }
}

/// One sample of the eigenvalue curve.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub r: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub min: f64,
}

/// Dense samples of min(λ₀, λ₁, λ₂) on [a, b], including both endpoints and
/// every interior knot (knots contribute the two-sided minimum).
pub fn min_eigenvalue_curve(
    p: &DoubleWarpProfile,
    interval: (f64, f64),
    step: f64,
) -> Result<Vec<CurvePoint>> {
    let (a, b) = interval;
    if !(step > 0.0 && a < b) {
        return Err(CurvatureError::Domain(format!("bad interval/step ({a}, {b}, {step})")));
    }
    let mut rs: Vec<f64> = Vec::new();
    let count = (((b - a) / step).ceil() as usize).clamp(1, 4_000_000);
    for k in 0..=count {
        rs.push(a + (b - a) * k as f64 / count as f64);
    }
    for knot in p.phi.knots().into_iter().chain(p.rho.knots()) {
        if knot > a && knot < b {
            rs.push(knot);
        }
    }
    rs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    rs.dedup();
    rs.iter()
        .map(|&r| {
            let e = ricci_eigenvalues_two_sided_min(p, r)?;
            Ok(CurvePoint {
                r,
                lambda0: e.lambda0,
                lambda1: e.lambda1,
                lambda2: e.lambda2,
                min: e.min(),
            })
        })
        .collect()
}

/// Eigenvalues of the profile with the S² factor scaled by c ∈ (0, 1].
///
/// λ₀ and λ₂ are unchanged; λ₁ picks up (c⁻² − 1)/φ(r)².
pub fn fiber_rescale_eigenvalues(
    p: &DoubleWarpProfile,
    c: f64,
    r: f64,
) -> Result<RicciEigenvalues> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(CurvatureError::Domain(format!("fiber scale c = {c} outside (0, 1]")));
    }
    let base = ricci_eigenvalues(p, r)?;
    if c == 1.0 {
        return Ok(base);
    }
    let phi = p.phi.eval(r, 0)?;
    if phi == 0.0 {
        return Err(CurvatureError::Domain(
            "fiber rescale at the axis (phi = 0) is a cone point".into(),
        ));
    }
    let bump = (1.0 / (c * c) - 1.0) / (phi * phi);
    Ok(RicciEigenvalues { lambda0: base.lambda0, lambda1: base.lambda1 + bump, lambda2: base.lambda2 })
}

/// Ricci of g_M + f²g_{Sⁿ} on caller-supplied scalar reductions: the
/// base-direction value and the fiber-direction eigenvalue.
pub fn general_warped_ricci(
    base_ricci: f64,
    hessian_over_f: f64,
    grad_sq_over_f_sq: f64,
    laplacian_over_f: f64,
    f: f64,
    n: u32,
) -> Result<(f64, f64)> {
    if !(f > 0.0) {
        return Err(CurvatureError::Domain(format!("warping value f = {f} must be > 0")));
    }
    let nf = n as f64;
    let base = base_ricci - nf * hessian_over_f;
    let fiber = 1.0 / (f * f) - (nf - 1.0) * grad_sq_over_f_sq - laplacian_over_f;
    Ok((base, fiber))
}

#[cfg(test)]
mod tests {
    use super::*;
    use collapsar_profiles::form::{Affine, Quartic, ScaledComposite, SineCap};
    use collapsar_profiles::{BoundaryKind, ProfileFunction, ProfilePiece};

    pub fn single(form: Box<dyn collapsar_profiles::PieceForm>, lo: f64, hi: f64) -> ProfileFunction {
        ProfileFunction::new(vec![ProfilePiece::new(form, lo, hi).unwrap()], true).unwrap()
    }

    pub fn round_sphere(n: u32) -> DoubleWarpProfile {
        let hi = std::f64::consts::FRAC_PI_2 * (1.0 - 1e-6);
        let phi = single(Box::new(SineCap { amplitude: 1.0 }), 0.0, hi);
        let rho = single(
            Box::new(ScaledComposite {
                scale: 1.0,
                shift: std::f64::consts::FRAC_PI_2,
                inner: Box::new(SineCap { amplitude: 1.0 }),
            }),
            0.0,
            hi,
        );
        DoubleWarpProfile::new(phi, rho, n, BoundaryKind::ClosedDisc).unwrap()
    }

    pub fn flat_product(n: u32) -> DoubleWarpProfile {
        let phi = single(Box::new(Affine { slope: 1.0, shift: 0.0 }), 0.0, 2.0);
        let rho = single(Box::new(Quartic { offset: 1.0, coeff: 0.0 }), 0.0, 2.0);
        DoubleWarpProfile::new(phi, rho, n, BoundaryKind::ClosedDisc).unwrap()
    }

    #[test]
    fn round_sphere_has_ricci_n_plus_two() {
        for n in 2..=4u32 {
            let p = round_sphere(n);
            for &r in &[0.0, 0.3, 1.0, 1.5] {
                let e = ricci_eigenvalues(&p, r).unwrap();
                let want = (n + 2) as f64;
                for v in [e.lambda0, e.lambda1, e.lambda2] {
                    assert!((v - want).abs() < 1e-9, "n={n} r={r}: {v} vs {want}");
                }
            }
        }
    }

    #[test]
    fn flat_times_round_sphere() {
        let p = flat_product(3);
        let e = ricci_eigenvalues(&p, 0.7).unwrap();
        assert!(e.lambda0.abs() < 1e-12);
        assert!(e.lambda1.abs() < 1e-12);
        assert!((e.lambda2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn part1_cap_lambda0_value() {
        // phi = sin r, rho = 1 + r^4, n = 2, r = 0.05:
        // lambda0 = 2 - 24 r^2/(1 + r^4)
        let phi = single(Box::new(SineCap { amplitude: 1.0 }), 0.0, 0.1);
        let rho = single(Box::new(Quartic { offset: 1.0, coeff: 1.0 }), 0.0, 0.1);
        let p = DoubleWarpProfile::new(phi, rho, 2, BoundaryKind::ClosedDisc).unwrap();
        let r: f64 = 0.05;
        let e = ricci_eigenvalues(&p, r).unwrap();
        let want = 2.0 - 24.0 * r * r / (1.0 + r.powi(4));
        assert!((e.lambda0 - want).abs() < 1e-12, "{} vs {want}", e.lambda0);
    }

    #[test]
    fn fiber_rescale_law() {
        let p = round_sphere(2);
        let r = 0.3;
        let e = fiber_rescale_eigenvalues(&p, 0.5, r).unwrap();
        assert!((e.lambda0 - 4.0).abs() < 1e-9);
        assert!((e.lambda2 - 4.0).abs() < 1e-9);
        let want = 4.0 + 3.0 / r.sin().powi(2);
        assert!((e.lambda1 - want).abs() < 1e-9, "{} vs {want}", e.lambda1);
        // direct evaluation of the scaled profile agrees
        let scaled = p.with_phi_scaled(0.5).unwrap();
        let direct = ricci_eigenvalues(&scaled, r).unwrap();
        assert!((direct.lambda1 - e.lambda1).abs() < 1e-8);
        assert!((direct.lambda0 - e.lambda0).abs() < 1e-8);
        assert!((direct.lambda2 - e.lambda2).abs() < 1e-8);
    }

    #[test]
    fn general_warped_matches_double_warp() {
        // base = dr^2 + phi^2 g_{S^2} with f = rho as the S^n warping
        let p = round_sphere(2);
        let r = std::f64::consts::FRAC_PI_4;
        let phi = |o: u8| p.phi.eval(r, o).unwrap();
        let rho = |o: u8| p.rho.eval(r, o).unwrap();
        let base_ricci = -2.0 * phi(2) / phi(0);
        let hess = rho(2) / rho(0);
        let grad = (rho(1) / rho(0)).powi(2);
        let lap = (rho(2) + 2.0 * phi(1) / phi(0) * rho(1)) / rho(0);
        let (b, f) = general_warped_ricci(base_ricci, hess, grad, lap, rho(0), 2).unwrap();
        let e = ricci_eigenvalues(&p, r).unwrap();
        assert!((b - e.lambda0).abs() < 1e-10, "{b} vs {}", e.lambda0);
        assert!((f - e.lambda2).abs() < 1e-10, "{f} vs {}", e.lambda2);
    }

    #[test]
    fn general_warped_base_value_scale_invariant() {
        let (b1, _) = general_warped_ricci(1.5, 0.25, 0.04, 0.3, 2.0, 2).unwrap();
        // scaling f by c rescales hess f by c but hess f / f is unchanged
        let (b2, _) = general_warped_ricci(1.5, 0.25, 0.04, 0.3, 1.0, 2).unwrap();
        assert_eq!(b1, b2);
        assert!(general_warped_ricci(0.0, 0.0, 0.0, 0.0, -1.0, 2).is_err());
    }

    #[test]
    fn flat_base_unit_fiber() {
        let (b, f) = general_warped_ricci(0.0, 0.0, 0.0, 0.0, 1.0, 2).unwrap();
        assert_eq!(b, 0.0);
        assert_eq!(f, 1.0);
    }
}
