//! Ratios of profile functions with analytic limits at the axis.
//!
//! The three ratio kinds are the building blocks of the Ricci eigenvalue
//! formulas. Away from the axis they are direct quotients; at r = 0 on a
//! closed disc the quotients are 0/0 and the limits come from 4th-order
//! Taylor data of the active pieces.

use crate::error::{ProfileError, Result};
use crate::function::{ProfileFunction, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    /// f''/f
    SecondOverValue,
    /// (1 - (f')²)/f²
    OneMinusSlopeSqOverSq,
    /// f'·g'/(f·g)
    CrossSlopesOverProduct,
}

/// Scale-aware zero test for Taylor coefficients.
fn is_zero(x: f64, scale: f64) -> bool {
    x.abs() <= 1e-9 * scale.max(1.0)
}

fn taylor_scale(t: &[f64; 5]) -> f64 {
    t.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// f''/f with the r = 0 limit f'''(0)/f'(0) when f vanishes there.
pub fn second_over_value(f: &ProfileFunction, r: f64, side: Side) -> Result<f64> {
    let t = f.taylor_side(r, side)?;
    let scale = taylor_scale(&t);
    if !is_zero(t[0], scale) {
        return Ok(t[2] / t[0]);
    }
    if !is_zero(t[1], scale) && is_zero(t[2], scale) {
        return Ok(t[3] / t[1]);
    }
    Err(ProfileError::Singularity { r, detail: "f''/f with f -> 0 faster than f''".into() })
}

/// (1 - f'²)/f² with the r = 0 limit -f'''(0)/f'(0) when f(0) = 0, f'(0)² = 1.
pub fn one_minus_slope_sq_over_sq(f: &ProfileFunction, r: f64, side: Side) -> Result<f64> {
    let t = f.taylor_side(r, side)?;
    let scale = taylor_scale(&t);
    if !is_zero(t[0], scale) {
        let d1 = t[1];
        // fused multiply-add keeps 1 - f'^2 accurate when f' is near 1
        let num = f64::mul_add(-d1, d1, 1.0);
        return Ok(num / (t[0] * t[0]));
    }
    if is_zero(t[1].abs() - 1.0, 1.0) && is_zero(t[2], scale) {
        return Ok(-t[3] / t[1]);
    }
    Err(ProfileError::Singularity {
        r,
        detail: format!("(1-f'^2)/f^2 with f(0)=0, f'(0)={}", t[1]),
    })
}

/// f'g'/(fg) with the r = 0 limit g''(0)/g(0) when f(0) = 0 (or symmetric).
pub fn cross_slopes_over_product(
    f: &ProfileFunction,
    g: &ProfileFunction,
    r: f64,
    side: Side,
) -> Result<f64> {
    let tf = f.taylor_side(r, side)?;
    let tg = g.taylor_side(r, side)?;
    let sf = taylor_scale(&tf);
    let sg = taylor_scale(&tg);
    let f_zero = is_zero(tf[0], sf);
    let g_zero = is_zero(tg[0], sg);
    match (f_zero, g_zero) {
        (false, false) => Ok((tf[1] * tg[1]) / (tf[0] * tg[0])),
        (true, false) => {
            // f ~ f'(0) r: ratio -> g'(r)/(r g(0)) -> g''(0)/g(0) when g'(0)=0
            if !is_zero(tf[1], sf) && is_zero(tg[1], sg) {
                Ok(tg[2] / tg[0])
            } else {
                Err(ProfileError::Singularity { r, detail: "f'g'/(fg), f -> 0".into() })
            }
        }
        (false, true) => {
            if !is_zero(tg[1], sg) && is_zero(tf[1], sf) {
                Ok(tf[2] / tf[0])
            } else {
                Err(ProfileError::Singularity { r, detail: "f'g'/(fg), g -> 0".into() })
            }
        }
        (true, true) => {
            Err(ProfileError::Singularity { r, detail: "f'g'/(fg), both factors -> 0".into() })
        }
    }
}

/// Evaluate a ratio kind, taking the axis limit only exactly at the domain
/// start; elsewhere strict quotients (singular denominators are errors).
pub fn eval_ratio(
    f: &ProfileFunction,
    g: &ProfileFunction,
    r: f64,
    kind: RatioKind,
    side: Side,
) -> Result<f64> {
    let axis = r == f.domain().0 || r == 0.0;
    match kind {
        RatioKind::SecondOverValue => {
            if axis {
                second_over_value(f, r, side)
            } else {
                let v = f.eval_side(r, 0, side)?;
                if v == 0.0 {
                    return Err(ProfileError::Singularity { r, detail: "f = 0".into() });
                }
                Ok(f.eval_side(r, 2, side)? / v)
            }
        }
        RatioKind::OneMinusSlopeSqOverSq => {
            if axis {
                one_minus_slope_sq_over_sq(f, r, side)
            } else {
                let v = f.eval_side(r, 0, side)?;
                if v == 0.0 {
                    return Err(ProfileError::Singularity { r, detail: "f = 0".into() });
                }
                let d = f.eval_side(r, 1, side)?;
                Ok(f64::mul_add(-d, d, 1.0) / (v * v))
            }
        }
        RatioKind::CrossSlopesOverProduct => {
            if axis {
                cross_slopes_over_product(f, g, r, side)
            } else {
                let vf = f.eval_side(r, 0, side)?;
                let vg = g.eval_side(r, 0, side)?;
                if vf == 0.0 || vg == 0.0 {
                    return Err(ProfileError::Singularity { r, detail: "f g = 0".into() });
                }
                Ok((f.eval_side(r, 1, side)? * g.eval_side(r, 1, side)?) / (vf * vg))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::{Quartic, ScaledComposite, SineCap};
    use crate::function::ProfilePiece;

    fn sine(hi: f64) -> ProfileFunction {
        let p = ProfilePiece::new(Box::new(SineCap { amplitude: 1.0 }), 0.0, hi).unwrap();
        ProfileFunction::new(vec![p], true).unwrap()
    }

    fn cosine(hi: f64) -> ProfileFunction {
        let p = ProfilePiece::new(
            Box::new(ScaledComposite {
                scale: 1.0,
                shift: std::f64::consts::FRAC_PI_2,
                inner: Box::new(SineCap { amplitude: 1.0 }),
            }),
            0.0,
            hi,
        )
        .unwrap();
        ProfileFunction::new(vec![p], true).unwrap()
    }

    fn quartic(hi: f64) -> ProfileFunction {
        let p = ProfilePiece::new(Box::new(Quartic { offset: 1.0, coeff: 1.0 }), 0.0, hi).unwrap();
        ProfileFunction::new(vec![p], true).unwrap()
    }

    #[test]
    fn sine_limits_at_zero() {
        let f = sine(1.0);
        assert!((second_over_value(&f, 0.0, Side::Right).unwrap() + 1.0).abs() < 1e-14);
        assert!((one_minus_slope_sq_over_sq(&f, 0.0, Side::Right).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cross_ratio_sine_cosine_at_quarter_pi() {
        // cos·(-sin)/(sin·cos) = -1 exactly
        let f = sine(1.5);
        let g = cosine(1.5);
        let v = eval_ratio(&f, &g, std::f64::consts::FRAC_PI_4, RatioKind::CrossSlopesOverProduct, Side::Right)
            .unwrap();
        assert!((v + 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn cross_ratio_limit_uses_second_factor() {
        // f = sin r, g = 1 + r^4: limit g''(0)/g(0) = 0
        let f = sine(0.5);
        let g = quartic(0.5);
        let v = cross_slopes_over_product(&f, &g, 0.0, Side::Right).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn ratio_converges_quadratically_to_limit() {
        let f = sine(0.5);
        let g = quartic(0.5);
        // g''/g has limit 0 at the axis; error ~ 12 eps^2
        let mut errs = Vec::new();
        for eps in [1e-2, 1e-3, 1e-4] {
            let v = eval_ratio(&g, &f, eps, RatioKind::SecondOverValue, Side::Right).unwrap();
            errs.push(v.abs());
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log10();
            assert!(order >= 1.9, "observed order {order}");
        }
    }

    #[test]
    fn singular_denominator_is_an_error() {
        // affine hitting zero exactly at r = 1 inside the domain
        let p = ProfilePiece::new(
            Box::new(crate::form::Affine { slope: 1.0, shift: -1.0 }),
            0.5,
            2.0,
        )
        .unwrap();
        let f = ProfileFunction::new(vec![p], false).unwrap();
        let err = eval_ratio(&f, &f, 1.0, RatioKind::SecondOverValue, Side::Right);
        assert!(matches!(err, Err(ProfileError::Singularity { .. })));
    }
}
