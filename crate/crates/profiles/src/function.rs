//! Piecewise profile functions with exact derivative evaluation.

use crate::error::{ProfileError, Result};
use crate::form::{Envelope, PieceForm};

/// Relative-aware C0/C1 knot tolerance. The spec's 1e-12 is absolute at
/// unit scale; values of order 1e100 only carry ~1e84 of float resolution,
/// so the tolerance scales with magnitude.
pub const KNOT_TOL: f64 = 1e-12;

fn knot_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= KNOT_TOL * a.abs().max(b.abs()).max(1.0)
}

/// One form restricted to a closed interval.
#[derive(Debug, Clone)]
pub struct ProfilePiece {
    pub form: Box<dyn PieceForm>,
    pub lo: f64,
    pub hi: f64,
}

impl ProfilePiece {
    pub fn new(form: Box<dyn PieceForm>, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ProfileError::Tiling(format!("bad piece domain [{lo}, {hi}]")));
        }
        let piece = ProfilePiece { form, lo, hi };
        for &r in &[lo, 0.5 * (lo + hi), hi] {
            for order in 0..=2u8 {
                let v = piece.form.eval(r, order);
                if !v.is_finite() {
                    return Err(ProfileError::NonFinite { kind: piece.form.kind().into(), r });
                }
            }
        }
        if !piece.d2_lipschitz().is_finite() {
            return Err(ProfileError::NonFinite { kind: piece.form.kind().into(), r: lo });
        }
        Ok(piece)
    }

    /// Lipschitz constant of f'' on this piece's domain.
    pub fn d2_lipschitz(&self) -> f64 {
        self.form.d2_lipschitz(self.lo, self.hi)
    }

    pub fn envelope(&self, lo: f64, hi: f64) -> Envelope {
        self.form.envelope(lo.max(self.lo), hi.min(self.hi))
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Which one-sided limit to take at a knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// An ordered chain of pieces tiling an interval.
#[derive(Debug, Clone)]
pub struct ProfileFunction {
    pieces: Vec<ProfilePiece>,
    /// Continuity class (0, 1 or 2) measured at each interior knot.
    knot_classes: Vec<u8>,
    pub positive: bool,
}

impl ProfileFunction {
    pub fn new(pieces: Vec<ProfilePiece>, positive: bool) -> Result<Self> {
        if pieces.is_empty() {
            return Err(ProfileError::Tiling("no pieces".into()));
        }
        let mut knot_classes = Vec::with_capacity(pieces.len().saturating_sub(1));
        for w in pieces.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.hi != b.lo {
                return Err(ProfileError::Tiling(format!(
                    "gap/overlap between pieces at {} vs {}",
                    a.hi, b.lo
                )));
            }
            let knot = a.hi;
            let vl = a.form.eval(knot, 0);
            let vr = b.form.eval(knot, 0);
            if !knot_close(vl, vr) {
                return Err(ProfileError::Continuity { knot, gap: (vl - vr).abs() });
            }
            let dl = a.form.eval(knot, 1);
            let dr = b.form.eval(knot, 1);
            let mut class = 0u8;
            if knot_close(dl, dr) {
                class = 1;
                let sl = a.form.eval(knot, 2);
                let sr = b.form.eval(knot, 2);
                if (sl - sr).abs() <= 1e-9 * sl.abs().max(sr.abs()).max(1.0) {
                    class = 2;
                }
            }
            knot_classes.push(class);
        }
        let f = ProfileFunction { pieces, knot_classes, positive };
        if positive {
            f.check_positive()?;
        }
        Ok(f)
    }

    fn check_positive(&self) -> Result<()> {
        let (lo, hi) = self.domain();
        for piece in &self.pieces {
            for k in 0..=16 {
                let r = piece.lo + piece.width() * k as f64 / 16.0;
                let v = piece.form.eval(r, 0);
                let at_boundary = r == lo || r == hi;
                if v < 0.0 || (!at_boundary && v == 0.0) {
                    return Err(ProfileError::Invariant(format!(
                        "flagged positive but f({r}) = {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    pub fn pieces(&self) -> &[ProfilePiece] {
        &self.pieces
    }

    pub fn knot_classes(&self) -> &[u8] {
        &self.knot_classes
    }

    /// Interior knot radii.
    pub fn knots(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.lo).collect()
    }

    fn piece_index(&self, r: f64, side: Side) -> Result<usize> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&r) {
            return Err(ProfileError::Domain { r, lo, hi });
        }
        let idx = match side {
            // right-limit: first piece whose hi exceeds r
            Side::Right => self.pieces.partition_point(|p| p.hi <= r),
            // left-limit: last piece whose lo is below r
            Side::Left => self.pieces.partition_point(|p| p.lo < r).saturating_sub(1),
        };
        Ok(idx.min(self.pieces.len() - 1))
    }

    /// Value or derivative at r; the right-limit at knots.
    pub fn eval(&self, r: f64, order: u8) -> Result<f64> {
        self.eval_side(r, order, Side::Right)
    }

    /// One-sided value or derivative at r.
    pub fn eval_side(&self, r: f64, order: u8, side: Side) -> Result<f64> {
        if order > 2 {
            return Err(ProfileError::UnsupportedOrder(order));
        }
        let idx = self.piece_index(r, side)?;
        Ok(self.pieces[idx].form.eval(r, order))
    }

    /// Taylor coefficients [f, f', f'', f''', f''''], one-sided.
    pub fn taylor_side(&self, r: f64, side: Side) -> Result<[f64; 5]> {
        let idx = self.piece_index(r, side)?;
        Ok(self.pieces[idx].form.taylor(r))
    }

    /// The piece active at r from the given side.
    pub fn piece_at(&self, r: f64, side: Side) -> Result<&ProfilePiece> {
        Ok(&self.pieces[self.piece_index(r, side)?])
    }

    /// Concatenate two profile functions at a shared knot.
    pub fn knot_join(left: &ProfileFunction, right: &ProfileFunction) -> Result<ProfileFunction> {
        let (_, lhi) = left.domain();
        let (rlo, _) = right.domain();
        if lhi != rlo {
            return Err(ProfileError::Tiling(format!(
                "left ends at {lhi}, right starts at {rlo}"
            )));
        }
        let mut pieces = left.pieces.clone();
        pieces.extend(right.pieces.iter().cloned());
        ProfileFunction::new(pieces, left.positive && right.positive)
    }

    /// The function r ↦ f(t·r)/t on the rescaled domain.
    pub fn rescaled(&self, t: f64) -> Result<ProfileFunction> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| ProfilePiece::new(p.form.rescaled(t), p.lo / t, p.hi / t))
            .collect::<Result<Vec<_>>>()?;
        ProfileFunction::new(pieces, self.positive)
    }

    /// The function r ↦ s·f(r + θ), restricted to the shifted domain.
    pub fn scaled_shifted(&self, s: f64, theta: f64) -> Result<ProfileFunction> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                ProfilePiece::new(
                    Box::new(crate::form::ScaledComposite {
                        scale: s,
                        shift: theta,
                        inner: p.form.clone(),
                    }),
                    p.lo - theta,
                    p.hi - theta,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        ProfileFunction::new(pieces, self.positive && s > 0.0)
    }

    /// Truncate to [domain.lo, new_hi], splitting no pieces (new_hi must be
    /// at or beyond some piece boundary; the piece containing new_hi is cut).
    pub fn truncated(&self, new_hi: f64) -> Result<ProfileFunction> {
        let (lo, hi) = self.domain();
        if !(lo < new_hi && new_hi <= hi) {
            return Err(ProfileError::Domain { r: new_hi, lo, hi });
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            if p.lo >= new_hi {
                break;
            }
            let mut q = p.clone();
            if q.hi > new_hi {
                q = ProfilePiece::new(q.form, q.lo, new_hi)?;
            }
            pieces.push(q);
        }
        ProfileFunction::new(pieces, self.positive)
    }

    /// Restrict to [new_lo, new_hi] (cutting boundary pieces).
    pub fn restricted(&self, new_lo: f64, new_hi: f64) -> Result<ProfileFunction> {
        let (lo, hi) = self.domain();
        if !(lo <= new_lo && new_lo < new_hi && new_hi <= hi) {
            return Err(ProfileError::Domain { r: new_lo, lo, hi });
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            if p.hi <= new_lo || p.lo >= new_hi {
                continue;
            }
            let cut_lo = p.lo.max(new_lo);
            let cut_hi = p.hi.min(new_hi);
            pieces.push(ProfilePiece::new(p.form.clone(), cut_lo, cut_hi)?);
        }
        ProfileFunction::new(pieces, self.positive)
    }

    /// Replace the span [lo, hi] by the given pieces (used by smoothing).
    pub fn with_span_replaced(&self, lo: f64, hi: f64, span: Vec<ProfilePiece>) -> Result<Self> {
        let (dlo, dhi) = self.domain();
        let mut pieces: Vec<ProfilePiece> = Vec::new();
        if dlo < lo {
            pieces.extend(self.restricted(dlo, lo)?.pieces);
        }
        pieces.extend(span);
        if hi < dhi {
            pieces.extend(self.restricted(hi, dhi)?.pieces);
        }
        ProfileFunction::new(pieces, self.positive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::{Affine, Hermite, SineCap};

    fn sine_then_hermite() -> ProfileFunction {
        let cap = ProfilePiece::new(Box::new(SineCap { amplitude: 1.0 }), 0.0, 0.1).unwrap();
        let v = 0.1f64.sin();
        let d = 0.1f64.cos();
        let bridge = ProfilePiece::new(
            Box::new(Hermite::cubic(0.1, 0.2, v, d, v + 0.09, 0.8)),
            0.1,
            0.2,
        )
        .unwrap();
        ProfileFunction::new(vec![cap, bridge], true).unwrap()
    }

    #[test]
    fn join_records_c1_knot() {
        let f = sine_then_hermite();
        assert_eq!(f.knot_classes(), &[1]);
    }

    #[test]
    fn join_rejects_value_jump() {
        let cap = ProfilePiece::new(Box::new(SineCap { amplitude: 1.0 }), 0.0, 0.1).unwrap();
        let jump = ProfilePiece::new(Box::new(Affine { slope: 1.0, shift: 0.5 }), 0.1, 0.2).unwrap();
        let err = ProfileFunction::new(vec![cap, jump], true).unwrap_err();
        assert!(matches!(err, ProfileError::Continuity { .. }));
    }

    #[test]
    fn c0_knot_recorded_when_slopes_differ() {
        // affine c1(r+xi) then power with a slope drop, as in the model tail
        let aff = ProfilePiece::new(Box::new(Affine { slope: 0.5, shift: 1.0 }), 1.0, 2.0).unwrap();
        let v = 0.5 * (2.0 + 1.0);
        let pow = ProfilePiece::new(
            Box::new(crate::form::Power { scale: v / 2.0f64.powf(0.25), shift: 0.0, exponent: 0.25 }),
            2.0,
            3.0,
        )
        .unwrap();
        let f = ProfileFunction::new(vec![aff, pow], true).unwrap();
        assert_eq!(f.knot_classes(), &[0]);
    }

    #[test]
    fn eval_takes_right_limit_at_knot() {
        let f = sine_then_hermite();
        let r = 0.1;
        let right = f.pieces()[1].form.eval(r, 2);
        assert_eq!(f.eval(r, 2).unwrap(), right);
        let left = f.pieces()[0].form.eval(r, 2);
        assert_eq!(f.eval_side(r, 2, Side::Left).unwrap(), left);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let f = sine_then_hermite();
        assert!(matches!(f.eval(0.3, 0), Err(ProfileError::Domain { .. })));
        assert!(matches!(f.eval(0.05, 3), Err(ProfileError::UnsupportedOrder(3))));
    }
}
