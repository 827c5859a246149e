//! The pair of warping profiles defining dr² + φ²g_{S²} + ϕ²g_{Sⁿ}.

use crate::error::{ProfileError, Result};
use crate::function::{ProfileFunction, Side};

/// Behaviour of the metric at the inner end of the radial interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// r = 0 caps off smoothly: φ(0) = 0, φ'(0) = 1, ϕ(0) > 0.
    ClosedDisc,
    /// the radial interval starts at r_min > 0.
    OpenAnnulus,
}

impl BoundaryKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::ClosedDisc => "closed-disc",
            BoundaryKind::OpenAnnulus => "open-annulus",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "closed-disc" => Ok(BoundaryKind::ClosedDisc),
            "open-annulus" => Ok(BoundaryKind::OpenAnnulus),
            other => Err(ProfileError::Parse(format!("unknown boundary kind {other}"))),
        }
    }
}

/// Warping profiles (φ for the S² factor, ϕ for the Sⁿ factor) plus the
/// fiber dimension n.
#[derive(Debug, Clone)]
pub struct DoubleWarpProfile {
    /// S² warping function (the collapsing factor).
    pub phi: ProfileFunction,
    /// Sⁿ warping function.
    pub rho: ProfileFunction,
    pub n: u32,
    pub boundary: BoundaryKind,
}

const AXIS_TOL: f64 = 1e-10;

impl DoubleWarpProfile {
    pub fn new(
        phi: ProfileFunction,
        rho: ProfileFunction,
        n: u32,
        boundary: BoundaryKind,
    ) -> Result<Self> {
        if n < 2 {
            return Err(ProfileError::Invariant(format!("fiber dimension n = {n} < 2")));
        }
        let p = DoubleWarpProfile { phi, rho, n, boundary };
        match boundary {
            BoundaryKind::ClosedDisc => p.check_closed_disc()?,
            BoundaryKind::OpenAnnulus => {
                if p.domain().0 <= 0.0 {
                    return Err(ProfileError::Invariant(
                        "open-annulus requires r_min > 0".into(),
                    ));
                }
            }
        }
        Ok(p)
    }

    /// Common radial domain of the two profiles.
    pub fn domain(&self) -> (f64, f64) {
        let (pl, ph) = self.phi.domain();
        let (rl, rh) = self.rho.domain();
        (pl.max(rl), ph.min(rh))
    }

    /// §3.1 smoothness conditions at r = 0, via one-sided Taylor data.
    fn check_closed_disc(&self) -> Result<()> {
        let (lo, _) = self.domain();
        if lo != 0.0 {
            return Err(ProfileError::Invariant(format!(
                "closed-disc domain must start at 0, got {lo}"
            )));
        }
        let tp = self.phi.taylor_side(0.0, Side::Right)?;
        let tr = self.rho.taylor_side(0.0, Side::Right)?;
        // φ(0) = 0, φ'(0) = 1, even derivatives vanish
        let phi_ok = tp[0].abs() <= AXIS_TOL
            && (tp[1] - 1.0).abs() <= AXIS_TOL
            && tp[2].abs() <= AXIS_TOL
            && tp[4].abs() <= AXIS_TOL * taylor_mag(&tp);
        // ϕ(0) > 0, odd derivatives vanish
        let rho_ok = tr[0] > 0.0
            && tr[1].abs() <= AXIS_TOL * tr[0].max(1.0)
            && tr[3].abs() <= AXIS_TOL * taylor_mag(&tr);
        if !phi_ok {
            return Err(ProfileError::Invariant(format!(
                "closed-disc phi conditions fail at 0: taylor {tp:?}"
            )));
        }
        if !rho_ok {
            return Err(ProfileError::Invariant(format!(
                "closed-disc rho conditions fail at 0: taylor {tr:?}"
            )));
        }
        Ok(())
    }

    /// The profile of the metric t⁻²g(t·), i.e. both functions rescaled.
    pub fn rescaled(&self, t: f64) -> Result<Self> {
        DoubleWarpProfile::new(self.phi.rescaled(t)?, self.rho.rescaled(t)?, self.n, self.boundary)
    }

    /// S² fiber scaled by c: (cφ, ϕ).
    pub fn with_phi_scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(ProfileError::Invariant(format!("fiber scale c = {c} must be > 0")));
        }
        // A pure scale keeps φ'(0) = c ≠ 1, so the result is formally an
        // annulus-type pair unless c = 1; curvature evaluation only needs
        // positivity, so keep the boundary kind but skip axis re-checks.
        let phi = self.phi.scaled_shifted(c, 0.0)?;
        Ok(DoubleWarpProfile { phi, rho: self.rho.clone(), n: self.n, boundary: self.boundary })
    }
}

fn taylor_mag(t: &[f64; 5]) -> f64 {
    t.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::{Quartic, SineCap};
    use crate::function::ProfilePiece;

    pub fn part1_cap(n: u32, hi: f64) -> DoubleWarpProfile {
        let phi = ProfileFunction::new(
            vec![ProfilePiece::new(Box::new(SineCap { amplitude: 1.0 }), 0.0, hi).unwrap()],
            true,
        )
        .unwrap();
        let rho = ProfileFunction::new(
            vec![ProfilePiece::new(Box::new(Quartic { offset: 1.0, coeff: 1.0 }), 0.0, hi).unwrap()],
            true,
        )
        .unwrap();
        DoubleWarpProfile::new(phi, rho, n, BoundaryKind::ClosedDisc).unwrap()
    }

    #[test]
    fn cap_satisfies_closed_disc_conditions() {
        part1_cap(2, 0.05);
    }

    #[test]
    fn quartic_phi_fails_closed_disc() {
        let phi = ProfileFunction::new(
            vec![ProfilePiece::new(Box::new(Quartic { offset: 1.0, coeff: 1.0 }), 0.0, 0.1).unwrap()],
            true,
        )
        .unwrap();
        let rho = phi.clone();
        assert!(DoubleWarpProfile::new(phi, rho, 2, BoundaryKind::ClosedDisc).is_err());
    }
}
