//! Ricci eigenvalues of double warped products and certified lower bounds.
//!
//! Eigenvalues are pure functions of immutable profiles; certification
//! grids partition across cells (rayon) and merge by minimum, so results
//! are identical regardless of thread count.

mod bound;
mod certify;
mod csv;
mod eigen;
mod error;

#[cfg(any(test, feature = "oracle"))]
pub mod fd_oracle;

pub use bound::{build_bound, BoundFn, ConstantBound, TauOverOnePlusRSq, TauOverRPlusKappa, BOUND_KINDS};
pub use certify::{certify_bound, find_largest_tau, re_verify, CertifyOptions, CurvatureCertificate};
pub use csv::curve_to_csv;
pub use eigen::{
    fiber_rescale_eigenvalues, general_warped_ricci, min_eigenvalue_curve, ricci_eigenvalues,
    ricci_eigenvalues_side, ricci_eigenvalues_two_sided_min, CurvePoint, RicciEigenvalues,
};
pub use error::{CellSlack, CurvatureError, Result};

#[cfg(test)]
mod oracle_tests {
    use super::*;
    use collapsar_profiles::form::{Quartic, ScaledComposite, SineCap};
    use collapsar_profiles::{BoundaryKind, DoubleWarpProfile, ProfileFunction, ProfilePiece};

    fn single(form: Box<dyn collapsar_profiles::PieceForm>, lo: f64, hi: f64) -> ProfileFunction {
        ProfileFunction::new(vec![ProfilePiece::new(form, lo, hi).unwrap()], true).unwrap()
    }

    #[test]
    fn analytic_eigenvalues_match_fd_assembly() {
        let cases: Vec<(DoubleWarpProfile, f64)> = vec![
            (
                DoubleWarpProfile::new(
                    single(Box::new(SineCap { amplitude: 1.0 }), 0.0, 1.4),
                    single(
                        Box::new(ScaledComposite {
                            scale: 1.0,
                            shift: std::f64::consts::FRAC_PI_2,
                            inner: Box::new(SineCap { amplitude: 1.0 }),
                        }),
                        0.0,
                        1.4,
                    ),
                    2,
                    BoundaryKind::ClosedDisc,
                )
                .unwrap(),
                0.6,
            ),
            (
                DoubleWarpProfile::new(
                    single(Box::new(SineCap { amplitude: 1.0 }), 0.0, 0.1),
                    single(Box::new(Quartic { offset: 1.0, coeff: 1.0 }), 0.0, 0.1),
                    3,
                    BoundaryKind::ClosedDisc,
                )
                .unwrap(),
                0.05,
            ),
        ];
        for (p, r) in cases {
            let analytic = ricci_eigenvalues(&p, r).unwrap();
            let fd = fd_oracle::fd_ricci_eigenvalues(&p, r, 1e-4);
            for (a, b) in [analytic.lambda0, analytic.lambda1, analytic.lambda2]
                .iter()
                .zip(fd.iter())
            {
                let scale = a.abs().max(1.0);
                assert!((a - b).abs() / scale < 1e-4, "analytic {a} vs fd {b}");
            }
        }
    }
}
