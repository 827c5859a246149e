//! Eigenvalue-curve CSV export.

use crate::eigen::CurvePoint;
use collapsar_profiles::json::fmt_f64;

/// Columns: r, lambda0, lambda1, lambda2, min.
pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("r,lambda0,lambda1,lambda2,min\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(p.r),
            fmt_f64(p.lambda0),
            fmt_f64(p.lambda1),
            fmt_f64(p.lambda2),
            fmt_f64(p.min)
        ));
    }
    out
}
