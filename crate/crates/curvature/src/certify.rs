//! Grid certification of Ricci lower bounds.
//!
//! A certificate asserts min(λ₀, λ₁, λ₂) ≥ bound(r) pointwise on an
//! interval. Evidence: on every grid cell, each eigenvalue's minimum at
//! the cell endpoints minus the cell width times that eigenvalue's
//! Lipschitz budget stays above the bound's maximum on the cell. Budgets
//! come from per-piece envelopes of φ, ϕ and their derivatives, so the
//! check is sound, not statistical. The bound families are all of the
//! form coefficient·shape(r), which makes every cell slack affine in the
//! coefficient; the τ search exploits that.

use crate::bound::BoundFn;
use crate::eigen::ricci_eigenvalues_side;
use crate::error::{CellSlack, CurvatureError, Result};
use collapsar_profiles::json::{fmt_f64, JsonWriter};
use collapsar_profiles::{DoubleWarpProfile, ProfilePiece, Side};
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Grid cells to start with across the whole interval.
    pub base_cells: usize,
    /// Hard cap on total cells during refinement.
    pub max_cells: usize,
    /// Stop refining when the margin moves by less than this fraction.
    pub margin_rel_tol: f64,
    /// Maximum number of halvings.
    pub max_refines: u32,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            base_cells: 4096,
            max_cells: 1 << 20,
            margin_rel_tol: 0.05,
            max_refines: 8,
        }
    }
}

/// Machine-checkable record of a certified lower bound.
#[derive(Debug, Clone)]
pub struct CurvatureCertificate {
    pub profile_id: String,
    pub interval: (f64, f64),
    pub bound: Box<dyn BoundFn>,
    /// Largest cell width in the final grid.
    pub step: f64,
    pub cells: usize,
    pub margin: f64,
    /// The worst cells by slack, ascending.
    pub worst_cells: Vec<CellSlack>,
}

impl CurvatureCertificate {
    pub fn to_json(&self) -> String {
        let mut w = JsonWriter::new();
        w.raw("{\"profile_id\":");
        w.string(&self.profile_id);
        w.raw(",\"interval\":[");
        w.num(self.interval.0);
        w.raw(",");
        w.num(self.interval.1);
        w.raw("],\"bound\":{\"kind\":");
        w.string(self.bound.kind());
        w.raw(",\"params\":{");
        for (i, (name, value)) in self.bound.params().iter().enumerate() {
            if i > 0 {
                w.raw(",");
            }
            w.string(name);
            w.raw(":");
            w.num(*value);
        }
        w.raw("}},\"step\":");
        w.num(self.step);
        w.raw(",\"margin\":");
        w.num(self.margin);
        w.raw(",\"worst_cells\":[");
        for (i, c) in self.worst_cells.iter().enumerate() {
            if i > 0 {
                w.raw(",");
            }
            w.raw(&format!(
                "{{\"r_lo\":{},\"r_hi\":{},\"slack\":{}}}",
                fmt_f64(c.r_lo),
                fmt_f64(c.r_hi),
                fmt_f64(c.slack)
            ));
        }
        w.raw("]}");
        w.finish()
    }
}

/// Build grid nodes over [a, b]: piece boundaries of both profiles split
/// the interval into spans; spans get cells proportional to their
/// log-extent, subdivided geometrically where they are wide, and the span
/// touching the axis gets one axis cell plus geometric growth.
fn plan_nodes(p: &DoubleWarpProfile, a: f64, b: f64, total_cells: usize) -> Vec<f64> {
    let mut cuts: Vec<f64> = vec![a, b];
    for knot in p.phi.knots().into_iter().chain(p.rho.knots()) {
        if knot > a && knot < b {
            cuts.push(knot);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();

    let weight = |lo: f64, hi: f64| -> f64 {
        let anchor = lo.abs().max((hi - lo) / 1024.0).max(1e-12);
        (1.0 + (hi - lo) / anchor).ln().max(0.05)
    };
    let spans: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    let total_w: f64 = spans.iter().map(|&(lo, hi)| weight(lo, hi)).sum();

    let mut nodes: Vec<f64> = Vec::with_capacity(total_cells + spans.len() + 1);
    for &(lo, hi) in &spans {
        let cells = ((total_cells as f64) * weight(lo, hi) / total_w).ceil() as usize;
        let cells = cells.clamp(8, total_cells);
        nodes.push(lo);
        if lo == 0.0 {
            let h0 = hi * 1e-6;
            nodes.push(h0);
            for k in 1..cells {
                let t = k as f64 / cells as f64;
                nodes.push(h0 * (hi / h0).powf(t));
            }
        } else {
            let geometric = hi / lo > 4.0;
            for k in 1..cells {
                let t = k as f64 / cells as f64;
                let r = if geometric { lo * (hi / lo).powf(t) } else { lo + (hi - lo) * t };
                nodes.push(r);
            }
        }
    }
    nodes.push(b);
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    nodes.dedup();
    nodes
}

fn cell_pieces<'a>(
    p: &'a DoubleWarpProfile,
    lo: f64,
    hi: f64,
) -> Result<(&'a ProfilePiece, &'a ProfilePiece)> {
    let mid = midpoint(lo, hi);
    Ok((p.phi.piece_at(mid, Side::Right)?, p.rho.piece_at(mid, Side::Right)?))
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = 0.5 * (lo + hi);
    if m > lo && m < hi {
        m
    } else {
        lo
    }
}

/// |d/dr| bound for f''/f from an envelope.
fn d_second_over_value(e: &collapsar_profiles::Envelope, l3: f64) -> Option<f64> {
    if e.f_min <= 0.0 {
        return None;
    }
    Some(l3 / e.f_min + e.d2_abs * e.d1_abs() / (e.f_min * e.f_min))
}

/// |d/dr| bound for (1 - f'²)/f².
fn d_one_minus_sq(e: &collapsar_profiles::Envelope) -> Option<f64> {
    if e.f_min <= 0.0 {
        return None;
    }
    let fm = e.f_min;
    let d1 = e.d1_abs();
    Some(2.0 * d1 * e.d2_abs / (fm * fm)
        + 2.0 * d1 * e.one_minus_slope_sq_abs() / (fm * fm * fm))
}

/// |d/dr| bound for f'g'/(fg): minimum of the quotient-rule form and the
/// log-slope form.
fn d_cross(ef: &collapsar_profiles::Envelope, eg: &collapsar_profiles::Envelope) -> Option<f64> {
    if ef.f_min <= 0.0 || eg.f_min <= 0.0 {
        return None;
    }
    let fg = ef.f_min * eg.f_min;
    let d1f = ef.d1_abs();
    let d1g = eg.d1_abs();
    let quot = (ef.d2_abs * d1g + d1f * eg.d2_abs) / fg;
    let chain = d1f
        * d1g
        * (d1f / (ef.f_min * ef.f_min * eg.f_min) + d1g / (ef.f_min * eg.f_min * eg.f_min));
    let v1 = quot + chain;
    let lg_f = d1f / ef.f_min;
    let lg_g = d1g / eg.f_min;
    let a_f = ef.d2_abs / ef.f_min;
    let a_g = eg.d2_abs / eg.f_min;
    let v2 = (a_f + lg_f * lg_f) * lg_g + lg_f * (a_g + lg_g * lg_g);
    Some(v1.min(v2))
}

/// Cross-term derivative bound on a cell inside the sine cap when φ's
/// envelope touches zero (the cell abuts the axis): X = w(x)·u(r) with
/// w = x·cot x (|w| ≤ 1, |w'| ≤ 0.9x for x ≤ 1.4) and u = ϕ'/(rϕ), using
/// ϕ'(0) = 0 so |ϕ'/r| ≤ sup|ϕ''| and |ϕ'' - ϕ'/r| ≤ r·Lip(ϕ'').
fn axis_cross_bound(phi_p: &ProfilePiece, rho_p: &ProfilePiece, _lo: f64, hi: f64) -> Option<f64> {
    if phi_p.form.kind() != "sine-cap" || phi_p.lo != 0.0 || rho_p.lo != 0.0 {
        return None;
    }
    let amp = phi_p.form.params().iter().find(|(k, _)| *k == "amplitude").map(|(_, v)| *v)?;
    let x_hi = hi / amp;
    if !(x_hi <= 1.4) {
        return None;
    }
    let t = rho_p.form.taylor(0.0);
    if t[1].abs() > 1e-9 * t[0].abs().max(1.0) {
        return None;
    }
    let e = rho_p.envelope(0.0, hi);
    if e.f_min <= 0.0 {
        return None;
    }
    let l3 = rho_p.form.d2_lipschitz(0.0, hi);
    let fm = e.f_min;
    Some(0.9 * x_hi / amp * e.d2_abs / fm + l3 / fm + e.d2_abs * e.d2_abs * hi / (fm * fm))
}

/// Per-eigenvalue Lipschitz budgets (L₀, L₁, L₂) on the cell.
fn cell_budget(p: &DoubleWarpProfile, lo: f64, hi: f64) -> Result<(f64, f64, f64)> {
    let (phi_p, rho_p) = cell_pieces(p, lo, hi)?;
    let ef = phi_p.envelope(lo, hi);
    let eg = rho_p.envelope(lo, hi);
    let n = p.n as f64;
    let pair = |piece: &ProfilePiece,
                e: &collapsar_profiles::Envelope|
     -> (Option<f64>, Option<f64>) {
        let l3 = piece.form.d2_lipschitz(lo, hi);
        let generic_a = d_second_over_value(e, l3);
        let generic_b = d_one_minus_sq(e);
        match piece.form.ratio_d_bounds(lo, hi) {
            Some(rb) => (
                Some(generic_a.map_or(rb.d_second_over_value, |g| g.min(rb.d_second_over_value))),
                Some(generic_b.map_or(rb.d_one_minus_sq, |g| g.min(rb.d_one_minus_sq))),
            ),
            None => (generic_a, generic_b),
        }
    };
    let (af_o, bf_o) = pair(phi_p, &ef);
    let (ag_o, bg_o) = pair(rho_p, &eg);
    let x_o = d_cross(&ef, &eg).or_else(|| axis_cross_bound(phi_p, rho_p, lo, hi));
    // for the axis cell, φ's exact sine ratios stand in for the generic ones
    let axis_phi = phi_p.form.kind() == "sine-cap" && phi_p.lo == 0.0 && lo == 0.0;
    let af = af_o.or(if axis_phi { Some(0.0) } else { None });
    let bf = bf_o.or(if axis_phi { Some(0.0) } else { None });
    match (af, bf, ag_o, bg_o, x_o) {
        (Some(af), Some(bf), Some(ag), Some(bg), Some(x)) => {
            let l0 = 2.0 * af + n * ag;
            let l1 = af + bf + n * x;
            let l2 = ag + (n - 1.0) * bg + 2.0 * x;
            if l0.is_finite() && l1.is_finite() && l2.is_finite() {
                Ok((l0, l1, l2))
            } else {
                Err(CurvatureError::BudgetUnavailable {
                    r_lo: lo,
                    r_hi: hi,
                    detail: "non-finite budget".into(),
                })
            }
        }
        _ => Err(CurvatureError::BudgetUnavailable {
            r_lo: lo,
            r_hi: hi,
            detail: "profile not positive on cell and no axis form applies".into(),
        }),
    }
}

/// Per-cell certified evidence: `floor - coefficient·shape` is the slack
/// for a bound with the given shape maximum.
struct CellEvidence {
    r_lo: f64,
    r_hi: f64,
    /// min over eigenvalues of (endpoint minimum - width·budget).
    floor: f64,
    /// max of the unit-coefficient bound shape on the cell.
    shape: f64,
}

fn grid_pass(
    p: &DoubleWarpProfile,
    nodes: &[f64],
    shape: &dyn BoundFn,
) -> Result<(Vec<CellEvidence>, f64)> {
    let knots: Vec<f64> = {
        let mut k: Vec<f64> = p.phi.knots().into_iter().chain(p.rho.knots()).collect();
        k.sort_by(|x, y| x.partial_cmp(y).unwrap());
        k.dedup();
        k
    };
    let is_knot = |r: f64| knots.binary_search_by(|k| k.partial_cmp(&r).unwrap()).is_ok();

    let evals: Vec<Result<([f64; 3], [f64; 3])>> = nodes
        .par_iter()
        .map(|&r| {
            let right = ricci_eigenvalues_side(p, r, Side::Right)?;
            let right = [right.lambda0, right.lambda1, right.lambda2];
            let left = if is_knot(r) {
                let l = ricci_eigenvalues_side(p, r, Side::Left)?;
                [l.lambda0, l.lambda1, l.lambda2]
            } else {
                right
            };
            Ok((right, left))
        })
        .collect();
    let mut vals = Vec::with_capacity(nodes.len());
    for v in evals {
        vals.push(v?);
    }

    let budgets: Vec<Result<(f64, f64, f64)>> = nodes
        .par_windows(2)
        .map(|w| cell_budget(p, w[0], w[1]))
        .collect();

    let mut cells = Vec::with_capacity(nodes.len() - 1);
    let mut max_w: f64 = 0.0;
    for (i, w) in nodes.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let width = hi - lo;
        max_w = max_w.max(width);
        let (l0, l1, l2) = match &budgets[i] {
            Ok(b) => *b,
            Err(_) => return Err(cell_budget(p, lo, hi).unwrap_err()),
        };
        // eigenvalues read from inside the cell: right limit at lo, left at hi
        let at_lo = vals[i].0;
        let at_hi = vals[i + 1].1;
        let floor = (at_lo[0].min(at_hi[0]) - width * l0)
            .min(at_lo[1].min(at_hi[1]) - width * l1)
            .min(at_lo[2].min(at_hi[2]) - width * l2);
        cells.push(CellEvidence { r_lo: lo, r_hi: hi, floor, shape: shape.max_on_cell(lo, hi) });
    }
    Ok((cells, max_w))
}

fn margin_for(cells: &[CellEvidence], coeff: f64) -> f64 {
    cells
        .iter()
        .map(|c| c.floor - coeff * c.shape)
        .fold(f64::INFINITY, f64::min)
}

fn build_certificate(
    profile_id: &str,
    interval: (f64, f64),
    bound: &dyn BoundFn,
    cells: &[CellEvidence],
    step: f64,
) -> Result<CurvatureCertificate> {
    let coeff = bound.coefficient();
    let mut slacks: Vec<CellSlack> = cells
        .iter()
        .map(|c| CellSlack { r_lo: c.r_lo, r_hi: c.r_hi, slack: c.floor - coeff * c.shape })
        .collect();
    slacks.sort_by(|x, y| x.slack.partial_cmp(&y.slack).unwrap());
    let margin = slacks.first().map_or(f64::INFINITY, |c| c.slack);
    let worst: Vec<CellSlack> = slacks.iter().take(8).copied().collect();
    if margin <= 0.0 {
        return Err(CurvatureError::CertificateFailed { worst: worst[0] });
    }
    Ok(CurvatureCertificate {
        profile_id: profile_id.to_string(),
        interval,
        bound: bound.boxed_clone(),
        step,
        cells: cells.len(),
        margin,
        worst_cells: worst,
    })
}

fn check_interval(p: &DoubleWarpProfile, interval: (f64, f64)) -> Result<()> {
    let (a, b) = interval;
    let (dlo, dhi) = p.domain();
    if !(dlo <= a && a < b && b <= dhi) {
        return Err(CurvatureError::Domain(format!(
            "interval [{a}, {b}] outside profile domain [{dlo}, {dhi}]"
        )));
    }
    Ok(())
}

/// Certify min-eigenvalue ≥ bound pointwise on the interval.
///
/// On failure the error names the worst cell and its slack.
pub fn certify_bound(
    p: &DoubleWarpProfile,
    profile_id: &str,
    interval: (f64, f64),
    bound: &dyn BoundFn,
    opts: &CertifyOptions,
) -> Result<CurvatureCertificate> {
    check_interval(p, interval)?;
    let (a, b) = interval;
    let shape = bound.with_coefficient(1.0);
    let coeff = bound.coefficient();
    let mut cells_n = opts.base_cells;
    let mut prev_margin: Option<f64> = None;
    let mut best: Option<(Vec<CellEvidence>, f64)>;
    let mut refines = 0;
    loop {
        let nodes = plan_nodes(p, a, b, cells_n);
        let (cells, max_w) = grid_pass(p, &nodes, shape.as_ref())?;
        let margin = margin_for(&cells, coeff);
        let stabilized = prev_margin
            .is_some_and(|pm| (margin - pm).abs() <= opts.margin_rel_tol * margin.abs());
        best = Some((cells, max_w));
        if margin > 0.0 && stabilized {
            break;
        }
        if refines >= opts.max_refines || cells_n * 2 > opts.max_cells {
            break;
        }
        prev_margin = Some(margin);
        cells_n *= 2;
        refines += 1;
    }
    let (cells, step) = best.expect("at least one pass ran");
    build_certificate(profile_id, interval, bound, &cells, step)
}

/// Re-evaluate the certified inequality at `factor`-times finer resolution
/// (pure evaluation, no Lipschitz slack). Returns the minimum of
/// min-eigenvalue minus bound seen.
pub fn re_verify(p: &DoubleWarpProfile, cert: &CurvatureCertificate, factor: usize) -> Result<f64> {
    let (a, b) = cert.interval;
    let nodes = plan_nodes(p, a, b, cert.cells * factor);
    let vals: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|&r| {
            let v = crate::eigen::ricci_eigenvalues_two_sided_min(p, r)?;
            Ok(v.min() - cert.bound.eval(r))
        })
        .collect();
    let mut worst = f64::INFINITY;
    for v in vals {
        worst = worst.min(v?);
    }
    Ok(worst)
}

/// Largest τ in [1e-8, 10] whose bound certifies, by bisection (60 rounds
/// against the grid evidence, whose cell slacks are affine in τ), refining
/// the grid until the found τ stabilizes.
pub fn find_largest_tau(
    p: &DoubleWarpProfile,
    profile_id: &str,
    interval: (f64, f64),
    template: &dyn BoundFn,
    opts: &CertifyOptions,
) -> Result<CurvatureCertificate> {
    check_interval(p, interval)?;
    let (a, b) = interval;
    let shape = template.with_coefficient(1.0);
    let mut cells_n = opts.base_cells;
    let mut prev_tau: Option<f64> = None;
    let mut best: Option<(f64, Vec<CellEvidence>, f64)>;
    let mut refines = 0;
    loop {
        let nodes = plan_nodes(p, a, b, cells_n);
        let (cells, max_w) = grid_pass(p, &nodes, shape.as_ref())?;
        let ok = |tau: f64| margin_for(&cells, tau) > 0.0;
        let tau = if !ok(1e-8) {
            0.0
        } else if ok(10.0) {
            10.0
        } else {
            let (mut lo, mut hi) = (1e-8, 10.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let stabilized = prev_tau.is_some_and(|pt| (tau - pt).abs() <= 0.02 * tau.abs());
        best = Some((tau, cells, max_w));
        if tau > 0.0 && stabilized {
            break;
        }
        if refines >= opts.max_refines || cells_n * 2 > opts.max_cells {
            break;
        }
        prev_tau = Some(tau);
        cells_n *= 2;
        refines += 1;
    }
    let (tau, cells, step) = best.expect("at least one pass ran");
    let bound = template.with_coefficient(if tau > 0.0 { tau } else { 1e-8 });
    build_certificate(profile_id, interval, bound.as_ref(), &cells, step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::{ConstantBound, TauOverOnePlusRSq};
    use collapsar_profiles::form::{Affine, Quartic, ScaledComposite, SineCap};
    use collapsar_profiles::{BoundaryKind, DoubleWarpProfile, ProfileFunction, ProfilePiece};

    fn single(form: Box<dyn collapsar_profiles::PieceForm>, lo: f64, hi: f64) -> ProfileFunction {
        ProfileFunction::new(vec![ProfilePiece::new(form, lo, hi).unwrap()], true).unwrap()
    }

    fn round_sphere(n: u32) -> DoubleWarpProfile {
        let hi = 1.4;
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

    #[test]
    fn round_sphere_certifies_three_point_nine() {
        let p = round_sphere(2);
        let opts = CertifyOptions { base_cells: 512, ..Default::default() };
        let cert =
            certify_bound(&p, "round-sphere", (0.0, 1.4), &ConstantBound { lambda: 3.9 }, &opts)
                .unwrap();
        assert!(cert.margin > 0.05 && cert.margin < 0.11, "margin {}", cert.margin);
        assert!(re_verify(&p, &cert, 10).unwrap() >= 0.0);
    }

    #[test]
    fn flat_product_fails_positive_bound() {
        let phi = single(Box::new(Affine { slope: 1.0, shift: 1.0 }), 0.5, 2.0);
        let rho = single(Box::new(Quartic { offset: 1.0, coeff: 0.0 }), 0.5, 2.0);
        let p = DoubleWarpProfile::new(phi, rho, 3, BoundaryKind::OpenAnnulus).unwrap();
        let opts = CertifyOptions { base_cells: 256, ..Default::default() };
        let (a, b) = p.domain();
        let err = certify_bound(&p, "flat", (a, b), &ConstantBound { lambda: 0.1 }, &opts);
        match err {
            Err(CurvatureError::CertificateFailed { worst }) => {
                assert!((worst.slack + 0.1).abs() < 0.05, "slack {}", worst.slack);
            }
            other => panic!("expected certificate failure, got {other:?}"),
        }
    }

    #[test]
    fn tau_bisection_finds_positive_tau() {
        let p = round_sphere(3);
        let opts = CertifyOptions { base_cells: 256, ..Default::default() };
        let cert =
            find_largest_tau(&p, "round", (0.0, 1.4), &TauOverOnePlusRSq { tau: 1.0 }, &opts)
                .unwrap();
        assert!(cert.bound.coefficient() > 4.0, "tau {}", cert.bound.coefficient());
        assert!(re_verify(&p, &cert, 10).unwrap() >= 0.0);
    }

    #[test]
    fn certificate_json_has_spec_fields() {
        let p = round_sphere(2);
        let opts = CertifyOptions { base_cells: 128, ..Default::default() };
        let cert =
            certify_bound(&p, "rs", (0.0, 1.0), &ConstantBound { lambda: 1.0 }, &opts).unwrap();
        let js = cert.to_json();
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        for field in ["profile_id", "interval", "bound", "step", "margin", "worst_cells"] {
            assert!(v.get(field).is_some(), "missing {field}");
        }
        assert_eq!(v["bound"]["kind"], "constant");
    }
}
