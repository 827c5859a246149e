//! The closed-form families a profile piece can take.
//!
//! Each family implements [`PieceForm`] and is registered by its kind name;
//! deserialization and the CLI select forms at runtime through
//! [`build_form`]. Derivatives, third-derivative bounds and cell envelopes
//! are exact per family, which is what makes the curvature certificates
//! sound.

use crate::error::{ProfileError, Result};

/// Sound per-cell bounds used by certificate Lipschitz budgets.
#[derive(Debug, Clone, Copy)]
pub struct Envelope {
    /// Lower bound of f on the cell.
    pub f_min: f64,
    /// Upper bound of f on the cell.
    pub f_max: f64,
    /// Lower bound of f' on the cell.
    pub d1_lo: f64,
    /// Upper bound of f' on the cell.
    pub d1_hi: f64,
    /// Upper bound of |f''| on the cell.
    pub d2_abs: f64,
}

impl Envelope {
    pub fn f_abs(&self) -> f64 {
        self.f_min.abs().max(self.f_max.abs())
    }

    pub fn d1_abs(&self) -> f64 {
        self.d1_lo.abs().max(self.d1_hi.abs())
    }

    /// Sound upper bound of |1 - f'²| on the cell.
    pub fn one_minus_slope_sq_abs(&self) -> f64 {
        let q_hi = self.d1_lo.abs().max(self.d1_hi.abs()).powi(2);
        let q_lo = if self.d1_lo <= 0.0 && self.d1_hi >= 0.0 {
            0.0
        } else {
            self.d1_lo.abs().min(self.d1_hi.abs()).powi(2)
        };
        (1.0 - q_lo).abs().max((1.0 - q_hi).abs())
    }
}

/// Sound sup-bounds for |d/dr (f''/f)| and |d/dr ((1-f'²)/f²)| on a cell,
/// available in closed form for some families.
#[derive(Debug, Clone, Copy)]
pub struct RatioDerivBounds {
    pub d_second_over_value: f64,
    pub d_one_minus_sq: f64,
}

/// A closed-form scalar function family on an interval of the radial axis.
pub trait PieceForm: std::fmt::Debug + Send + Sync {
    /// Registry name, e.g. `"sine-cap"`.
    fn kind(&self) -> &'static str;

    /// Value (`order = 0`) or derivative (`order = 1 | 2`) at `r`.
    fn eval(&self, r: f64, order: u8) -> f64;

    /// Taylor coefficients `[f, f', f'', f''', f'''']` at `r0`.
    fn taylor(&self, r0: f64) -> [f64; 5];

    /// sup |f'''| over `[lo, hi]` — the Lipschitz constant of f''.
    fn d2_lipschitz(&self, lo: f64, hi: f64) -> f64;

    /// Sound bounds of f, f', |f''| over `[lo, hi]`.
    fn envelope(&self, lo: f64, hi: f64) -> Envelope;

    /// Closed-form derivative bounds for the two self-ratios, when the
    /// family admits them (tighter than generic chain-rule envelopes).
    fn ratio_d_bounds(&self, _lo: f64, _hi: f64) -> Option<RatioDerivBounds> {
        None
    }

    /// Scalar parameters in a fixed serialization order.
    fn params(&self) -> Vec<(&'static str, f64)>;

    /// Nested form, for composite kinds.
    fn inner_form(&self) -> Option<&dyn PieceForm> {
        None
    }

    /// The form of r ↦ f(t·r)/t (metric rescale by t⁻¹), t > 0.
    fn rescaled(&self, t: f64) -> Box<dyn PieceForm>;

    fn boxed_clone(&self) -> Box<dyn PieceForm>;
}

impl Clone for Box<dyn PieceForm> {
    fn clone(&self) -> Self {
        self.boxed_clone()
    }
}

/// Range of sin over a phase interval, by endpoint and critical-point scan.
fn sin_range(x0: f64, x1: f64) -> (f64, f64) {
    let (a, b) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
    let mut lo = a.sin().min(b.sin());
    let mut hi = a.sin().max(b.sin());
    // critical points at pi/2 + k*pi
    let k0 = ((a - std::f64::consts::FRAC_PI_2) / std::f64::consts::PI).ceil() as i64;
    let k1 = ((b - std::f64::consts::FRAC_PI_2) / std::f64::consts::PI).floor() as i64;
    for k in k0..=k1 {
        let v = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

fn cos_range(x0: f64, x1: f64) -> (f64, f64) {
    sin_range(x0 + std::f64::consts::FRAC_PI_2, x1 + std::f64::consts::FRAC_PI_2)
}

fn abs_max(r: (f64, f64)) -> f64 {
    r.0.abs().max(r.1.abs())
}

/// a·sin(r/a): the round cap; carries φ(0)=0, φ'(0)=1 exactly.
#[derive(Debug, Clone)]
pub struct SineCap {
    pub amplitude: f64,
}

impl PieceForm for SineCap {
    fn kind(&self) -> &'static str {
        "sine-cap"
    }

    fn eval(&self, r: f64, order: u8) -> f64 {
        let a = self.amplitude;
        let x = r / a;
        match order {
            0 => a * x.sin(),
            1 => x.cos(),
            _ => -x.sin() / a,
        }
    }

    fn taylor(&self, r0: f64) -> [f64; 5] {
        let a = self.amplitude;
        let x = r0 / a;
        let (s, c) = x.sin_cos();
        [a * s, c, -s / a, -c / (a * a), s / (a * a * a)]
    }

    fn d2_lipschitz(&self, lo: f64, hi: f64) -> f64 {
        let a = self.amplitude;
        abs_max(cos_range(lo / a, hi / a)) / (a * a)
    }

    fn envelope(&self, lo: f64, hi: f64) -> Envelope {
        let a = self.amplitude;
        let (smin, smax) = sin_range(lo / a, hi / a);
        let (cmin, cmax) = cos_range(lo / a, hi / a);
        Envelope {
            f_min: a * smin,
            f_max: a * smax,
            d1_lo: cmin,
            d1_hi: cmax,
            d2_abs: abs_max(sin_range(lo / a, hi / a)) / a,
        }
    }

    fn ratio_d_bounds(&self, _lo: f64, _hi: f64) -> Option<RatioDerivBounds> {
        // f''/f = -1/a^2 and (1 - f'^2)/f^2 = 1/a^2, both exactly constant
        Some(RatioDerivBounds { d_second_over_value: 0.0, d_one_minus_sq: 0.0 })
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("amplitude", self.amplitude)]
    }

    fn rescaled(&self, t: f64) -> Box<dyn PieceForm> {
        Box::new(SineCap { amplitude: self.amplitude / t })
    }

    fn boxed_clone(&self) -> Box<dyn PieceForm> {
        Box::new(self.clone())
    }
}

/// b + c·r⁴: the even cap for the Sⁿ factor.
#[derive(Debug, Clone)]
pub struct Quartic {
    pub offset: f64,
    pub coeff: f64,
}

impl PieceForm for Quartic {
    fn kind(&self) -> &'static str {
        "quartic"
    }

    fn eval(&self, r: f64, order: u8) -> f64 {
        let c = self.coeff;
        match order {
            0 => self.offset + c * r * r * r * r,
            1 => 4.0 * c * r * r * r,
            _ => 12.0 * c * r * r,
        }
    }

    fn taylor(&self, r0: f64) -> [f64; 5] {
        let c = self.coeff;
        [
            self.offset + c * r0.powi(4),
            4.0 * c * r0.powi(3),
            12.0 * c * r0 * r0,
            24.0 * c * r0,
            24.0 * c,
        ]
    }

    fn d2_lipschitz(&self, lo: f64, hi: f64) -> f64 {
        24.0 * self.coeff.abs() * lo.abs().max(hi.abs())
    }

    fn envelope(&self, lo: f64, hi: f64) -> Envelope {
        let v0 = self.eval(lo, 0);
        let v1 = self.eval(hi, 0);
        let mut f_min = v0.min(v1);
        let mut f_max = v0.max(v1);
        if lo < 0.0 && hi > 0.0 {
            f_min = f_min.min(self.offset);
            f_max = f_max.max(self.offset);
        }
        let rm = lo.abs().max(hi.abs());
        let s0 = self.eval(lo, 1);
        let s1 = self.eval(hi, 1);
        let mut d1_lo = s0.min(s1);
        let mut d1_hi = s0.max(s1);
        if lo < 0.0 && hi > 0.0 {
            d1_lo = d1_lo.min(0.0);
            d1_hi = d1_hi.max(0.0);
        }
        Envelope {
            f_min,
            f_max,
            d1_lo,
            d1_hi,
            d2_abs: 12.0 * self.coeff.abs() * rm * rm,
        }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("offset", self.offset), ("coeff", self.coeff)]
    }

    fn rescaled(&self, t: f64) -> Box<dyn PieceForm> {
        Box::new(Quartic { offset: self.offset / t, coeff: self.coeff * t * t * t })
    }

    fn boxed_clone(&self) -> Box<dyn PieceForm> {
        Box::new(self.clone())
    }
}

/// scale·(r + shift)^exponent on r + shift > 0.
#[derive(Debug, Clone)]
pub struct Power {
    pub scale: f64,
    pub shift: f64,
    pub exponent: f64,
}

impl Power {
    fn base(&self, r: f64) -> f64 {
        r + self.shift
    }
}

impl PieceForm for Power {
    fn kind(&self) -> &'static str {
        "power"
    }

    fn eval(&self, r: f64, order: u8) -> f64 {
        let x = self.base(r);
        let a = self.exponent;
        match order {
            0 => self.scale * x.powf(a),
            1 => self.scale * a * x.powf(a - 1.0),
            _ => self.scale * a * (a - 1.0) * x.powf(a - 2.0),
        }
    }

    fn taylor(&self, r0: f64) -> [f64; 5] {
        let x = self.base(r0);
        let a = self.exponent;
        let mut out = [0.0; 5];
        let mut fac = self.scale;
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = fac * x.powf(a - k as f64);
            fac *= a - k as f64;
        }
        out
    }

    fn d2_lipschitz(&self, lo: f64, hi: f64) -> f64 {
        let a = self.exponent;
        let c = (self.scale * a * (a - 1.0) * (a - 2.0)).abs();
        let p = a - 3.0;
        let e0 = self.base(lo).powf(p);
        let e1 = self.base(hi).powf(p);
        c * e0.max(e1)
    }

    fn envelope(&self, lo: f64, hi: f64) -> Envelope {
        // f, f', f'' are each monotone in r on a fixed-sign base.
        let v0 = self.eval(lo, 0);
        let v1 = self.eval(hi, 0);
        let d0 = self.eval(lo, 1);
        let d1 = self.eval(hi, 1);
        let s0 = self.eval(lo, 2).abs();
        let s1 = self.eval(hi, 2).abs();
        Envelope {
            f_min: v0.min(v1),
            f_max: v0.max(v1),
            d1_lo: d0.min(d1),
            d1_hi: d0.max(d1),
            d2_abs: s0.max(s1),
        }
    }

    fn ratio_d_bounds(&self, lo: f64, hi: f64) -> Option<RatioDerivBounds> {
        // with x = r + shift: f''/f = a(a-1)/x^2 and
        // (1-f'^2)/f^2 = x^(-2a)/s^2 - a^2/x^2
        let a = self.exponent;
        let x_lo = self.base(lo).min(self.base(hi));
        if x_lo <= 0.0 {
            return None;
        }
        let d_a = 2.0 * (a * (a - 1.0)).abs() / (x_lo * x_lo * x_lo);
        let f_min = self.eval(lo, 0).abs().min(self.eval(hi, 0).abs());
        if f_min <= 0.0 {
            return None;
        }
        let d_b = 2.0 * a.abs() / (f_min * f_min * x_lo) + 2.0 * a * a / (x_lo * x_lo * x_lo);
        Some(RatioDerivBounds { d_second_over_value: d_a, d_one_minus_sq: d_b })
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("scale", self.scale), ("shift", self.shift), ("exponent", self.exponent)]
    }

    fn rescaled(&self, t: f64) -> Box<dyn PieceForm> {
        Box::new(Power {
            scale: self.scale * t.powf(self.exponent - 1.0),
            shift: self.shift / t,
            exponent: self.exponent,
        })
    }

    fn boxed_clone(&self) -> Box<dyn PieceForm> {
        Box::new(self.clone())
    }
}

/// slope·(r + shift).
#[derive(Debug, Clone)]
pub struct Affine {
    pub slope: f64,
    pub shift: f64,
}

impl PieceForm for Affine {
    fn kind(&self) -> &'static str {
        "affine"
    }

    fn eval(&self, r: f64, order: u8) -> f64 {
        match order {
            0 => self.slope * (r + self.shift),
            1 => self.slope,
            _ => 0.0,
        }
    }

    fn taylor(&self, r0: f64) -> [f64; 5] {
        [self.slope * (r0 + self.shift), self.slope, 0.0, 0.0, 0.0]
    }

    fn d2_lipschitz(&self, _lo: f64, _hi: f64) -> f64 {
        0.0
    }

    fn envelope(&self, lo: f64, hi: f64) -> Envelope {
        let v0 = self.eval(lo, 0);
        let v1 = self.eval(hi, 0);
        Envelope {
            f_min: v0.min(v1),
            f_max: v0.max(v1),
            d1_lo: self.slope,
            d1_hi: self.slope,
            d2_abs: 0.0,
        }
    }

    fn ratio_d_bounds(&self, lo: f64, hi: f64) -> Option<RatioDerivBounds> {
        // f''/f = 0; (1-k^2)/f^2 has derivative -2k(1-k^2)/f^3
        let k = self.slope;
        let f_min = self.eval(lo, 0).abs().min(self.eval(hi, 0).abs());
        if self.eval(lo, 0) * self.eval(hi, 0) <= 0.0 || f_min == 0.0 {
            return None;
        }
        let d_b = 2.0 * (k * (1.0 - k * k)).abs() / (f_min * f_min * f_min);
        Some(RatioDerivBounds { d_second_over_value: 0.0, d_one_minus_sq: d_b })
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("slope", self.slope), ("shift", self.shift)]
    }

    fn rescaled(&self, t: f64) -> Box<dyn PieceForm> {
        Box::new(Affine { slope: self.slope, shift: self.shift / t })
    }

    fn boxed_clone(&self) -> Box<dyn PieceForm> {
        Box::new(self.clone())
    }
}

/// Polynomial in the local variable u = (r - center)/halfwidth, degree ≤ 5.
///
/// Bridges are cubic (`kind = "cubic-hermite"`); smoothing blends are
/// quintic (`kind = "quintic-hermite"`). The local variable keeps the
/// coefficients well-scaled even when the knot sits at r ~ 1e100.
#[derive(Debug, Clone)]
pub struct Hermite {
    pub center: f64,
    pub halfwidth: f64,
    /// c[k] multiplies u^k.
    pub coeffs: Vec<f64>,
}

impl Hermite {
    /// Cubic with given endpoint values/slopes on [lo, hi].
    pub fn cubic(lo: f64, hi: f64, v0: f64, d0: f64, v1: f64, d1: f64) -> Self {
        let center = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        // u in [-1, 1]; slopes in u-units.
        let s0 = d0 * h;
        let s1 = d1 * h;
        // p(u) = c0 + c1 u + c2 u^2 + c3 u^3 with p(∓1), p'(∓1) prescribed
        let c0 = 0.5 * (v0 + v1) + 0.25 * (s0 - s1);
        let c1 = 0.75 * (v1 - v0) - 0.25 * (s0 + s1);
        let c2 = 0.25 * (s1 - s0);
        let c3 = 0.25 * (s0 + s1) - 0.25 * (v1 - v0);
        Hermite { center, halfwidth: h, coeffs: vec![c0, c1, c2, c3] }
    }

    /// Quintic matching value, slope and second derivative at both ends.
    pub fn quintic(lo: f64, hi: f64, left: [f64; 3], right: [f64; 3]) -> Self {
        let center = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let (v0, v1) = (left[0], right[0]);
        let (s0, s1) = (left[1] * h, right[1] * h);
        let (a0, a1) = (left[2] * h * h, right[2] * h * h);
        // Solve the 6x6 Hermite system at u = -1, 1 (closed form).
        let c0 = 0.5 * (v0 + v1) + 0.3125 * (s0 - s1) + 0.0625 * (a0 + a1);
        let c1 = 0.9375 * (v1 - v0) - 0.4375 * (s0 + s1) - 0.0625 * (a0 - a1);
        let c2 = 0.375 * (s1 - s0) - 0.125 * (a0 + a1);
        let c3 = -0.625 * (v1 - v0) + 0.625 * (s0 + s1) + 0.125 * (a0 - a1);
        let c4 = 0.0625 * (a0 + a1) - 0.0625 * (s1 - s0);
        let c5 = 0.1875 * (v1 - v0) - 0.1875 * (s0 + s1) - 0.0625 * (a0 - a1);
        Hermite { center, halfwidth: h, coeffs: vec![c0, c1, c2, c3, c4, c5] }
    }

    fn poly_eval(&self, u: f64, order: u8) -> f64 {
        let n = self.coeffs.len();
        let mut acc = 0.0;
        for k in (order as usize..n).rev() {
            let mut fac = 1.0;
            for j in 0..order as usize {
                fac *= (k - j) as f64;
            }
            acc = acc * u + fac * self.coeffs[k];
        }
        acc
    }
}

impl PieceForm for Hermite {
    fn kind(&self) -> &'static str {
        if self.coeffs.len() <= 4 {
            "cubic-hermite"
        } else {
            "quintic-hermite"
        }
    }

    fn eval(&self, r: f64, order: u8) -> f64 {
        let u = (r - self.center) / self.halfwidth;
        self.poly_eval(u, order) / self.halfwidth.powi(order as i32)
    }

    fn taylor(&self, r0: f64) -> [f64; 5] {
        let u = (r0 - self.center) / self.halfwidth;
        let mut out = [0.0; 5];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.poly_eval(u, k as u8) / self.halfwidth.powi(k as i32);
        }
        out
    }

    fn d2_lipschitz(&self, _lo: f64, _hi: f64) -> f64 {
        // |p'''| <= 6|c3| + 24|c4| + 60|c5| on |u| <= 1.
        let c = &self.coeffs;
        let bound = 6.0 * c.get(3).map_or(0.0, |x| x.abs())
            + 24.0 * c.get(4).map_or(0.0, |x| x.abs())
            + 60.0 * c.get(5).map_or(0.0, |x| x.abs());
        bound / self.halfwidth.powi(3)
    }

    fn envelope(&self, lo: f64, hi: f64) -> Envelope {
        let c = &self.coeffs;
        let d1_abs = (1..c.len()).map(|k| k as f64 * c[k].abs()).sum::<f64>() / self.halfwidth;
        let d2_abs = (2..c.len()).map(|k| (k * (k - 1)) as f64 * c[k].abs()).sum::<f64>()
            / (self.halfwidth * self.halfwidth);
        let v0 = self.eval(lo, 0);
        let v1 = self.eval(hi, 0);
        let dip = 0.5 * (hi - lo) * d1_abs;
        let s0 = self.eval(lo, 1);
        let s1 = self.eval(hi, 1);
        let d_dip = 0.5 * (hi - lo) * d2_abs;
        Envelope {
            f_min: v0.min(v1) - dip,
            f_max: v0.max(v1) + dip,
            d1_lo: s0.min(s1) - d_dip,
            d1_hi: s0.max(s1) + d_dip,
            d2_abs,
        }
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        const NAMES: [&str; 6] = ["c0", "c1", "c2", "c3", "c4", "c5"];
        let mut p = vec![("center", self.center), ("halfwidth", self.halfwidth)];
        for (k, c) in self.coeffs.iter().enumerate() {
            p.push((NAMES[k], *c));
        }
        p
    }

    fn rescaled(&self, t: f64) -> Box<dyn PieceForm> {
        Box::new(Hermite {
            center: self.center / t,
            halfwidth: self.halfwidth / t,
            coeffs: self.coeffs.iter().map(|c| c / t).collect(),
        })
    }

    fn boxed_clone(&self) -> Box<dyn PieceForm> {
        Box::new(self.clone())
    }
}

/// s·f(r + θ): scaled and shifted wrapper around another form.
#[derive(Debug, Clone)]
pub struct ScaledComposite {
    pub scale: f64,
    pub shift: f64,
    pub inner: Box<dyn PieceForm>,
}

impl PieceForm for ScaledComposite {
    fn kind(&self) -> &'static str {
        "scaled-composite"
    }

    fn eval(&self, r: f64, order: u8) -> f64 {
        self.scale * self.inner.eval(r + self.shift, order)
    }

    fn taylor(&self, r0: f64) -> [f64; 5] {
        let mut t = self.inner.taylor(r0 + self.shift);
        for v in &mut t {
            *v *= self.scale;
        }
        t
    }

    fn d2_lipschitz(&self, lo: f64, hi: f64) -> f64 {
        self.scale.abs() * self.inner.d2_lipschitz(lo + self.shift, hi + self.shift)
    }

    fn envelope(&self, lo: f64, hi: f64) -> Envelope {
        let e = self.inner.envelope(lo + self.shift, hi + self.shift);
        let s = self.scale;
        let (f_min, f_max, d1_lo, d1_hi) = if s >= 0.0 {
            (s * e.f_min, s * e.f_max, s * e.d1_lo, s * e.d1_hi)
        } else {
            (s * e.f_max, s * e.f_min, s * e.d1_hi, s * e.d1_lo)
        };
        Envelope { f_min, f_max, d1_lo, d1_hi, d2_abs: s.abs() * e.d2_abs }
    }

    fn ratio_d_bounds(&self, lo: f64, hi: f64) -> Option<RatioDerivBounds> {
        // f = s·g(r+θ): f''/f = g''/g, so that bound passes through.
        // (1-f'^2)/f^2 needs the scale: closed form when the core is a sine,
        // (1-s^2 cos²x)/(s a sin x)² = (1-s²)/(s a sin x)² + 1/a².
        let inner = self.inner.ratio_d_bounds(lo + self.shift, hi + self.shift)?;
        if self.scale == 1.0 {
            return Some(inner);
        }
        if self.inner.kind() == "sine-cap" {
            let a = self.inner.params().iter().find(|(k, _)| *k == "amplitude").map(|(_, v)| *v)?;
            let x_lo = (lo + self.shift) / a;
            let x_hi = (hi + self.shift) / a;
            if !(x_lo > 0.0 && x_hi < std::f64::consts::PI) {
                return None;
            }
            let s2 = self.scale * self.scale;
            let sin_lo = x_lo.sin().min(x_hi.sin());
            let cos_max = abs_max(cos_range(x_lo, x_hi));
            let d_b = (1.0 - s2).abs() * 2.0 * cos_max
                / (s2 * a * a * a * sin_lo * sin_lo * sin_lo);
            return Some(RatioDerivBounds {
                d_second_over_value: inner.d_second_over_value,
                d_one_minus_sq: d_b,
            });
        }
        None
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("scale", self.scale), ("shift", self.shift)]
    }

    fn inner_form(&self) -> Option<&dyn PieceForm> {
        Some(self.inner.as_ref())
    }

    fn rescaled(&self, t: f64) -> Box<dyn PieceForm> {
        // s f(tr + θ)/t = s [f(t(r + θ/t))/t] = s f_resc(r + θ/t)
        Box::new(ScaledComposite {
            scale: self.scale,
            shift: self.shift / t,
            inner: self.inner.rescaled(t),
        })
    }

    fn boxed_clone(&self) -> Box<dyn PieceForm> {
        Box::new(self.clone())
    }
}

/// Names of every registered form, in registry order.
pub const FORM_KINDS: [&str; 7] = [
    "sine-cap",
    "quartic",
    "power",
    "affine",
    "cubic-hermite",
    "quintic-hermite",
    "scaled-composite",
];

/// Build a form from its registry name and named parameters.
///
/// `inner` carries the nested form for `scaled-composite`.
pub fn build_form(
    kind: &str,
    params: &[(String, f64)],
    inner: Option<Box<dyn PieceForm>>,
) -> Result<Box<dyn PieceForm>> {
    let get = |name: &str| -> Result<f64> {
        params
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| ProfileError::Parse(format!("{kind}: missing param {name}")))
    };
    match kind {
        "sine-cap" => Ok(Box::new(SineCap { amplitude: get("amplitude")? })),
        "quartic" => Ok(Box::new(Quartic { offset: get("offset")?, coeff: get("coeff")? })),
        "power" => Ok(Box::new(Power {
            scale: get("scale")?,
            shift: get("shift")?,
            exponent: get("exponent")?,
        })),
        "affine" => Ok(Box::new(Affine { slope: get("slope")?, shift: get("shift")? })),
        "cubic-hermite" | "quintic-hermite" => {
            let n = if kind == "cubic-hermite" { 4 } else { 6 };
            let mut coeffs = Vec::with_capacity(n);
            for k in 0..n {
                coeffs.push(get(&format!("c{k}"))?);
            }
            Ok(Box::new(Hermite {
                center: get("center")?,
                halfwidth: get("halfwidth")?,
                coeffs,
            }))
        }
        "scaled-composite" => {
            let inner = inner
                .ok_or_else(|| ProfileError::Parse("scaled-composite: missing inner".into()))?;
            Ok(Box::new(ScaledComposite { scale: get("scale")?, shift: get("shift")?, inner }))
        }
        other => Err(ProfileError::Parse(format!("unknown piece kind: {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_cap_is_sin_for_unit_amplitude() {
        let f = SineCap { amplitude: 1.0 };
        assert!((f.eval(0.3, 0) - 0.3f64.sin()).abs() < 1e-15);
        assert!((f.eval(0.0, 1) - 1.0).abs() < 1e-15);
        assert_eq!(f.taylor(0.0), [0.0, 1.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn quintic_hermite_matches_endpoint_data() {
        let h = Hermite::quintic(1.0, 3.0, [2.0, -0.5, 0.25], [1.0, 0.75, -2.0]);
        for (r, want) in [(1.0, [2.0, -0.5, 0.25]), (3.0, [1.0, 0.75, -2.0])] {
            for k in 0..3u8 {
                assert!(
                    (h.eval(r, k) - want[k as usize]).abs() < 1e-10,
                    "order {k} at {r}: {} vs {}",
                    h.eval(r, k),
                    want[k as usize]
                );
            }
        }
    }

    #[test]
    fn cubic_hermite_matches_endpoint_data() {
        let h = Hermite::cubic(0.0, 1.0, 1.0, 2.0, -1.0, 0.5);
        assert!((h.eval(0.0, 0) - 1.0).abs() < 1e-12);
        assert!((h.eval(0.0, 1) - 2.0).abs() < 1e-12);
        assert!((h.eval(1.0, 0) + 1.0).abs() < 1e-12);
        assert!((h.eval(1.0, 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rescale_commutes_with_eval() {
        let forms: Vec<Box<dyn PieceForm>> = vec![
            Box::new(SineCap { amplitude: 2.0 }),
            Box::new(Quartic { offset: 1.0, coeff: 3.0 }),
            Box::new(Power { scale: 0.7, shift: 2.0, exponent: 0.3 }),
            Box::new(Affine { slope: 0.9, shift: 1.5 }),
            Box::new(Hermite::cubic(0.5, 1.5, 1.0, 0.1, 1.2, 0.3)),
            Box::new(ScaledComposite {
                scale: 0.5,
                shift: 0.2,
                inner: Box::new(SineCap { amplitude: 1.0 }),
            }),
        ];
        let t = 3.5;
        for f in &forms {
            let g = f.rescaled(t);
            for r in [0.2, 0.4, 0.6] {
                for order in 0..=2u8 {
                    let direct = f.eval(t * r, order) * t.powi(order as i32 - 1);
                    let via = g.eval(r, order);
                    let scale = direct.abs().max(1e-12);
                    assert!(
                        (direct - via).abs() / scale < 1e-12,
                        "{} order {order}: {direct} vs {via}",
                        f.kind()
                    );
                }
            }
        }
    }

    #[test]
    fn envelope_contains_samples() {
        let forms: Vec<Box<dyn PieceForm>> = vec![
            Box::new(SineCap { amplitude: 1.0 }),
            Box::new(Quartic { offset: 1.0, coeff: 1.0 }),
            Box::new(Power { scale: 2.0, shift: 1.0, exponent: 0.5 }),
            Box::new(Hermite::quintic(0.1, 0.9, [1.0, 0.0, -0.3], [0.8, -0.2, 0.1])),
        ];
        for f in &forms {
            let (lo, hi) = (0.1, 0.9);
            let e = f.envelope(lo, hi);
            for k in 0..=32 {
                let r = lo + (hi - lo) * k as f64 / 32.0;
                let v = f.eval(r, 0);
                assert!(v >= e.f_min - 1e-12 && v <= e.f_max + 1e-12, "{}", f.kind());
                assert!(f.eval(r, 1).abs() <= e.d1_abs() + 1e-12);
                assert!(f.eval(r, 2).abs() <= e.d2_abs + 1e-12);
            }
        }
    }
}
