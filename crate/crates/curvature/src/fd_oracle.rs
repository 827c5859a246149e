//! Brute-force Ricci curvature from metric components in coordinates.
//!
//! Independent oracle for the closed-form eigenvalue path: builds the
//! diagonal metric of dr² + φ²g_{S²} + ϕ²g_{Sⁿ} in polar-product
//! coordinates, assembles Christoffel symbols and the Ricci tensor by
//! second-order central differences (a 5-point stencil per coordinate
//! pair), and reads off the three eigenvalues. Test support only — it must
//! not share code with the analytic path it checks.

use collapsar_profiles::DoubleWarpProfile;

/// Diagonal metric components at a coordinate point.
///
/// Coordinates: x[0] = r; x[1..3] = (θ, ψ) on S²; x[3..3+n] hyperspherical
/// angles on Sⁿ.
fn metric_diag(p: &DoubleWarpProfile, x: &[f64]) -> Vec<f64> {
    let n = p.n as usize;
    let r = x[0];
    let phi = p.phi.eval(r, 0).expect("r in domain");
    let rho = p.rho.eval(r, 0).expect("r in domain");
    let mut g = vec![0.0; 3 + n];
    g[0] = 1.0;
    g[1] = phi * phi;
    g[2] = phi * phi * x[1].sin().powi(2);
    let mut fiber = rho * rho;
    for k in 0..n {
        g[3 + k] = fiber;
        fiber *= x[3 + k].sin().powi(2);
    }
    g
}

fn metric_at(p: &DoubleWarpProfile, x: &[f64], i: usize, j: usize) -> f64 {
    if i == j {
        metric_diag(p, x)[i]
    } else {
        0.0
    }
}

/// Fourth-order five-point derivative of a scalar function of one shifted
/// coordinate: (-f(+2h) + 8f(+h) - 8f(-h) + f(-2h)) / 12h.
fn stencil5<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
}

/// Derivative of g_ij along coordinate k (5-point stencil).
fn dg(p: &DoubleWarpProfile, x: &[f64], i: usize, j: usize, k: usize, h: f64) -> f64 {
    stencil5(
        |dx| {
            let mut xs = x.to_vec();
            xs[k] += dx;
            metric_at(p, &xs, i, j)
        },
        h,
    )
}

/// Christoffel symbols of the second kind at x.
fn christoffel(p: &DoubleWarpProfile, x: &[f64], h: f64) -> Vec<Vec<Vec<f64>>> {
    let d = 3 + p.n as usize;
    let g = metric_diag(p, x);
    let mut gamma = vec![vec![vec![0.0; d]; d]; d];
    for l in 0..d {
        let ginv = 1.0 / g[l];
        for i in 0..d {
            for j in i..d {
                let v = 0.5
                    * ginv
                    * (dg(p, x, j, l, i, h) + dg(p, x, i, l, j, h) - dg(p, x, i, j, l, h));
                gamma[l][i][j] = v;
                gamma[l][j][i] = v;
            }
        }
    }
    gamma
}

/// Ricci tensor component Ric_ij by differencing Christoffel symbols.
fn ricci_component(p: &DoubleWarpProfile, x: &[f64], i: usize, j: usize, h: f64) -> f64 {
    let d = 3 + p.n as usize;
    let gamma = christoffel(p, x, h);
    // all Christoffel tables needed by the 5-point derivative, one per shift
    let gamma_at = |k: usize, dx: f64| -> Vec<Vec<Vec<f64>>> {
        let mut xs = x.to_vec();
        xs[k] += dx;
        christoffel(p, &xs, h)
    };
    let mut ric = 0.0;
    for k in 0..d {
        let tp2 = gamma_at(k, 2.0 * h);
        let tp1 = gamma_at(k, h);
        let tm1 = gamma_at(k, -h);
        let tm2 = gamma_at(k, -2.0 * h);
        let d_of = |l: usize, a: usize, b: usize| -> f64 {
            (-tp2[l][a][b] + 8.0 * tp1[l][a][b] - 8.0 * tm1[l][a][b] + tm2[l][a][b]) / (12.0 * h)
        };
        // ∂_k Γ^k_ij (this k) and the ∂_i Γ^k_kj terms that differentiate
        // along coordinate i = this k
        ric += d_of(k, i, j);
        if k == i {
            for l in 0..d {
                ric -= d_of(l, l, j);
            }
        }
    }
    for k in 0..d {
        for l in 0..d {
            ric += gamma[k][k][l] * gamma[l][i][j] - gamma[k][i][l] * gamma[l][k][j];
        }
    }
    ric
}

/// The three Ricci eigenvalues by finite differences: radial, S²-, and
/// Sⁿ-direction, evaluated at a generic angular point.
///
/// Near a closed-disc axis the Christoffel symbols behave like cot(r);
/// balancing the 4th-order truncation (h⁴/r⁶) against round-off noise
/// (ε/(r²h²)) puts the step near (ε·r⁴)^(1/6).
pub fn fd_ricci_eigenvalues(p: &DoubleWarpProfile, r: f64, h: f64) -> [f64; 3] {
    let h = h.min((1e-16 * r.powi(4)).powf(1.0 / 6.0)).max(1e-6);
    let n = p.n as usize;
    let mut x = vec![0.0; 3 + n];
    x[0] = r;
    x[1] = 1.1;
    x[2] = 0.7;
    for k in 0..n {
        x[3 + k] = 1.0 + 0.13 * k as f64;
    }
    let g = metric_diag(p, &x);
    [
        ricci_component(p, &x, 0, 0, h) / g[0],
        ricci_component(p, &x, 1, 1, h) / g[1],
        ricci_component(p, &x, 3, 3, h) / g[3],
    ]
}
