//! Model bundle emission: profile.json, constants.json, certificate.json,
//! curve.csv, profile.svg, eigencurve.svg in one directory.

use crate::error::Result;
use crate::local::LocalModel;
use crate::svg::{line_plot, symlog, Series};
use collapsar_curvature::{curve_to_csv, min_eigenvalue_curve, CurvePoint};
use collapsar_profiles::json::dwp_to_json;
use collapsar_profiles::DoubleWarpProfile;
use std::io::Write;
use std::path::Path;

fn write_file(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    let mut f = std::fs::File::create(dir.join(name))?;
    f.write_all(contents.as_bytes())
}

/// Curve samples for plots and CSV: log-spaced through the domain.
fn sampled_curve(p: &DoubleWarpProfile, hi: f64) -> Result<Vec<CurvePoint>> {
    Ok(min_eigenvalue_curve(p, (p.domain().0, hi), hi / 2048.0)?)
}

pub fn write_bundle(model: &LocalModel, dir: &Path) -> Result<std::io::Result<()>> {
    let io = (|| -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        Ok(())
    })();
    if let Err(e) = io {
        return Ok(Err(e));
    }
    let profile_json = dwp_to_json(&model.profile);
    let constants_json = model.constants.to_json();
    let certificate_json = model.certificate.to_json();
    let curve = sampled_curve(&model.profile, model.neck_interval.1)?;
    let csv = curve_to_csv(&curve);

    let phi_pts: Vec<(f64, f64)> = curve
        .iter()
        .map(|c| (symlog(c.r), symlog(model.profile.phi.eval(c.r, 0).unwrap_or(f64::NAN))))
        .collect();
    let rho_pts: Vec<(f64, f64)> = curve
        .iter()
        .map(|c| (symlog(c.r), symlog(model.profile.rho.eval(c.r, 0).unwrap_or(f64::NAN))))
        .collect();
    let profile_svg = line_plot(
        "warping profiles (symlog axes)",
        &[
            Series { label: "phi (S2 factor)", color: "#c02020", points: phi_pts },
            Series { label: "rho (Sn factor)", color: "#2040c0", points: rho_pts },
        ],
    );
    let eigen_svg = line_plot(
        "Ricci eigenvalues (symlog axes)",
        &[
            Series {
                label: "lambda0",
                color: "#c02020",
                points: curve.iter().map(|c| (symlog(c.r), symlog(c.lambda0))).collect(),
            },
            Series {
                label: "lambda1",
                color: "#20a020",
                points: curve.iter().map(|c| (symlog(c.r), symlog(c.lambda1))).collect(),
            },
            Series {
                label: "lambda2",
                color: "#2040c0",
                points: curve.iter().map(|c| (symlog(c.r), symlog(c.lambda2))).collect(),
            },
        ],
    );

    let io = (|| -> std::io::Result<()> {
        write_file(dir, "profile.json", &profile_json)?;
        write_file(dir, "constants.json", &constants_json)?;
        write_file(dir, "certificate.json", &certificate_json)?;
        write_file(dir, "curve.csv", &csv)?;
        write_file(dir, "profile.svg", &profile_svg)?;
        write_file(dir, "eigencurve.svg", &eigen_svg)?;
        Ok(())
    })();
    Ok(io)
}
