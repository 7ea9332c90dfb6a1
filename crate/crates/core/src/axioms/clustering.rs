use super::spectrum::linear_fit;
use super::{AxiomError, CheckReport, Verdict, POINTWISE_PROXY};
use crate::correlators::{schwinger_closed_form, Configuration};
use crate::lattice::{spectral_density_histogram, Model};
use crate::vertex::VertexSymbol;
use num_complex::Complex64;
use serde_json::json;

/// The default translation grid.
pub const CLUSTER_GRID: [f64; 4] = [16.0, 32.0, 64.0, 128.0];

/// Below this `D(λ)` is treated as exact cancellation.
const FLOOR: f64 = 1e-280;

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterFamily {
    pub insertions: Vec<VertexSymbol>,
    pub points: Vec<Complex64>,
}

fn value(model: &Model, f: &ClusterFamily, shift: Complex64) -> Result<Complex64, AxiomError> {
    let cfg = Configuration::new(f.points.iter().map(|z| z + shift).collect())?;
    Ok(schwinger_closed_form(model, &f.insertions, &cfg)?)
}

/// Fits `log D(λ)` against `log λ` on the last three grid points, where
/// `D(λ) = |S(f + λ·dir, g) − S(f) S(g)|`.
///
/// The expected exponent is `−2Δ` with `Δ = expected_delta` when given and the smallest
/// nonzero `h + h̄` of the spectrum otherwise; passes iff the fit is within `rel_tol` of it.
pub fn check_clustering(
    model: &Model,
    f: &ClusterFamily,
    g: &ClusterFamily,
    grid: &[f64],
    direction: Complex64,
    expected_delta: Option<f64>,
    rel_tol: f64,
) -> Result<CheckReport, AxiomError> {
    if grid.len() < 3 || grid.iter().any(|&l| l <= 0.0) {
        return Err(AxiomError::InvalidInput("the grid needs at least three positive values".into()));
    }
    let dir = direction / direction.norm();
    let delta_min = spectral_density_histogram(model, 2)?.delta_min;
    let delta = expected_delta.unwrap_or(delta_min);
    let product = value(model, f, Complex64::new(0.0, 0.0))? * value(model, g, Complex64::new(0.0, 0.0))?;
    let mut ds = Vec::with_capacity(grid.len());
    for &l in grid {
        let mut ins = f.insertions.clone();
        ins.extend(g.insertions.iter().cloned());
        let mut pts: Vec<Complex64> = f.points.iter().map(|z| z + dir * l).collect();
        pts.extend(g.points.iter().copied());
        let joint = schwinger_closed_form(model, &ins, &Configuration::new(pts)?)?;
        ds.push((joint - product).norm());
    }
    let mut rep = CheckReport::new(
        "clustering",
        json!({ "model": model.name,
                "f": { "insertions": super::symbols_json(&f.insertions), "points": super::points_json(&f.points) },
                "g": { "insertions": super::symbols_json(&g.insertions), "points": super::points_json(&g.points) },
                "grid": grid, "direction": super::complex_json(dir) }),
    );
    let expected = -2.0 * delta;
    rep.note(POINTWISE_PROXY)
        .metric("distances", ds.clone())
        .metric("delta_min", delta_min)
        .metric("delta_expected", delta)
        .metric("expected_exponent", expected)
        .tol("relative_exponent", rel_tol);
    let tail = &ds[ds.len() - 3..];
    if tail.iter().any(|&d| d < FLOOR) {
        rep.metric("degenerate_fit", true);
        rep.note("degenerate fit: D(lambda) below the numerical floor");
        rep.verdict = Verdict::Pass;
        return Ok(rep);
    }
    let pts: Vec<(f64, f64)> = grid[grid.len() - 3..].iter().zip(tail).map(|(l, d)| (l.ln(), d.ln())).collect();
    let (slope, _, rms) = linear_fit(&pts);
    let err = if expected != 0.0 { ((slope - expected) / expected).abs() } else { slope.abs() };
    rep.metric("degenerate_fit", false)
        .metric("fitted_exponent", slope)
        .metric("fit_residual", rms)
        .metric("relative_exponent_error", err);
    rep.verdict = Verdict::from_bool(err <= rel_tol);
    Ok(rep)
}
