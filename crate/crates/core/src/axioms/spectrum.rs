use super::{AxiomError, CheckReport, Verdict};
use crate::fock::{graded_basis, gram_matrix};
use crate::lattice::{spectral_density_histogram, Model};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde_json::json;

/// Largest cutoff accepted by [`check_unitarity`].
pub const UNITARITY_MAX_CUTOFF: f64 = 10.0;

/// Smallest eigenvalue of every Gram block with `h + h̄ ≤ cutoff`; passes iff each block
/// satisfies `λ_min > −tol·‖G‖`.
pub fn check_unitarity(model: &Model, cutoff: f64, tol: f64) -> Result<CheckReport, AxiomError> {
    if cutoff > UNITARITY_MAX_CUTOFF {
        return Err(AxiomError::CutoffTooLarge { cutoff, max: UNITARITY_MAX_CUTOFF });
    }
    let sectors = graded_basis(model, cutoff);
    let results: Vec<(f64, f64)> = sectors
        .par_iter()
        .map(|s| {
            let g: DMatrix<f64> = gram_matrix(model, &s.monomials).map(|z| z.re);
            let ev = g.symmetric_eigen().eigenvalues;
            let norm = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            (ev.min(), norm)
        })
        .collect();
    let mut rep = CheckReport::new("unitarity", json!({ "model": model.name, "cutoff": cutoff }));
    let mut worst = (f64::INFINITY, 0usize);
    let mut ok = true;
    for (i, &(min, norm)) in results.iter().enumerate() {
        if min <= -tol * norm {
            ok = false;
        }
        let rel = if norm > 0.0 { min / norm } else { 0.0 };
        if rel < worst.0 {
            worst = (rel, i);
        }
    }
    let min_eig = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    rep.metric("sectors", sectors.len())
        .metric("basis_size", sectors.iter().map(|s| s.monomials.len()).sum::<usize>())
        .metric("min_eigenvalue", min_eig)
        .metric("min_relative_eigenvalue", worst.0);
    if let Some(s) = sectors.get(worst.1) {
        rep.metric("worst_sector", json!({ "h": s.grading.h, "hbar": s.grading.hbar, "dim": s.monomials.len() }));
    }
    rep.tol("relative_eigenvalue", tol);
    rep.verdict = Verdict::from_bool(ok);
    Ok(rep)
}

/// Least-squares fit of `log count_N` against `log(N + 2)` over the histogram up to `nmax`.
///
/// Passes iff the slope `L` is at most `rank + slack` and the RMS residual is at most
/// `max_residual`. Fewer than three nonempty buckets give a degenerate fit that is reported
/// and not counted as a failure.
pub fn check_spectral_density(model: &Model, nmax: usize, slack: f64, max_residual: f64) -> Result<CheckReport, AxiomError> {
    let hist = spectral_density_histogram(model, nmax)?;
    let mut rep = CheckReport::new("spectral_density", json!({ "model": model.name, "nmax": nmax }));
    rep.metric("counts", hist.counts.clone()).metric("delta_min", hist.delta_min);
    rep.tol("exponent_slack", slack).tol("rms_residual", max_residual);
    let pts: Vec<(f64, f64)> = hist
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(n, &c)| (((n + 2) as f64).ln(), (c as f64).ln()))
        .collect();
    let bound = model.rank() as f64 + slack;
    rep.metric("exponent_bound", bound);
    if pts.len() < 3 {
        rep.metric("degenerate_fit", true);
        rep.note("degenerate fit: fewer than three nonempty buckets");
        rep.verdict = Verdict::Pass;
        return Ok(rep);
    }
    let (slope, intercept, rms) = linear_fit(&pts);
    rep.metric("degenerate_fit", false)
        .metric("exponent", slope)
        .metric("log_constant", intercept)
        .metric("rms_residual", rms);
    rep.verdict = Verdict::from_bool(slope <= bound && rms <= max_residual);
    Ok(rep)
}

/// `(slope, intercept, rms residual)` of the least-squares line through `pts`.
pub(crate) fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let a = DMatrix::from_fn(pts.len(), 2, |i, j| if j == 0 { pts[i].0 } else { 1.0 });
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let sol = a.clone().svd(true, true).solve(&y, 1e-14).expect("svd solve");
    let res = &a * &sol - &y;
    (sol[0], sol[1], (res.norm_squared() / pts.len() as f64).sqrt())
}
