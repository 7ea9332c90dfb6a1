use super::{LatticeError, LatticeVector, Model};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Relative slack used when deciding `(α,α)_p ≤ maxNorm` in floating point.
const NORM_SLACK: f64 = 1e-9;

/// All `α` with `(α,α)_p ≤ maxNorm`, sorted lexicographically.
pub fn enumerate_lattice_points(model: &Model, max_norm: f64) -> Result<Vec<LatticeVector>, LatticeError> {
    if !model.pol.is_positive() {
        return Err(LatticeError::IndefiniteMetric);
    }
    if !(max_norm >= 0.0) {
        return Err(LatticeError::NegativeNorm(max_norm));
    }
    Ok(fincke_pohst(model.pol.metric(), max_norm))
}

/// Enumeration against the positive majorant; agrees with [`enumerate_lattice_points`] when P3 holds.
pub(crate) fn enumerate_majorant(model: &Model, max_norm: f64) -> Vec<LatticeVector> {
    fincke_pohst(model.pol.majorant(), max_norm.max(0.0))
}

/// Integer points of `x^T Q x ≤ bound` for positive-definite `Q`.
fn fincke_pohst(q: &DMatrix<f64>, bound: f64) -> Vec<LatticeVector> {
    let n = q.nrows();
    let limit = bound + NORM_SLACK * (1.0 + bound);
    // Q(x) = Σ_i d_i (x_i + Σ_{j>i} r_ij x_j)^2
    let (d, r) = upper_ldl(q);
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    recurse(n, &d, &r, q, limit, 0.0, &mut x, &mut out);
    out.sort();
    out
}

fn upper_ldl(q: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = q.nrows();
    let mut a = q.clone();
    let mut d = vec![0.0; n];
    let mut r = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        d[i] = a[(i, i)];
        for j in i + 1..n {
            r[(i, j)] = a[(i, j)] / d[i];
        }
        for j in i + 1..n {
            for k in i + 1..n {
                a[(j, k)] -= d[i] * r[(i, j)] * r[(i, k)];
            }
        }
    }
    (d, r)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    level: usize,
    d: &[f64],
    r: &DMatrix<f64>,
    q: &DMatrix<f64>,
    limit: f64,
    used: f64,
    x: &mut Vec<i64>,
    out: &mut Vec<LatticeVector>,
) {
    let n = x.len();
    if level == 0 {
        let v: Vec<f64> = x.iter().map(|&k| k as f64).collect();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += v[i] * q[(i, j)] * v[j];
            }
        }
        if s <= limit {
            out.push(LatticeVector(x.clone()));
        }
        return;
    }
    let i = level - 1;
    let center: f64 = -(i + 1..n).map(|j| r[(i, j)] * x[j] as f64).sum::<f64>();
    let room = ((limit - used).max(0.0) / d[i]).sqrt() + 1e-9;
    let lo = (center - room).ceil() as i64;
    let hi = (center + room).floor() as i64;
    for k in lo..=hi {
        let t = k as f64 - center;
        let u = used + d[i] * t * t;
        if u <= limit {
            x[i] = k;
            recurse(level - 1, d, r, q, limit, u, x, out);
        }
    }
    x[i] = 0;
}

/// Number of distinct grading pairs per unit interval of `h + h̄`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralHistogram {
    pub counts: Vec<u64>,
    /// Smallest nonzero `h + h̄` in the spectrum.
    pub delta_min: f64,
}

/// Quantization step for identifying equal weights.
const WEIGHT_KEY: f64 = 1e9;

fn key(x: f64) -> i64 {
    (x * WEIGHT_KEY).round() as i64
}

/// Bucket `k` counts distinct `(h, h̄)` with `k ≤ h + h̄ < k + 1` for `k = 0..=nmax`.
pub fn spectral_density_histogram(model: &Model, nmax: usize) -> Result<SpectralHistogram, LatticeError> {
    let top = (nmax + 1) as f64;
    let points = enumerate_lattice_points(model, 2.0 * top)?;
    let (nl, nr) = model.pol.dims();
    let mut pairs: BTreeSet<(i64, i64)> = BTreeSet::new();
    let mut delta_min = f64::INFINITY;
    for a in &points {
        let (h, hb) = model.sector_weights(a);
        if h + hb >= top {
            continue;
        }
        let max_n = if nl > 0 { (top - h - hb).ceil() as usize } else { 0 };
        for n in 0..=max_n {
            let max_m = if nr > 0 { (top - h - hb - n as f64).ceil().max(0.0) as usize } else { 0 };
            for m in 0..=max_m {
                let (hh, hhb) = (h + n as f64, hb + m as f64);
                let t = hh + hhb;
                if t < top {
                    pairs.insert((key(hh), key(hhb)));
                    if t > 1e-12 {
                        delta_min = delta_min.min(t);
                    }
                }
            }
        }
    }
    let mut counts = vec![0u64; nmax + 1];
    for (h, hb) in pairs {
        let t = (h + hb) as f64 / WEIGHT_KEY;
        let b = (t + 1e-12).floor() as usize;
        if b <= nmax {
            counts[b] += 1;
        }
    }
    Ok(SpectralHistogram { counts, delta_min })
}
