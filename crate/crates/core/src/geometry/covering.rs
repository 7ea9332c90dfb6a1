use super::GeometryError;
use num_complex::Complex64;
use std::f64::consts::PI;

/// `π / (4n²)`.
pub fn good_direction_bound(n: usize) -> f64 {
    PI / (4.0 * (n * n) as f64)
}

const WIDEN: f64 = 1e-12;

/// A unit vector `ê` with `|ê·(y_j − y_k)| ≥ π/(4n²) ‖y_j − y_k‖` for all pairs.
///
/// Directions are taken modulo `π`. Each pair excludes one open arc around the normal of
/// `y_j − y_k`; the result is the midpoint of the longest remaining arc.
pub fn good_direction(points: &[[f64; 2]]) -> Result<[f64; 2], GeometryError> {
    let n = points.len();
    if n < 2 {
        return Ok([1.0, 0.0]);
    }
    let delta = good_direction_bound(n);
    let half = delta.asin() + WIDEN;
    let mut arcs: Vec<(f64, f64)> = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            let (dx, dy) = (points[j][0] - points[k][0], points[j][1] - points[k][1]);
            if dx == 0.0 && dy == 0.0 {
                return Err(GeometryError::PreconditionViolated("points must be pairwise distinct".into()));
            }
            let normal = (dy.atan2(dx) + PI / 2.0).rem_euclid(PI);
            let (lo, hi) = (normal - half, normal + half);
            // split arcs crossing the ends of [0, π)
            if lo < 0.0 {
                arcs.push((0.0, hi));
                arcs.push((lo + PI, PI));
            } else if hi > PI {
                arcs.push((lo, PI));
                arcs.push((0.0, hi - PI));
            } else {
                arcs.push((lo, hi));
            }
        }
    }
    arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut free: Vec<(f64, f64)> = Vec::new();
    let mut cur = 0.0;
    for (lo, hi) in &arcs {
        if *lo > cur {
            free.push((cur, *lo));
        }
        cur = f64::max(cur, *hi);
    }
    if cur < PI {
        free.push((cur, PI));
    }
    // the two ends of [0, π) are the same direction up to sign
    if free.len() >= 2 && free[0].0 == 0.0 && free[free.len() - 1].1 == PI {
        let last = free.pop().unwrap();
        free[0] = (last.0 - PI, free[0].1);
    }
    let best = free
        .iter()
        .max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
        .ok_or(GeometryError::NoDirectionFound)?;
    let phi = 0.5 * (best.0 + best.1);
    let e = [phi.cos(), phi.sin()];
    for j in 0..n {
        for k in (j + 1)..n {
            let d = [points[j][0] - points[k][0], points[j][1] - points[k][1]];
            let dot = (e[0] * d[0] + e[1] * d[1]).abs();
            if dot < delta * d[0].hypot(d[1]) {
                return Err(GeometryError::NoDirectionFound);
            }
        }
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialShift {
    pub lambda: f64,
    pub points: Vec<Complex64>,
}

/// Translates points along `ê` by `λ = 2R²/η`.
///
/// Requires `0 < η < 1 < R`, `‖y‖ ≤ R` for the whole configuration in `ℝ^{2n}` and
/// `ê·(y_{ℓ+1} − y_ℓ) > η` for consecutive points.
pub fn radial_shift(points: &[[f64; 2]], e: [f64; 2], r: f64, eta: f64) -> Result<RadialShift, GeometryError> {
    let bad = |s: &str| Err(GeometryError::PreconditionViolated(s.into()));
    if !(eta > 0.0 && eta < 1.0 && r > 1.0) {
        return bad("need 0 < eta < 1 < R");
    }
    if ((e[0] * e[0] + e[1] * e[1]).sqrt() - 1.0).abs() > 1e-12 {
        return bad("direction must be a unit vector");
    }
    let norm: f64 = points.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum::<f64>().sqrt();
    if norm > r {
        return bad("configuration lies outside the ball of radius R");
    }
    for w in points.windows(2) {
        let gap = e[0] * (w[1][0] - w[0][0]) + e[1] * (w[1][1] - w[0][1]);
        if gap <= eta {
            return bad("consecutive gaps along the direction must exceed eta");
        }
    }
    let lambda = 2.0 * r * r / eta;
    let shift = Complex64::new(lambda * e[0], lambda * e[1]);
    Ok(RadialShift { lambda, points: points.iter().map(|p| Complex64::new(p[0], p[1]) + shift).collect() })
}
