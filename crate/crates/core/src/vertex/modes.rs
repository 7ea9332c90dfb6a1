//! Modes `a(r, s)` of vertex operators and their norms.

use super::chiral::{level, substitute, CreationGram};
use super::{apply_vertex, homogeneous_grading, VertexError, VertexSymbol, CUTOFF_SLACK};
use crate::fock::{self, norm, FockState, Grading, PBWMonomial};
use crate::lattice::Model;
use num_complex::Complex64;

/// Output grading of `a(r, s)` on a vector of grading `gb`.
pub fn mode_output_grading(a: &Grading, gb: &Grading, r: f64, s: f64) -> Grading {
    Grading { h: gb.h + a.h - r - 1.0, hbar: gb.hbar + a.hbar - s - 1.0 }
}

/// `a(r, s) b`: the component of `Y(a, 1) b` of grading `(h_b + h_a − r − 1, h̄_b + h̄_a − s − 1)`.
pub fn apply_mode(model: &Model, a: &VertexSymbol, r: f64, s: f64, b: &FockState, cutoff: f64) -> Result<FockState, VertexError> {
    let gb = homogeneous_grading(model, b)?;
    let go = mode_output_grading(&a.grading, &gb, r, s);
    if go.total() > cutoff + CUTOFF_SLACK {
        return Err(VertexError::CutoffTooSmall { cutoff });
    }
    let out = match apply_vertex(model, a, Complex64::new(1.0, 0.0), b, go.total()) {
        Ok(v) => v,
        Err(VertexError::CutoffTooSmall { .. }) => return Ok(FockState::zero()),
        Err(e) => return Err(e),
    };
    Ok(FockState::from_terms(
        out.iter().filter(|(m, _)| fock::weight(m, model).approx_eq(&go, 1e-9)).map(|(m, c)| (m.clone(), *c)),
    ))
}

/// `‖a(r, s) b‖`.
pub fn mode_norm_sample(model: &Model, a: &VertexSymbol, r: f64, s: f64, b: &FockState, cutoff: f64) -> Result<f64, VertexError> {
    Ok(norm(model, &apply_mode(model, a, r, s, b, cutoff)?))
}

/// Norms of `e_α(r, s) b` for a monomial `b`, resolved by output levels `(N, M)` of the
/// sector `α + β`. The norm at `(N, M)` is `scale · sqrt(left[N] · right[M])`.
#[derive(Clone, Debug)]
pub struct ModeNorms {
    pub scale: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// `(h, h̄)` of the output sector at levels `(0, 0)`.
    pub base: Grading,
}

impl ModeNorms {
    pub fn norm(&self, n: usize, m: usize) -> f64 {
        self.scale * (self.left[n].max(0.0) * self.right[m].max(0.0)).sqrt()
    }

    /// The mode `(r, s)` landing at output levels `(n, m)`.
    pub fn mode_at(&self, a: &Grading, b: &Grading, n: usize, m: usize) -> (f64, f64) {
        (b.h + a.h - self.base.h - n as f64 - 1.0, b.hbar + a.hbar - self.base.hbar - m as f64 - 1.0)
    }
}

/// Level-resolved norms of `e_α(·, ·) b` up to output level `max_level` on each side.
pub fn exponential_mode_norms(model: &Model, alpha: &crate::lattice::LatticeVector, b: &PBWMonomial, max_level: u32) -> ModeNorms {
    let out = alpha + &b.charge;
    let (h, hbar) = model.sector_weights(&out);
    let cl = model.left_components(alpha);
    let cr = model.right_components(alpha);
    let left = side_norms(&b.left, &cl, model.left_signs(), max_level);
    let right = side_norms(&b.right, &cr, model.right_signs(), max_level);
    ModeNorms { scale: 1.0, left, right, base: Grading { h, hbar } }
}

fn side_norms(x: &[crate::fock::Osc], c: &[f64], signs: &[f64], max_level: u32) -> Vec<f64> {
    let neg: Vec<f64> = c.iter().map(|v| -v).collect();
    let terms = substitute(x, &neg, Complex64::new(1.0, 0.0));
    let chir: Vec<_> = terms.iter().map(|(m, _)| m.clone()).collect();
    let gram = CreationGram::new(&chir, c, signs);
    (0..=max_level)
        .map(|n| {
            let mut s = Complex64::new(0.0, 0.0);
            for (j, (mj, aj)) in terms.iter().enumerate() {
                let lj = level(mj);
                if lj > n {
                    continue;
                }
                for (k, (mk, ak)) in terms.iter().enumerate() {
                    let lk = level(mk);
                    if lk > n {
                        continue;
                    }
                    s += aj.conj() * ak * gram.pair(j, n - lj, k, n - lk);
                }
            }
            s.re
        })
        .collect()
}
