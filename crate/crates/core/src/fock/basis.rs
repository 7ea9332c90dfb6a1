use super::{monomial_pairing, weight, Grading, Osc, PBWMonomial};
use crate::lattice::{enumerate::enumerate_majorant, Model};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Monomials of one grading `(h, h̄)`, possibly from several charge sectors.
#[derive(Clone, Debug)]
pub struct GradedSector {
    pub grading: Grading,
    pub monomials: Vec<PBWMonomial>,
}

/// All oscillator multisets over `dims` directions with total mode number `level`.
pub fn oscillator_multisets(dims: usize, level: u32) -> Vec<Vec<Osc>> {
    let mut items = Vec::new();
    for dir in 0..dims {
        for mode in 1..=level {
            items.push(Osc { dir: dir as u16, mode });
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[Osc], start: usize, left: u32, cur: &mut Vec<Osc>, out: &mut Vec<Vec<Osc>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in start..items.len() {
            if items[k].mode <= left {
                cur.push(items[k]);
                rec(items, k, left - items[k].mode, cur, out);
                cur.pop();
            }
        }
    }
    rec(&items, 0, level, &mut cur, &mut out);
    out
}

/// Number of integer partitions of `n`.
pub fn partitions_count(n: usize) -> u64 {
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for k in part..=n {
            p[k] += p[k - part];
        }
    }
    p[n]
}

const KEY: f64 = 1e9;

/// Every monomial with `h + h̄ ≤ cutoff`, grouped by grading and ordered by `(h + h̄, h)`.
///
/// For an indefinite polarization the bound is applied to `|h| + |h̄|`.
pub fn graded_basis(model: &Model, cutoff: f64) -> Vec<GradedSector> {
    let slack = 1e-9;
    let (nl, nr) = (model.left_dim(), model.right_dim());
    let mut groups: BTreeMap<(i64, i64), (Grading, Vec<PBWMonomial>)> = BTreeMap::new();
    for a in enumerate_majorant(model, 2.0 * cutoff) {
        let (h, hb) = model.sector_weights(&a);
        let base = h.abs() + hb.abs();
        if base > cutoff + slack {
            continue;
        }
        let room = (cutoff - base + slack).floor().max(0.0) as u32;
        for n in 0..=room {
            if nl == 0 && n > 0 {
                break;
            }
            let lefts = oscillator_multisets(nl, n);
            for m in 0..=(room - n) {
                if nr == 0 && m > 0 {
                    break;
                }
                let rights = oscillator_multisets(nr, m);
                for l in &lefts {
                    for r in &rights {
                        let mono = PBWMonomial { charge: a.clone(), left: l.clone(), right: r.clone() };
                        let g = weight(&mono, model);
                        let k = ((g.total() * KEY).round() as i64, (g.h * KEY).round() as i64);
                        groups.entry(k).or_insert_with(|| (g, Vec::new())).1.push(mono);
                    }
                }
            }
        }
    }
    groups
        .into_values()
        .map(|(grading, mut monomials)| {
            monomials.sort();
            GradedSector { grading, monomials }
        })
        .collect()
}

/// `⟨b_i, b_j⟩` over the given monomials, every pair evaluated.
pub fn gram_matrix(model: &Model, monomials: &[PBWMonomial]) -> DMatrix<Complex64> {
    let n = monomials.len();
    DMatrix::from_fn(n, n, |i, j| Complex64::new(monomial_pairing(model, &monomials[i], &monomials[j]), 0.0))
}
