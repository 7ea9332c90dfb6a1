//! Truncated correlators of exponentials and currents by a level-block recursion.
//!
//! Each insertion factorizes as a scalar times a left operator times a right operator, so the
//! running vector at levels `(N, M)` is a matrix between the two chiral level spaces.

use crate::lattice::{LatticeVector, Model};
use crate::vertex::chiral::{ChiralOp, ChiralSpace};
use crate::vertex::{sector_prefactor, SymbolKind, VertexSymbol, CUTOFF_SLACK};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;

struct Step {
    pref: Complex64,
    left: Option<ChiralOp>,
    right: Option<ChiralOp>,
    /// `h + h̄` of the sector after this insertion.
    delta: f64,
}

type Levels = HashMap<(u32, u32), DMatrix<Complex64>>;

/// `(S_H, S_{H−1})` for charge-neutral insertions without descendants.
pub(super) fn truncated_pair(model: &Model, ins: &[VertexSymbol], charges: &[LatticeVector], points: &[Complex64], cutoff: f64) -> (Complex64, Complex64) {
    let hmax = (cutoff + CUTOFF_SLACK).floor().max(0.0) as u32;
    let ls = ChiralSpace::new(model.left_dim(), hmax);
    let rs = ChiralSpace::new(model.right_dim(), hmax);
    let n = ins.len();
    let mut beta = vec![LatticeVector::zero(model.rank()); n + 1];
    for k in (0..n).rev() {
        beta[k] = &beta[k + 1] + &charges[k];
    }
    let steps: Vec<Step> = (0..n)
        .map(|k| {
            let z = points[k];
            let (h, hb) = model.sector_weights(&beta[k]);
            let delta = h + hb;
            match &ins[k].kind {
                SymbolKind::Exponential(a) if a.is_zero() => Step { pref: Complex64::new(1.0, 0.0), left: None, right: None, delta },
                SymbolKind::Exponential(a) => {
                    let b = &beta[k + 1];
                    let pref = sector_prefactor(model, a, b, z) * model.eps(a, b) as f64;
                    let cl = model.left_components(a);
                    let cr = model.right_components(a);
                    let left = ChiralOp::exponential(&ls, &cl, model.left_signs(), z, hmax, hmax);
                    let right = ChiralOp::exponential(&rs, &cr, model.right_signs(), z.conj(), hmax, hmax);
                    Step { pref, left: Some(left), right: Some(right), delta }
                }
                SymbolKind::CurrentLeft(hv) => {
                    let coeff: Vec<f64> = model.left_components_real(hv).iter().zip(model.left_signs()).map(|(c, s)| c * s).collect();
                    let cb = model.left_components(&beta[k + 1]);
                    let zero: f64 = coeff.iter().zip(&cb).map(|(a, b)| a * b).sum();
                    let op = ChiralOp::current(&ls, &coeff, model.left_signs(), zero, z, hmax, hmax);
                    Step { pref: Complex64::new(1.0, 0.0), left: Some(op), right: None, delta }
                }
                SymbolKind::CurrentRight(hv) => {
                    let coeff: Vec<f64> = model.right_components_real(hv).iter().zip(model.right_signs()).map(|(c, s)| c * s).collect();
                    let cb = model.right_components(&beta[k + 1]);
                    let zero: f64 = coeff.iter().zip(&cb).map(|(a, b)| a * b).sum();
                    let op = ChiralOp::current(&rs, &coeff, model.right_signs(), zero, z.conj(), hmax, hmax);
                    Step { pref: Complex64::new(1.0, 0.0), left: None, right: Some(op), delta }
                }
                SymbolKind::Descendant(_) => unreachable!("descendants use the general route"),
            }
        })
        .collect();
    let run = |cap: f64| -> Complex64 {
        let mut x: Levels = HashMap::new();
        x.insert((0, 0), DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)));
        for st in steps.iter().rev() {
            let room = cap - st.delta + CUTOFF_SLACK;
            if room < 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let room = room.floor() as u32;
            x = step(&x, st, room);
            if x.is_empty() {
                return Complex64::new(0.0, 0.0);
            }
        }
        x.get(&(0, 0)).map_or(Complex64::new(0.0, 0.0), |m| m[(0, 0)])
    };
    let prev = if cutoff >= 1.0 { run(cutoff - 1.0) } else { run(cutoff) };
    (run(cutoff), prev)
}

fn step(x: &Levels, st: &Step, room: u32) -> Levels {
    let mut out: Levels = HashMap::new();
    let mut keys: Vec<_> = x.keys().copied().collect();
    keys.sort();
    for (n, m) in keys {
        let xm = &x[&(n, m)];
        for n2 in 0..=room {
            let lx = match &st.left {
                Some(op) => match op.blocks.get(&(n, n2)) {
                    Some(b) => b * xm,
                    None => continue,
                },
                None if n2 == n => xm.clone(),
                None => continue,
            };
            for m2 in 0..=(room - n2) {
                let val = match &st.right {
                    Some(op) => match op.blocks.get(&(m, m2)) {
                        Some(b) => &lx * b.transpose(),
                        None => continue,
                    },
                    None if m2 == m => lx.clone(),
                    None => continue,
                };
                let val = val * st.pref;
                match out.get_mut(&(n2, m2)) {
                    Some(acc) => *acc += val,
                    None => {
                        out.insert((n2, m2), val);
                    }
                }
            }
        }
    }
    out
}
