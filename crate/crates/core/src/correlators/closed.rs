//! Free-field closed form for exponentials and currents on `X_n(ℂ)`.

use super::{check_lengths, Configuration, CorrelatorError};
use crate::lattice::{LatticeVector, Model};
use crate::vertex::{SymbolKind, VertexSymbol};
use num_complex::Complex64;

/// Largest number of currents accepted by the contraction sum.
pub const MAX_CURRENTS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub enum ClosedItem {
    Exp(LatticeVector),
    Left(Vec<f64>),
    Right(Vec<f64>),
}

/// One product of exponentials and currents with a coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedTerm {
    pub coef: Complex64,
    pub items: Vec<ClosedItem>,
}

fn item_terms(model: &Model, idx: usize, s: &VertexSymbol) -> Result<Vec<(Complex64, ClosedItem)>, CorrelatorError> {
    let one = Complex64::new(1.0, 0.0);
    match &s.kind {
        SymbolKind::Exponential(a) => Ok(vec![(one, ClosedItem::Exp(a.clone()))]),
        SymbolKind::CurrentLeft(h) => Ok(vec![(one, ClosedItem::Left(h.clone()))]),
        SymbolKind::CurrentRight(h) => Ok(vec![(one, ClosedItem::Right(h.clone()))]),
        SymbolKind::Descendant(st) => {
            let mut out = Vec::new();
            for (m, c) in st.iter() {
                let item = match (m.left.as_slice(), m.right.as_slice()) {
                    ([], []) => ClosedItem::Exp(m.charge.clone()),
                    ([o], []) if o.mode == 1 && m.charge.is_zero() => ClosedItem::Left(model.left_unit(o.dir as usize)),
                    ([], [o]) if o.mode == 1 && m.charge.is_zero() => ClosedItem::Right(model.right_unit(o.dir as usize)),
                    _ => return Err(CorrelatorError::Unsupported(idx)),
                };
                out.push((*c, item));
            }
            Ok(out)
        }
    }
}

/// Expands the insertions multilinearly into products of exponentials and currents.
pub fn closed_form_decompose(model: &Model, ins: &[VertexSymbol]) -> Result<Vec<ClosedTerm>, CorrelatorError> {
    let mut acc = vec![ClosedTerm { coef: Complex64::new(1.0, 0.0), items: Vec::new() }];
    for (idx, s) in ins.iter().enumerate() {
        let parts = item_terms(model, idx, s)?;
        let mut next = Vec::with_capacity(acc.len() * parts.len());
        for t in &acc {
            for (c, it) in &parts {
                let mut items = t.items.clone();
                items.push(it.clone());
                next.push(ClosedTerm { coef: t.coef * c, items });
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// The closed-form Schwinger function; zero unless the total charge vanishes.
pub fn schwinger_closed_form(model: &Model, ins: &[VertexSymbol], cfg: &Configuration) -> Result<Complex64, CorrelatorError> {
    check_lengths(ins, cfg)?;
    let pts = &cfg.points;
    for j in 0..pts.len() {
        for k in (j + 1)..pts.len() {
            if pts[j] == pts[k] {
                return Err(CorrelatorError::CoincidingPoints(j, k));
            }
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for t in closed_form_decompose(model, ins)? {
        total += t.coef * term_value(model, &t.items, pts)?;
    }
    Ok(total)
}

fn term_value(model: &Model, items: &[ClosedItem], pts: &[Complex64]) -> Result<Complex64, CorrelatorError> {
    let mut exps: Vec<(Complex64, &LatticeVector)> = Vec::new();
    let mut lefts: Vec<(Complex64, &[f64])> = Vec::new();
    let mut rights: Vec<(Complex64, &[f64])> = Vec::new();
    for (it, z) in items.iter().zip(pts) {
        match it {
            ClosedItem::Exp(a) => exps.push((*z, a)),
            ClosedItem::Left(h) => lefts.push((*z, h)),
            ClosedItem::Right(h) => rights.push((*z, h)),
        }
    }
    if lefts.len() + rights.len() > MAX_CURRENTS {
        return Err(CorrelatorError::TooManyCurrents);
    }
    let total = exps.iter().fold(LatticeVector::zero(model.rank()), |acc, (_, a)| &acc + *a);
    if !total.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut v = Complex64::new(1.0, 0.0);
    for i in 0..exps.len() {
        for j in (i + 1)..exps.len() {
            let (a, b) = (exps[i].1, exps[j].1);
            let d = exps[i].0 - exps[j].0;
            let k = model.lattice.pair(a, b);
            let r = model.pair_right(a, b);
            v *= d.powi(k as i32) * d.norm().powf(2.0 * r) * model.eps(a, b) as f64;
        }
    }
    if v == Complex64::new(0.0, 0.0) {
        return Ok(v);
    }
    let left = chiral_contractions(model, &lefts, &exps, false);
    let right = chiral_contractions(model, &rights, &exps, true);
    Ok(v * left * right)
}

/// Sum over partial pairings of the currents on one side; unpaired currents couple to the charges.
fn chiral_contractions(model: &Model, cur: &[(Complex64, &[f64])], exps: &[(Complex64, &LatticeVector)], right: bool) -> Complex64 {
    let (signs, comps) = if right {
        (model.right_signs(), cur.iter().map(|(_, h)| model.right_components_real(h)).collect::<Vec<_>>())
    } else {
        (model.left_signs(), cur.iter().map(|(_, h)| model.left_components_real(h)).collect::<Vec<_>>())
    };
    let charge_comps: Vec<Vec<f64>> = exps
        .iter()
        .map(|(_, a)| if right { model.right_components(a) } else { model.left_components(a) })
        .collect();
    let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).zip(signs).map(|((a, b), s)| s * a * b).sum() };
    let pt = |z: Complex64| if right { z.conj() } else { z };
    // linear coupling of each current to all charges
    let single: Vec<Complex64> = cur
        .iter()
        .zip(&comps)
        .map(|((z, _), c)| {
            exps.iter()
                .zip(&charge_comps)
                .map(|((w, _), ca)| Complex64::new(dot(c, ca), 0.0) / (pt(*z) - pt(*w)))
                .sum()
        })
        .collect();
    fn rec(rem: &mut Vec<usize>, single: &[Complex64], pair: &dyn Fn(usize, usize) -> Complex64) -> Complex64 {
        let Some(first) = rem.pop() else {
            return Complex64::new(1.0, 0.0);
        };
        let mut s = single[first] * rec(rem, single, pair);
        for k in 0..rem.len() {
            let other = rem.remove(k);
            s += pair(first, other) * rec(rem, single, pair);
            rem.insert(k, other);
        }
        rem.push(first);
        s
    }
    let pair = |i: usize, j: usize| -> Complex64 {
        let d = pt(cur[i].0) - pt(cur[j].0);
        Complex64::new(dot(&comps[i], &comps[j]), 0.0) / (d * d)
    };
    let mut idx: Vec<usize> = (0..cur.len()).collect();
    rec(&mut idx, &single, &pair)
}
