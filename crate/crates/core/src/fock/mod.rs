//! The graded space `F_{L,p}`: PBW monomials, Heisenberg and Virasoro modes, the involution φ
//! and the Hermitian form.

mod basis;
mod state;

pub use basis::{graded_basis, gram_matrix, oscillator_multisets, partitions_count, GradedSector};
pub use state::{FockState, Grading, Osc, PBWMonomial};

use crate::lattice::{LatticeVector, Model};
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("Virasoro mode {0} exceeds the cap |n| <= {VIRASORO_CAP}")]
    CapExceeded(i64),
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Largest `|n|` accepted by [`virasoro_mode`].
pub const VIRASORO_CAP: i64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// `(h, h̄)` of a monomial.
pub fn weight(m: &PBWMonomial, model: &Model) -> Grading {
    let (h, hb) = model.sector_weights(&m.charge);
    Grading { h: h + m.left_level() as f64, hbar: hb + m.right_level() as f64 }
}

/// Applies the frame mode `e_dir(n)` on one side.
pub fn mode_apply(model: &Model, side: Side, dir: usize, n: i64, s: &FockState) -> FockState {
    let sign = match side {
        Side::Left => model.left_signs()[dir],
        Side::Right => model.right_signs()[dir],
    };
    let mut out = FockState::zero();
    for (m, c) in s.iter() {
        if let Some((mm, f)) = mode_on_monomial(model, side, dir, sign, n, m) {
            out.add_term(mm, c * f);
        }
    }
    out
}

pub(crate) fn mode_on_monomial(
    model: &Model,
    side: Side,
    dir: usize,
    sign: f64,
    n: i64,
    m: &PBWMonomial,
) -> Option<(PBWMonomial, f64)> {
    use std::cmp::Ordering::*;
    match n.cmp(&0) {
        Greater => {
            let osc = Osc { dir: dir as u16, mode: n as u32 };
            let list = m.side(side);
            let k = list.iter().filter(|&&o| o == osc).count();
            if k == 0 {
                return None;
            }
            let mut mm = m.clone();
            let l = mm.side_mut(side);
            let pos = l.iter().position(|&o| o == osc).unwrap();
            l.remove(pos);
            Some((mm, n as f64 * sign * k as f64))
        }
        Equal => {
            let c = match side {
                Side::Left => model.left_components(&m.charge)[dir],
                Side::Right => model.right_components(&m.charge)[dir],
            };
            if c == 0.0 {
                None
            } else {
                Some((m.clone(), c))
            }
        }
        Less => {
            let mut mm = m.clone();
            mm.insert(side, Osc { dir: dir as u16, mode: (-n) as u32 });
            Some((mm, 1.0))
        }
    }
}

/// Applies `h(n)` for a real vector `h` in lattice coordinates.
pub fn heisenberg_apply(model: &Model, h: &[f64], n: i64, s: &FockState) -> Result<FockState, FockError> {
    if h.len() != model.rank() {
        return Err(FockError::DimensionMismatch { expected: model.rank(), got: h.len() });
    }
    let mut out = FockState::zero();
    // h = Σ η_i (h, e_i)_p e_i + Σ η_j (h, f_j)_p f_j
    let cl = model.left_components_real(h);
    let cr = model.right_components_real(h);
    for (i, c) in cl.iter().enumerate() {
        let a = c * model.left_signs()[i];
        if a != 0.0 {
            out = out.add(&mode_apply(model, Side::Left, i, n, s).scale(Complex64::new(a, 0.0)));
        }
    }
    for (j, c) in cr.iter().enumerate() {
        let a = c * model.right_signs()[j];
        if a != 0.0 {
            out = out.add(&mode_apply(model, Side::Right, j, n, s).scale(Complex64::new(a, 0.0)));
        }
    }
    Ok(out)
}

/// The anti-linear involution `φ`.
pub fn phi_involution(s: &FockState) -> FockState {
    let mut out = FockState::zero();
    for (m, c) in s.iter() {
        let k = m.left.len() + m.right.len();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mm = PBWMonomial { charge: -&m.charge, left: m.left.clone(), right: m.right.clone() };
        out.add_term(mm, c.conj() * sign);
    }
    out
}

/// `⟨m1, m2⟩` by moving each creation operator of `m1` across as its adjoint annihilator.
pub fn monomial_pairing(model: &Model, m1: &PBWMonomial, m2: &PBWMonomial) -> f64 {
    if m1.charge != m2.charge {
        return 0.0;
    }
    let mut cur = m2.clone();
    let mut val = 1.0;
    for (side, list) in [(Side::Left, &m1.left), (Side::Right, &m1.right)] {
        for o in list.iter() {
            let sign = match side {
                Side::Left => model.left_signs()[o.dir as usize],
                Side::Right => model.right_signs()[o.dir as usize],
            };
            match mode_on_monomial(model, side, o.dir as usize, sign, o.mode as i64, &cur) {
                Some((mm, f)) => {
                    cur = mm;
                    val *= f;
                }
                None => return 0.0,
            }
        }
    }
    // ⟨e_α, h(-n) y⟩ = ⟨h(n) e_α, y⟩ = 0
    if cur.left.is_empty() && cur.right.is_empty() {
        val
    } else {
        0.0
    }
}

/// Sesquilinear form, anti-linear in the left argument.
///
/// The pairing of two monomials vanishes unless they coincide (see [`monomial_pairing`]),
/// so only equal monomials are paired here.
pub fn inner_product(model: &Model, u: &FockState, v: &FockState) -> Complex64 {
    let (small, large, flip) = if u.len() <= v.len() { (u, v, false) } else { (v, u, true) };
    let mut s = Complex64::new(0.0, 0.0);
    for (m, a) in small.iter() {
        if let Some(b) = large.coefficient(m) {
            let w = monomial_pairing(model, m, m);
            let (x, y) = if flip { (b, *a) } else { (*a, b) };
            s += x.conj() * y * w;
        }
    }
    s
}

/// `⟨u, v⟩` computed over every pair of monomials, without using orthogonality.
pub fn inner_product_pairwise(model: &Model, u: &FockState, v: &FockState) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (m1, a) in u.iter() {
        for (m2, b) in v.iter() {
            let w = monomial_pairing(model, m1, m2);
            if w != 0.0 {
                s += a.conj() * b * w;
            }
        }
    }
    s
}

pub fn norm(model: &Model, u: &FockState) -> f64 {
    inner_product(model, u, u).re.max(0.0).sqrt()
}

/// `L(n)` or `L̄(n)` built from normal-ordered quadratic sums of frame modes.
pub fn virasoro_mode(model: &Model, n: i64, side: Side, s: &FockState) -> Result<FockState, FockError> {
    if n.abs() > VIRASORO_CAP {
        return Err(FockError::CapExceeded(n));
    }
    let (dim, signs) = match side {
        Side::Left => (model.left_dim(), model.left_signs()),
        Side::Right => (model.right_dim(), model.right_signs()),
    };
    let mut acc: HashMap<PBWMonomial, Complex64> = HashMap::new();
    for (m, c) in s.iter() {
        let top = m.side(side).iter().map(|o| o.mode as i64).max().unwrap_or(0);
        for i in 0..dim {
            let eta = signs[i];
            // :e(a) e(n-a): with the larger mode applied first; only finitely many terms survive
            let range = top + n.abs() + 1;
            for a in -range..=range {
                let b = n - a;
                let (first, second) = if a >= b { (a, b) } else { (b, a) };
                if first > top {
                    continue;
                }
                let Some((m1, f1)) = mode_on_monomial(model, side, i, eta, first, m) else {
                    continue;
                };
                let Some((m2, f2)) = mode_on_monomial(model, side, i, eta, second, &m1) else {
                    continue;
                };
                *acc.entry(m2).or_default() += c * (0.5 * eta * f1 * f2);
            }
        }
    }
    Ok(FockState::from_map(acc))
}

/// The conformal vector `ν = ½ Σ_i e_i(-1) e_i(-1) 𝟏` (or `ν̄` on the right).
pub fn conformal_vector(model: &Model, side: Side) -> FockState {
    let (dim, signs) = match side {
        Side::Left => (model.left_dim(), model.left_signs()),
        Side::Right => (model.right_dim(), model.right_signs()),
    };
    let mut s = FockState::zero();
    for i in 0..dim {
        let mut m = PBWMonomial::vacuum(model.rank());
        m.insert(side, Osc { dir: i as u16, mode: 1 });
        m.insert(side, Osc { dir: i as u16, mode: 1 });
        s.add_term(m, Complex64::new(0.5 * signs[i], 0.0));
    }
    s
}

/// The Hermite combinations built from `e_α`: `(a + φa, i(a − φa))` for even spin and
/// `(a − φa, i(a + φa))` for odd spin.
pub fn hermite_pair(model: &Model, a: &FockState) -> (FockState, FockState) {
    let spin = a
        .iter()
        .next()
        .map(|(m, _)| {
            let g = weight(m, model);
            (g.h - g.hbar).round() as i64
        })
        .unwrap_or(0);
    let phi = phi_involution(a);
    let i = Complex64::new(0.0, 1.0);
    if spin.rem_euclid(2) == 0 {
        (a.add(&phi), a.sub(&phi).scale(i))
    } else {
        (a.sub(&phi), a.add(&phi).scale(i))
    }
}

/// `e_α` as a state.
pub fn exponential_state(a: &LatticeVector) -> FockState {
    FockState::from_monomial(PBWMonomial::exponential(a.clone()))
}
