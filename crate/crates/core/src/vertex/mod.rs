//! Vertex operators of `F_{L,p}`: exponentials, currents and descendants.

pub(crate) mod chiral;
mod modes;

pub use modes::{apply_mode, exponential_mode_norms, mode_norm_sample, mode_output_grading, ModeNorms};

use crate::fock::{self, heisenberg_apply, mode_on_monomial, virasoro_mode, FockError, FockState, Grading, PBWMonomial, Side};
use crate::lattice::{LatticeVector, Model};
use chiral::{level, merge, substitute, CreationTable};
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

/// Slack when comparing weights against a cutoff.
pub const CUTOFF_SLACK: f64 = 1e-9;

/// Default cap on the oscillator depth of descendant symbols.
pub const DEFAULT_DEPTH_CAP: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VertexError {
    #[error("vertex operators are not defined at ζ = 0")]
    ZeroPoint,
    #[error("every output sector lies above the cutoff {cutoff}")]
    CutoffTooSmall { cutoff: f64 },
    #[error("descendant depth {depth} exceeds the cap {cap}")]
    RecursionDepthExceeded { depth: usize, cap: usize },
    #[error("state is not homogeneous in (h, hbar)")]
    NotHomogeneous,
    #[error("state is empty")]
    EmptyState,
    #[error("vector does not lie in {0}")]
    WrongSubspace(&'static str),
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymbolKind {
    Exponential(LatticeVector),
    /// `h(-1)𝟏` with `h ∈ H_l` in lattice coordinates.
    CurrentLeft(Vec<f64>),
    /// `h(-1)𝟏` with `h ∈ H_r`, acting through `ζ̄`.
    CurrentRight(Vec<f64>),
    Descendant(FockState),
}

/// A homogeneous vector `a` together with its vertex operator `Y(a, ζ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSymbol {
    pub kind: SymbolKind,
    pub grading: Grading,
    pub quasi_primary: bool,
}

impl VertexSymbol {
    pub fn vacuum(model: &Model) -> Self {
        Self::exponential(model, &LatticeVector::zero(model.rank()))
    }

    pub fn exponential(model: &Model, a: &LatticeVector) -> Self {
        let (h, hbar) = model.sector_weights(a);
        VertexSymbol { kind: SymbolKind::Exponential(a.clone()), grading: Grading { h, hbar }, quasi_primary: true }
    }

    pub fn current_left(model: &Model, h: &[f64]) -> Result<Self, VertexError> {
        check_len(model, h)?;
        if model.right_components_real(h).iter().any(|x| x.abs() > 1e-10) {
            return Err(VertexError::WrongSubspace("H_l"));
        }
        Ok(VertexSymbol { kind: SymbolKind::CurrentLeft(h.to_vec()), grading: Grading { h: 1.0, hbar: 0.0 }, quasi_primary: true })
    }

    pub fn current_right(model: &Model, h: &[f64]) -> Result<Self, VertexError> {
        check_len(model, h)?;
        if model.left_components_real(h).iter().any(|x| x.abs() > 1e-10) {
            return Err(VertexError::WrongSubspace("H_r"));
        }
        Ok(VertexSymbol { kind: SymbolKind::CurrentRight(h.to_vec()), grading: Grading { h: 0.0, hbar: 1.0 }, quasi_primary: true })
    }

    /// A descendant symbol; the state must be nonzero and homogeneous.
    pub fn descendant(model: &Model, state: FockState) -> Result<Self, VertexError> {
        let grading = homogeneous_grading(model, &state)?;
        let mut qp = true;
        for side in [Side::Left, Side::Right] {
            let l1 = virasoro_mode(model, 1, side, &state)?;
            if l1.max_abs() > 1e-12 * (1.0 + state.max_abs()) {
                qp = false;
            }
        }
        Ok(VertexSymbol { kind: SymbolKind::Descendant(state), grading, quasi_primary: qp })
    }

    /// The vector `a` itself.
    pub fn state(&self, model: &Model) -> FockState {
        let vac = FockState::vacuum(model.rank());
        match &self.kind {
            SymbolKind::Exponential(a) => fock::exponential_state(a),
            SymbolKind::CurrentLeft(h) | SymbolKind::CurrentRight(h) => {
                heisenberg_apply(model, h, -1, &vac).expect("length checked at construction")
            }
            SymbolKind::Descendant(s) => s.clone(),
        }
    }

    /// Charges carried by the symbol.
    pub fn charges(&self, model: &Model) -> Vec<LatticeVector> {
        match &self.kind {
            SymbolKind::Exponential(a) => vec![a.clone()],
            SymbolKind::CurrentLeft(_) | SymbolKind::CurrentRight(_) => vec![LatticeVector::zero(model.rank())],
            SymbolKind::Descendant(s) => {
                let mut v: Vec<LatticeVector> = s.monomials().map(|m| m.charge.clone()).collect();
                v.dedup();
                v
            }
        }
    }
}

fn check_len(model: &Model, h: &[f64]) -> Result<(), VertexError> {
    if h.len() != model.rank() {
        return Err(FockError::DimensionMismatch { expected: model.rank(), got: h.len() }.into());
    }
    Ok(())
}

/// The common grading of all monomials of `s`.
pub fn homogeneous_grading(model: &Model, s: &FockState) -> Result<Grading, VertexError> {
    let mut it = s.monomials().map(|m| fock::weight(m, model));
    let g = it.next().ok_or(VertexError::EmptyState)?;
    if it.all(|x| x.approx_eq(&g, 1e-9)) {
        Ok(g)
    } else {
        Err(VertexError::NotHomogeneous)
    }
}

fn total_weight(model: &Model, m: &PBWMonomial) -> f64 {
    fock::weight(m, model).total()
}

/// `Y(a, ζ)·target`, truncated to output weight `h + h̄ ≤ cutoff`.
pub fn apply_vertex(model: &Model, sym: &VertexSymbol, zeta: Complex64, target: &FockState, cutoff: f64) -> Result<FockState, VertexError> {
    if zeta == Complex64::new(0.0, 0.0) {
        return Err(VertexError::ZeroPoint);
    }
    if !target.is_empty() {
        let mut min_out = f64::INFINITY;
        for a in sym.charges(model) {
            for m in target.monomials() {
                let (h, hb) = model.sector_weights(&(&a + &m.charge));
                min_out = min_out.min(h + hb);
            }
        }
        if min_out > cutoff + CUTOFF_SLACK {
            return Err(VertexError::CutoffTooSmall { cutoff });
        }
    }
    match &sym.kind {
        SymbolKind::Exponential(a) => Ok(exp_apply(model, a, zeta, target, cutoff)),
        SymbolKind::CurrentLeft(h) => Ok(current_apply(model, Side::Left, h, zeta, target, cutoff)),
        SymbolKind::CurrentRight(h) => Ok(current_apply(model, Side::Right, h, zeta, target, cutoff)),
        SymbolKind::Descendant(s) => apply_descendant_vertex(model, s, zeta, target, cutoff, DEFAULT_DEPTH_CAP),
    }
}

/// `ζ^{(pα,pβ)_p} ζ̄^{(p̄α,p̄β)_p}` as `|ζ|^{2(p̄α,p̄β)_p} ζ^{(α,β)_lat}`.
pub fn sector_prefactor(model: &Model, a: &LatticeVector, b: &LatticeVector, zeta: Complex64) -> Complex64 {
    let k_r = model.pair_right(a, b);
    let k = model.lattice.pair(a, b);
    zeta.powi(k as i32) * zeta.norm().powf(2.0 * k_r)
}

/// `E^-(α,ζ) E^+(α,ζ) l_{e_α} ζ^{pα} ζ̄^{p̄α}` on a state.
pub(crate) fn exp_apply(model: &Model, a: &LatticeVector, zeta: Complex64, target: &FockState, cutoff: f64) -> FockState {
    if a.is_zero() {
        return truncate(model, target, cutoff);
    }
    let zbar = zeta.conj();
    let cl = model.left_components(a);
    let cr = model.right_components(a);
    let max = (cutoff + CUTOFF_SLACK).floor().max(0.0) as u32;
    let lt = CreationTable::new(&cl, model.left_signs(), zeta, max);
    let rt = CreationTable::new(&cr, model.right_signs(), zbar, max);
    let ncl: Vec<f64> = cl.iter().map(|x| -x).collect();
    let ncr: Vec<f64> = cr.iter().map(|x| -x).collect();
    let mut acc: HashMap<PBWMonomial, Complex64> = HashMap::new();
    let mut sector_cache: HashMap<LatticeVector, (LatticeVector, f64, Complex64)> = HashMap::new();
    for (m, coef) in target.iter() {
        let (out, delta, pref) = sector_cache
            .entry(m.charge.clone())
            .or_insert_with(|| {
                let out = a + &m.charge;
                let (h, hb) = model.sector_weights(&out);
                let pref = sector_prefactor(model, a, &m.charge, zeta) * model.eps(a, &m.charge) as f64;
                (out, h + hb, pref)
            })
            .clone();
        if delta > cutoff + CUTOFF_SLACK {
            continue;
        }
        let lsub = substitute(&m.left, &ncl, zeta);
        let rsub = substitute(&m.right, &ncr, zbar);
        for (lrem, lc) in &lsub {
            let wl = level(lrem) as f64;
            for (rrem, rc) in &rsub {
                let base = delta + wl + level(rrem) as f64;
                if base > cutoff + CUTOFF_SLACK {
                    continue;
                }
                let budget = (cutoff - base + CUTOFF_SLACK).floor() as u32;
                let c0 = coef * pref * lc * rc;
                for n in 0..=budget {
                    for (lcm, x) in lt.level(n) {
                        let left = merge(lrem, lcm);
                        for mm in 0..=(budget - n) {
                            for (rcm, y) in rt.level(mm) {
                                let mono = PBWMonomial { charge: out.clone(), left: left.clone(), right: merge(rrem, rcm) };
                                *acc.entry(mono).or_default() += c0 * x * y;
                            }
                        }
                    }
                }
            }
        }
    }
    FockState::from_map(acc)
}

fn truncate(model: &Model, s: &FockState, cutoff: f64) -> FockState {
    FockState::from_terms(
        s.iter().filter(|(m, _)| total_weight(model, m) <= cutoff + CUTOFF_SLACK).map(|(m, c)| (m.clone(), *c)),
    )
}

/// `Σ_n h(n) w^{-n-1}` with `w = ζ` on the left and `ζ̄` on the right.
fn current_apply(model: &Model, side: Side, h: &[f64], zeta: Complex64, target: &FockState, cutoff: f64) -> FockState {
    let (comps, signs) = match side {
        Side::Left => (model.left_components_real(h), model.left_signs()),
        Side::Right => (model.right_components_real(h), model.right_signs()),
    };
    let coeff: Vec<f64> = comps.iter().zip(signs).map(|(c, s)| c * s).collect();
    let w = if side == Side::Left { zeta } else { zeta.conj() };
    let mut out = FockState::zero();
    for (dir, &a) in coeff.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let s_dir = signs[dir];
        for (m, c) in target.iter() {
            let wt = total_weight(model, m);
            let top = m.side(side).iter().map(|o| o.mode as i64).max().unwrap_or(0);
            let room = (cutoff - wt + CUTOFF_SLACK).floor() as i64;
            for n in -room.max(0)..=top {
                if n < 0 && -n > room {
                    continue;
                }
                if let Some((mm, f)) = mode_on_monomial(model, side, dir, s_dir, n, m) {
                    if total_weight(model, &mm) <= cutoff + CUTOFF_SLACK {
                        out.add_term(mm, c * a * f * w.powi(-(n as i32) - 1));
                    }
                }
            }
        }
    }
    out
}

/// `Y(v, ζ)·target` for a PBW combination `v`, by the inductive rule on its oscillators.
pub fn apply_descendant_vertex(model: &Model, state: &FockState, zeta: Complex64, target: &FockState, cutoff: f64, depth_cap: usize) -> Result<FockState, VertexError> {
    if zeta == Complex64::new(0.0, 0.0) {
        return Err(VertexError::ZeroPoint);
    }
    let mut out = FockState::zero();
    for (m, c) in state.iter() {
        if m.oscillator_count() > depth_cap {
            return Err(VertexError::RecursionDepthExceeded { depth: m.oscillator_count(), cap: depth_cap });
        }
        out = out.add(&monomial_vertex(model, m, zeta, target, cutoff).scale(*c));
    }
    Ok(out)
}

fn monomial_vertex(model: &Model, m: &PBWMonomial, zeta: Complex64, target: &FockState, cutoff: f64) -> FockState {
    let (side, osc) = if let Some(o) = m.left.first() {
        (Side::Left, *o)
    } else if let Some(o) = m.right.first() {
        (Side::Right, *o)
    } else {
        return exp_apply(model, &m.charge, zeta, target, cutoff);
    };
    let mut v = m.clone();
    v.side_mut(side).remove(0);
    let n = osc.mode as i64 - 1;
    let dir = osc.dir as usize;
    let w = if side == Side::Left { zeta } else { zeta.conj() };
    let sign = match side {
        Side::Left => model.left_signs()[dir],
        Side::Right => model.right_signs()[dir],
    };
    // Y(v) (1/n!) ∂^n h^+ : Σ_{k≥0} (-1)^n C(k+n, n) h(k) w^{-k-n-1}
    let mut lowered = FockState::zero();
    for (t, c) in target.iter() {
        let top = t.side(side).iter().map(|o| o.mode as i64).max().unwrap_or(0);
        for k in 0..=top {
            if let Some((tt, f)) = mode_on_monomial(model, side, dir, sign, k, t) {
                let coef = binom_i(k + n, n) * if n % 2 == 0 { 1.0 } else { -1.0 };
                lowered.add_term(tt, c * f * coef * w.powi(-(k + n + 1) as i32));
            }
        }
    }
    let mut out = monomial_vertex(model, &v, zeta, &lowered, cutoff);
    // (1/n!) ∂^n h^- Y(v) : Σ_{k≥n} C(k, n) h(-k-1) w^{k-n}
    let inner = monomial_vertex(model, &v, zeta, target, cutoff);
    for (t, c) in inner.iter() {
        let wt = total_weight(model, t);
        let mut k = n;
        while wt + (k + 1) as f64 <= cutoff + CUTOFF_SLACK {
            if let Some((tt, f)) = mode_on_monomial(model, side, dir, sign, -k - 1, t) {
                out.add_term(tt, c * f * binom_i(k, n) * w.powi((k - n) as i32));
            }
            k += 1;
        }
    }
    out
}

fn binom_i(n: i64, k: i64) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r *= (n - i) as f64 / (i + 1) as f64;
    }
    r
}
