use super::{symbol_label, AxiomError, CheckReport, Verdict};
use crate::fock::{graded_basis, heisenberg_apply, norm, weight, FockState, PBWMonomial};
use crate::lattice::{LatticeVector, Model};
use crate::vertex::{apply_mode, exponential_mode_norms, SymbolKind, VertexSymbol};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Output levels per side sampled for each `(a, b)`.
pub const PEB_GRID: usize = 20;

/// Largest exponent tried for `p` and `q`.
pub const PEB_MAX_EXPONENT: u32 = 6;

/// A fitted bound `‖a(r,s)b‖ ≤ M (|r|+|s|+1)^p ‖(L(0)+L̄(0)+1)^q b‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyFit {
    pub symbol: String,
    pub m: f64,
    pub p: u32,
    pub q: u32,
    pub samples: usize,
    pub nonzero_samples: usize,
}

struct Sample {
    modes: f64,
    weight: f64,
    ratio: f64,
    edge: bool,
}

fn samples_for(model: &Model, a: &VertexSymbol, basis: &[PBWMonomial], cutoff: f64) -> Result<Vec<Sample>, AxiomError> {
    let half = PEB_GRID / 2;
    let mut out = Vec::new();
    for b in basis {
        let gb = weight(b, model);
        let bnorm = norm(model, &FockState::from_monomial(b.clone()));
        let wide = gb.total() > 0.5 * cutoff;
        let mut push = |r: f64, s: f64, val: f64, n: usize, m: usize| {
            out.push(Sample { modes: r.abs() + s.abs() + 1.0, weight: gb.total() + 1.0, ratio: val / bnorm, edge: wide || n >= half || m >= half });
        };
        match &a.kind {
            SymbolKind::Exponential(alpha) => {
                let mn = exponential_mode_norms(model, alpha, b, (PEB_GRID - 1) as u32);
                for n in 0..PEB_GRID {
                    for m in 0..PEB_GRID {
                        let (r, s) = mn.mode_at(&a.grading, &gb, n, m);
                        push(r, s, mn.norm(n, m), n, m);
                    }
                }
            }
            SymbolKind::CurrentLeft(h) | SymbolKind::CurrentRight(h) => {
                let left = matches!(a.kind, SymbolKind::CurrentLeft(_));
                let st = FockState::from_monomial(b.clone());
                let own = if left { b.left_level() } else { b.right_level() } as i64;
                for n in 0..PEB_GRID {
                    let k = own - n as i64;
                    let v = norm(model, &heisenberg_apply(model, h, k, &st).map_err(crate::vertex::VertexError::from)?);
                    let (r, s) = if left { (k as f64, -1.0) } else { (-1.0, k as f64) };
                    let (ln, rn) = if left { (n, b.right_level() as usize) } else { (b.left_level() as usize, n) };
                    push(r, s, v, ln, rn);
                }
            }
            SymbolKind::Descendant(_) => {
                return Err(AxiomError::InvalidInput(format!("energy bounds take exponentials and currents, got {}", symbol_label(a))));
            }
        }
    }
    Ok(out)
}

/// Smallest `(p, q)`, ordered by `p + q` then `p`, whose ratio attains its maximum away from
/// the outer half of the sampled range.
fn fit(samples: &[Sample]) -> Option<(f64, u32, u32)> {
    for total in 0..=2 * PEB_MAX_EXPONENT {
        for p in 0..=total.min(PEB_MAX_EXPONENT) {
            let q = total - p;
            if q > PEB_MAX_EXPONENT {
                continue;
            }
            let (mut inner, mut outer) = (0.0f64, 0.0f64);
            for s in samples {
                let v = s.ratio / (s.modes.powi(p as i32) * s.weight.powi(q as i32));
                if s.edge {
                    outer = outer.max(v);
                } else {
                    inner = inner.max(v);
                }
            }
            if outer <= inner * (1.0 + 1e-9) && inner > 0.0 {
                return Some((inner, p, q));
            }
        }
    }
    None
}

/// Fits a polynomial energy bound for each symbol against every basis monomial with
/// `h + h̄ ≤ basis_cutoff` on a `PEB_GRID × PEB_GRID` grid of output levels.
pub fn check_energy_bounds(model: &Model, symbols: &[VertexSymbol], basis_cutoff: f64) -> Result<(CheckReport, Vec<Option<EnergyFit>>), AxiomError> {
    let basis: Vec<PBWMonomial> = graded_basis(model, basis_cutoff).into_iter().flat_map(|s| s.monomials).collect();
    let fits: Vec<Result<Option<EnergyFit>, AxiomError>> = symbols
        .par_iter()
        .map(|a| {
            let samples = samples_for(model, a, &basis, basis_cutoff)?;
            let nonzero = samples.iter().filter(|s| s.ratio > 0.0).count();
            Ok(fit(&samples).map(|(m, p, q)| EnergyFit { symbol: symbol_label(a), m, p, q, samples: samples.len(), nonzero_samples: nonzero }))
        })
        .collect();
    let fits = fits.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut rep = CheckReport::new(
        "energy_bounds",
        json!({ "model": model.name, "symbols": super::symbols_json(symbols), "basis_cutoff": basis_cutoff,
                "grid": [PEB_GRID, PEB_GRID], "max_exponent": PEB_MAX_EXPONENT }),
    );
    rep.metric("basis_size", basis.len())
        .metric("fits", serde_json::to_value(&fits).expect("plain data"))
        .metric("unfitted", fits.iter().filter(|f| f.is_none()).count());
    rep.verdict = Verdict::from_bool(fits.iter().all(Option::is_some));
    Ok((rep, fits))
}

/// Samples `|⟨𝟏, a_1(r_1,s_1) ⋯ a_n(r_n,s_n) 𝟏⟩|` over random tuples from `symbols` with
/// `n ≤ max_len` and compares with
/// `M^n (Σ|r_j+s_j|+1)^{nQ} (Σ|r_j−s_j|+1)^{nQ}`, where `M = 2^{p+q} K^q max M_a`,
/// `Q = p + q` and `K = max(h_a + h̄_a) + 3` from the fits.
///
/// Intermediate states stay inside the fitted range `h + h̄ ≤ basis_cutoff`.
pub fn check_peb_estimate(
    model: &Model,
    symbols: &[VertexSymbol],
    fits: &[EnergyFit],
    basis_cutoff: f64,
    max_len: usize,
    count: usize,
    seed: u64,
) -> Result<CheckReport, AxiomError> {
    if symbols.is_empty() || fits.len() != symbols.len() {
        return Err(AxiomError::InvalidInput("one fit per symbol is required".into()));
    }
    let p = fits.iter().map(|f| f.p).max().unwrap_or(0);
    let q = fits.iter().map(|f| f.q).max().unwrap_or(0);
    let m = fits.iter().map(|f| f.m).fold(0.0, f64::max);
    let k = symbols.iter().map(|s| s.grading.total()).fold(0.0, f64::max) + 3.0;
    let big_q = (p + q) as i32;
    let m_ups = 2f64.powi(big_q) * k.powi(q as i32) * m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut nonzero, mut violations, mut attempts) = (0usize, 0usize, 0usize, 0usize);
    let mut worst = 0.0f64;
    while done < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(AxiomError::InvalidInput("could not sample admissible mode tuples".into()));
        }
        let Some((idx, grades)) = sample_tuple(model, symbols, basis_cutoff, max_len, &mut rng) else { continue };
        let mut st = FockState::vacuum(model.rank());
        let mut modes = Vec::new();
        let mut in_g = (0.0, 0.0);
        for (&i, &(oh, ohb)) in idx.iter().zip(&grades).rev() {
            let a = &symbols[i];
            let (r, s) = (in_g.0 + a.grading.h - 1.0 - oh, in_g.1 + a.grading.hbar - 1.0 - ohb);
            modes.push((r, s));
            if !st.is_empty() {
                st = apply_mode(model, a, r, s, &st, oh + ohb)?;
            }
            in_g = (oh, ohb);
        }
        let value = st.vacuum_coefficient(model.rank()).norm();
        let n = idx.len() as i32;
        let plus: f64 = modes.iter().map(|(r, s)| (r + s).abs() + 1.0).sum();
        let minus: f64 = modes.iter().map(|(r, s)| (r - s).abs() + 1.0).sum();
        let bound = m_ups.powi(n) * plus.powi(n * big_q) * minus.powi(n * big_q);
        if value > 0.0 {
            nonzero += 1;
            worst = worst.max(value / bound);
        }
        if value > bound * (1.0 + 1e-12) {
            violations += 1;
        }
        done += 1;
    }
    let mut rep = CheckReport::new(
        "peb_estimate",
        json!({ "model": model.name, "symbols": super::symbols_json(symbols), "basis_cutoff": basis_cutoff,
                "max_len": max_len, "samples": count, "seed": seed }),
    );
    rep.metric("m_upsilon", m_ups)
        .metric("q_upsilon", big_q)
        .metric("k", k)
        .metric("nonzero_samples", nonzero)
        .metric("violations", violations)
        .metric("max_ratio", worst);
    rep.verdict = Verdict::from_bool(violations == 0 && nonzero > 0);
    Ok(rep)
}

/// Symbol indices and target output gradings (outermost first) with total charge zero and
/// every intermediate grading inside the fitted range.
fn sample_tuple(model: &Model, symbols: &[VertexSymbol], cutoff: f64, max_len: usize, rng: &mut ChaCha8Rng) -> Option<(Vec<usize>, Vec<(f64, f64)>)> {
    let n = rng.gen_range(1..=max_len);
    let mut idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..symbols.len())).collect();
    let charge = |i: usize| -> LatticeVector {
        match &symbols[i].kind {
            SymbolKind::Exponential(a) => a.clone(),
            _ => LatticeVector::zero(model.rank()),
        }
    };
    let partial: LatticeVector = idx[1..].iter().fold(LatticeVector::zero(model.rank()), |acc, &i| &acc + &charge(i));
    let need = -&partial;
    let fix: Vec<usize> = (0..symbols.len()).filter(|&i| charge(i) == need).collect();
    if fix.is_empty() {
        return None;
    }
    idx[0] = fix[rng.gen_range(0..fix.len())];
    let mut grades = vec![(0.0, 0.0); n];
    let mut acc = LatticeVector::zero(model.rank());
    for j in (1..n).rev() {
        acc = &acc + &charge(idx[j]);
        let (h, hb) = model.sector_weights(&acc);
        let (ln, rn) = (rng.gen_range(0..=2) as f64, rng.gen_range(0..=2) as f64);
        let g = (h + ln * (model.left_dim() > 0) as u8 as f64, hb + rn * (model.right_dim() > 0) as u8 as f64);
        if g.0 + g.1 > cutoff {
            return None;
        }
        grades[j] = g;
    }
    Some((idx, grades))
}
