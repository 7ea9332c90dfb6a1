//! One-sided oscillator algebra: the `E^±` exponentials on oscillator multisets.

use crate::fock::{oscillator_multisets, Osc};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;

pub(crate) type Chiral = Vec<Osc>;

pub(crate) fn level(m: &[Osc]) -> u32 {
    m.iter().map(|o| o.mode).sum()
}

/// Merges two sorted multisets.
pub(crate) fn merge(a: &[Osc], b: &[Osc]) -> Chiral {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn runs(m: &[Osc]) -> Vec<(Osc, u32)> {
    let mut out: Vec<(Osc, u32)> = Vec::new();
    for &o in m {
        match out.last_mut() {
            Some((p, k)) if *p == o => *k += 1,
            _ => out.push((o, 1)),
        }
    }
    out
}

fn binom(n: u32, k: u32) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r *= (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// Substitutes `a_{i,n} → a_{i,n} + shift_i · w^{-n}` in the monomial `m`.
///
/// With `shift = −c` this is `E^+(α, w)`; with `shift = c` and `w = 1` it is the
/// annihilation exponential adjoint to `E^-`.
pub(crate) fn substitute(m: &[Osc], shift: &[f64], w: Complex64) -> Vec<(Chiral, Complex64)> {
    let mut acc: Vec<(Chiral, Complex64)> = vec![(Vec::new(), Complex64::new(1.0, 0.0))];
    for (o, k) in runs(m) {
        let x = w.powi(-(o.mode as i32)) * shift[o.dir as usize];
        let mut next = Vec::with_capacity(acc.len() * (k as usize + 1));
        for (base, c) in &acc {
            for keep in 0..=k {
                let f = if keep == k { Complex64::new(1.0, 0.0) } else { x.powu(k - keep) };
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut b = base.clone();
                b.extend(std::iter::repeat(o).take(keep as usize));
                next.push((b, c * f * binom(k, keep)));
            }
        }
        acc = next;
    }
    acc
}

/// Level-resolved terms of `E^-(α, w) = exp(Σ η_i c_i w^n a_{i,n} / n)`.
pub(crate) struct CreationTable {
    pub by_level: Vec<Vec<(Chiral, Complex64)>>,
}

impl CreationTable {
    pub fn new(c: &[f64], signs: &[f64], w: Complex64, max_level: u32) -> Self {
        let by_level = (0..=max_level).map(|d| creation_level(c, signs, w, d)).collect();
        CreationTable { by_level }
    }

    pub fn level(&self, d: u32) -> &[(Chiral, Complex64)] {
        self.by_level.get(d as usize).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// The part of `E^-` raising the level by exactly `d`.
pub(crate) fn creation_level(c: &[f64], signs: &[f64], w: Complex64, d: u32) -> Vec<(Chiral, Complex64)> {
    let dims = c.len();
    if d == 0 {
        return vec![(Vec::new(), Complex64::new(1.0, 0.0))];
    }
    let mut out = Vec::new();
    for m in oscillator_multisets(dims, d) {
        let mut coef = Complex64::new(1.0, 0.0);
        for (o, k) in runs(&m) {
            let i = o.dir as usize;
            let x = w.powu(o.mode) * (signs[i] * c[i] / o.mode as f64);
            coef *= x.powu(k) / factorial(k);
        }
        if coef != Complex64::new(0.0, 0.0) {
            out.push((m, coef));
        }
    }
    out
}

/// `⟨m, m⟩ = ∏ k! (n η)^k` for a one-sided monomial.
pub(crate) fn chiral_norm_sq(m: &[Osc], signs: &[f64]) -> f64 {
    runs(m)
        .iter()
        .map(|(o, k)| factorial(*k) * (o.mode as f64 * signs[o.dir as usize]).powi(*k as i32))
        .product()
}

/// Pairing of two one-sided states given as term lists.
pub(crate) fn chiral_pairing(x: &[(Chiral, Complex64)], y: &[(Chiral, Complex64)], signs: &[f64]) -> Complex64 {
    let map: HashMap<&Chiral, Complex64> = {
        let mut m: HashMap<&Chiral, Complex64> = HashMap::new();
        for (k, v) in y {
            *m.entry(k).or_default() += v;
        }
        m
    };
    let mut s = Complex64::new(0.0, 0.0);
    for (k, v) in x {
        if let Some(b) = map.get(k) {
            s += v.conj() * b * chiral_norm_sq(k, signs);
        }
    }
    s
}

/// `Γ(κ + k) / (Γ(κ) k!)` for real `κ`.
pub(crate) fn rising_binomial(kappa: f64, k: u32) -> f64 {
    let mut r = 1.0;
    for m in 0..k {
        r *= (kappa + m as f64) / (m + 1) as f64;
    }
    r
}

/// `⟨E^-_d x, E^-_{d'} y⟩` through the adjoint relation
/// `⟨E^-(t)x, E^-(s)y⟩ = (1 − t̄s)^{−κ} ⟨P(s̄)x, P(t̄)y⟩` with `P` the annihilation exponential.
pub(crate) struct CreationGram {
    kappa: f64,
    signs: Vec<f64>,
    /// `lowered[j][i]`: level-`i`-lowering part of `P` applied to term `j`.
    lowered: Vec<Vec<Vec<(Chiral, Complex64)>>>,
    levels: Vec<u32>,
}

impl CreationGram {
    pub fn new(terms: &[Chiral], c: &[f64], signs: &[f64]) -> Self {
        let kappa = c.iter().zip(signs).map(|(x, s)| s * x * x).sum();
        let mut lowered = Vec::new();
        let mut levels = Vec::new();
        for t in terms {
            let l = level(t);
            let mut by: Vec<Vec<(Chiral, Complex64)>> = vec![Vec::new(); l as usize + 1];
            for (m, coef) in substitute(t, c, Complex64::new(1.0, 0.0)) {
                by[(l - level(&m)) as usize].push((m, coef));
            }
            lowered.push(by);
            levels.push(l);
        }
        CreationGram { kappa, signs: signs.to_vec(), lowered, levels }
    }

    /// `⟨E^-_{dj} t_j, E^-_{dk} t_k⟩`.
    pub fn pair(&self, j: usize, dj: u32, k: usize, dk: u32) -> Complex64 {
        if self.levels[j] + dj != self.levels[k] + dk {
            return Complex64::new(0.0, 0.0);
        }
        let mut s = Complex64::new(0.0, 0.0);
        for q in 0..=dj.min(dk) {
            let (a, b) = ((dk - q) as usize, (dj - q) as usize);
            if a >= self.lowered[j].len() || b >= self.lowered[k].len() {
                continue;
            }
            let g = chiral_pairing(&self.lowered[j][a], &self.lowered[k][b], &self.signs);
            if g != Complex64::new(0.0, 0.0) {
                s += g * rising_binomial(self.kappa, q);
            }
        }
        s
    }
}

/// Levels `0..=max` of one-sided monomials with an index per level.
pub(crate) struct ChiralSpace {
    pub levels: Vec<Vec<Chiral>>,
    index: Vec<HashMap<Chiral, usize>>,
}

impl ChiralSpace {
    pub fn new(dims: usize, max: u32) -> Self {
        let levels: Vec<Vec<Chiral>> = (0..=max)
            .map(|d| if dims == 0 && d > 0 { Vec::new() } else { oscillator_multisets(dims, d) })
            .collect();
        let index = levels.iter().map(|l| l.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect()).collect();
        ChiralSpace { levels, index }
    }

    pub fn dim(&self, d: u32) -> usize {
        self.levels.get(d as usize).map_or(0, |l| l.len())
    }

    pub fn max_level(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    fn idx(&self, m: &Chiral) -> Option<(u32, usize)> {
        let d = level(m);
        self.index.get(d as usize).and_then(|h| h.get(m)).map(|&i| (d, i))
    }
}

/// A one-sided operator as blocks between levels, `blocks[(n_in, n_out)]`.
pub(crate) struct ChiralOp {
    pub blocks: HashMap<(u32, u32), DMatrix<Complex64>>,
}

impl ChiralOp {
    fn from_columns(space: &ChiralSpace, max_in: u32, max_out: u32, mut col: impl FnMut(&Chiral) -> Vec<(Chiral, Complex64)>) -> Self {
        let mut blocks: HashMap<(u32, u32), DMatrix<Complex64>> = HashMap::new();
        for n_in in 0..=max_in.min(space.max_level()) {
            for (j, m) in space.levels[n_in as usize].iter().enumerate() {
                for (out, c) in col(m) {
                    let Some((n_out, i)) = space.idx(&out) else { continue };
                    if n_out > max_out {
                        continue;
                    }
                    let b = blocks
                        .entry((n_in, n_out))
                        .or_insert_with(|| DMatrix::zeros(space.dim(n_out), space.dim(n_in)));
                    b[(i, j)] += c;
                }
            }
        }
        ChiralOp { blocks }
    }

    /// `E^-(α,w) E^+(α,w)` restricted to levels `≤ max_in → ≤ max_out`.
    pub fn exponential(space: &ChiralSpace, c: &[f64], signs: &[f64], w: Complex64, max_in: u32, max_out: u32) -> Self {
        let table = CreationTable::new(c, signs, w, max_out);
        let shift: Vec<f64> = c.iter().map(|x| -x).collect();
        Self::from_columns(space, max_in, max_out, |m| {
            let mut out = Vec::new();
            for (rem, a) in substitute(m, &shift, w) {
                let l = level(&rem);
                if l > max_out {
                    continue;
                }
                for d in 0..=(max_out - l) {
                    for (cm, b) in table.level(d) {
                        out.push((merge(&rem, cm), a * b));
                    }
                }
            }
            out
        })
    }

    /// `Σ_n h(n) w^{-n-1}` with `h = Σ_i coeff_i e_i`; `zero_mode` is `(h, β)_p` on the sector.
    pub fn current(space: &ChiralSpace, coeff: &[f64], signs: &[f64], zero_mode: f64, w: Complex64, max_in: u32, max_out: u32) -> Self {
        Self::from_columns(space, max_in, max_out, |m| {
            let mut out = Vec::new();
            let l = level(m);
            for (o, k) in runs(m) {
                let i = o.dir as usize;
                let f = coeff[i] * o.mode as f64 * signs[i] * k as f64;
                if f != 0.0 {
                    let mut rem = m.clone();
                    let pos = rem.iter().position(|&x| x == o).unwrap();
                    rem.remove(pos);
                    out.push((rem, w.powi(-(o.mode as i32) - 1) * f));
                }
            }
            if zero_mode != 0.0 {
                out.push((m.clone(), w.inv() * zero_mode));
            }
            for n in 1..=max_out.saturating_sub(l) {
                for (i, &a) in coeff.iter().enumerate() {
                    if a != 0.0 {
                        let nm = merge(m, &[Osc { dir: i as u16, mode: n }]);
                        out.push((nm, w.powu(n - 1) * a));
                    }
                }
            }
            out
        })
    }
}
