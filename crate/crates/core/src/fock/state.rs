use super::Side;
use crate::lattice::LatticeVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

/// One oscillator `e_dir(-mode)` with `mode ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Osc {
    pub dir: u16,
    pub mode: u32,
}

/// `e^l(-n_1)… e^r(-m_1)… e_α` with sorted oscillator multisets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PBWMonomial {
    pub charge: LatticeVector,
    pub left: Vec<Osc>,
    pub right: Vec<Osc>,
}

impl PBWMonomial {
    pub fn new(charge: LatticeVector, mut left: Vec<Osc>, mut right: Vec<Osc>) -> Self {
        assert!(left.iter().chain(&right).all(|o| o.mode >= 1), "oscillator modes must be >= 1");
        left.sort_unstable();
        right.sort_unstable();
        PBWMonomial { charge, left, right }
    }

    pub fn vacuum(rank: usize) -> Self {
        PBWMonomial { charge: LatticeVector::zero(rank), left: vec![], right: vec![] }
    }

    pub fn exponential(charge: LatticeVector) -> Self {
        PBWMonomial { charge, left: vec![], right: vec![] }
    }

    pub fn left_level(&self) -> u32 {
        self.left.iter().map(|o| o.mode).sum()
    }

    pub fn right_level(&self) -> u32 {
        self.right.iter().map(|o| o.mode).sum()
    }

    pub fn side(&self, side: Side) -> &Vec<Osc> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub(crate) fn side_mut(&mut self, side: Side) -> &mut Vec<Osc> {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    /// Inserts an oscillator keeping the multiset sorted.
    pub fn insert(&mut self, side: Side, o: Osc) {
        let l = self.side_mut(side);
        let pos = l.partition_point(|&x| x <= o);
        l.insert(pos, o);
    }

    pub fn oscillator_count(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

/// `(h, h̄)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grading {
    pub h: f64,
    pub hbar: f64,
}

impl Grading {
    pub fn total(&self) -> f64 {
        self.h + self.hbar
    }

    /// `h − h̄` rounded to the nearest integer.
    pub fn spin(&self) -> i64 {
        (self.h - self.hbar).round() as i64
    }

    pub fn approx_eq(&self, other: &Grading, tol: f64) -> bool {
        (self.h - other.h).abs() <= tol && (self.hbar - other.hbar).abs() <= tol
    }
}

/// A finite complex combination of monomials; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockState {
    terms: BTreeMap<PBWMonomial, Complex64>,
}

impl FockState {
    pub fn zero() -> Self {
        FockState { terms: BTreeMap::new() }
    }

    pub fn vacuum(rank: usize) -> Self {
        Self::from_monomial(PBWMonomial::vacuum(rank))
    }

    pub fn from_monomial(m: PBWMonomial) -> Self {
        let mut s = Self::zero();
        s.add_term(m, Complex64::new(1.0, 0.0));
        s
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (PBWMonomial, Complex64)>) -> Self {
        let mut s = Self::zero();
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub(crate) fn from_map(map: HashMap<PBWMonomial, Complex64>) -> Self {
        FockState { terms: map.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0)).collect() }
    }

    pub fn add_term(&mut self, m: PBWMonomial, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == Complex64::new(0.0, 0.0) {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PBWMonomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &PBWMonomial) -> Option<Complex64> {
        self.terms.get(m).copied()
    }

    /// Coefficient of the vacuum monomial.
    pub fn vacuum_coefficient(&self, rank: usize) -> Complex64 {
        self.coefficient(&PBWMonomial::vacuum(rank)).unwrap_or_default()
    }

    pub fn scale(&self, c: Complex64) -> FockState {
        FockState::from_terms(self.terms.iter().map(|(m, v)| (m.clone(), v * c)))
    }

    pub fn add(&self, other: &FockState) -> FockState {
        let mut s = self.clone();
        for (m, c) in other.iter() {
            s.add_term(m.clone(), *c);
        }
        s
    }

    pub fn sub(&self, other: &FockState) -> FockState {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Drops terms with `|c| ≤ eps`.
    pub fn prune(&self, eps: f64) -> FockState {
        FockState { terms: self.terms.iter().filter(|(_, c)| c.norm() > eps).map(|(m, c)| (m.clone(), *c)).collect() }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn monomials(&self) -> impl Iterator<Item = &PBWMonomial> {
        self.terms.keys()
    }
}
