//! Even lattices, the sign cocycle, polarizations and lattice-point enumeration.

pub(crate) mod enumerate;
mod model;
pub mod model_file;

pub use enumerate::{enumerate_lattice_points, spectral_density_histogram, SpectralHistogram};
pub use model::Model;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Neg, Sub};
use thiserror::Error;

/// Default validation tolerance for polarizations.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("gram matrix is not square")]
    NotSquare,
    #[error("gram matrix is empty")]
    Empty,
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("NotEven: diagonal entry {index} of the gram matrix is odd")]
    NotEven { index: usize },
    #[error("gram matrix is degenerate")]
    Degenerate,
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("polarization fails {condition}: {detail}")]
    InvalidPolarization { condition: &'static str, detail: String },
    #[error("the boost chart is only defined on the lattice with gram [[0,1],[1,0]]")]
    WrongLattice,
    #[error("boost parameter must be positive, got {0}")]
    NonPositiveR(f64),
    #[error("the metric (.,.)_p is not positive definite")]
    IndefiniteMetric,
    #[error("maxNorm must be non-negative, got {0}")]
    NegativeNorm(f64),
}

/// A vector of the lattice in coordinates of the chosen basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticeVector(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn to_real(&self) -> DVector<f64> {
        DVector::from_iterator(self.0.len(), self.0.iter().map(|&x| x as f64))
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

/// An even non-degenerate lattice given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvenLattice {
    gram: Vec<Vec<i64>>,
    signature: (usize, usize),
}

impl EvenLattice {
    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// `(n_L, m_L)`: numbers of positive and negative eigenvalues of the Gram matrix.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn gram_real(&self) -> DMatrix<f64> {
        let n = self.rank();
        DMatrix::from_fn(n, n, |i, j| self.gram[i][j] as f64)
    }

    /// Integer pairing `(α, β)_lat`.
    pub fn pair(&self, a: &LatticeVector, b: &LatticeVector) -> i64 {
        pair_slices(&self.gram, &a.0, &b.0)
    }

    pub fn check_rank(&self, v: &LatticeVector) -> Result<(), LatticeError> {
        if v.rank() != self.rank() {
            return Err(LatticeError::RankMismatch { expected: self.rank(), got: v.rank() });
        }
        Ok(())
    }

    /// True for the rank-2 lattice with Gram `[[0,1],[1,0]]`.
    pub fn is_ii11(&self) -> bool {
        self.gram == vec![vec![0, 1], vec![1, 0]]
    }
}

fn pair_slices(gram: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    let mut s = 0;
    for (i, row) in gram.iter().enumerate() {
        if a[i] == 0 {
            continue;
        }
        let mut t = 0;
        for (j, g) in row.iter().enumerate() {
            t += g * b[j];
        }
        s += a[i] * t;
    }
    s
}

/// Validates a Gram matrix and returns the lattice with its signature.
pub fn new_even_lattice(gram: Vec<Vec<i64>>) -> Result<EvenLattice, LatticeError> {
    let n = gram.len();
    if n == 0 {
        return Err(LatticeError::Empty);
    }
    if gram.iter().any(|row| row.len() != n) {
        return Err(LatticeError::NotSquare);
    }
    for i in 0..n {
        for j in 0..i {
            if gram[i][j] != gram[j][i] {
                return Err(LatticeError::NotSymmetric);
            }
        }
    }
    for (i, row) in gram.iter().enumerate() {
        if row[i].rem_euclid(2) != 0 {
            return Err(LatticeError::NotEven { index: i });
        }
    }
    if integer_determinant(&gram) == 0 {
        return Err(LatticeError::Degenerate);
    }
    let g = DMatrix::from_fn(n, n, |i, j| gram[i][j] as f64);
    let eig = SymmetricEigen::new(g);
    let pos = eig.eigenvalues.iter().filter(|&&x| x > 0.0).count();
    Ok(EvenLattice { gram, signature: (pos, n - pos) })
}

/// Exact determinant by fraction-free Bareiss elimination.
fn integer_determinant(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// The sign cocycle, stored as exponent bits on basis pairs and extended bilinearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cocycle {
    bits: Vec<Vec<u8>>,
}

impl Cocycle {
    pub fn new(lat: &EvenLattice) -> Self {
        let g = lat.gram();
        let n = lat.rank();
        let mut bits = vec![vec![0u8; n]; n];
        for i in 0..n {
            for j in 0..n {
                let e = if i == j {
                    g[i][i] / 2
                } else if i > j {
                    g[i][j]
                } else {
                    0
                };
                bits[i][j] = e.rem_euclid(2) as u8;
            }
        }
        Cocycle { bits }
    }

    /// The basis table `ε(α_i, α_j)` as signs.
    pub fn basis_signs(&self) -> Vec<Vec<i8>> {
        self.bits
            .iter()
            .map(|r| r.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.bits.len()
    }

    pub(crate) fn sign_slices(&self, a: &[i64], b: &[i64]) -> i32 {
        let mut e = 0i64;
        for (i, row) in self.bits.iter().enumerate() {
            if a[i] == 0 {
                continue;
            }
            for (j, &bit) in row.iter().enumerate() {
                if bit == 1 {
                    e += a[i] * b[j];
                }
            }
        }
        if e.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

/// `ε(α, β)` from the bilinear extension of the basis table.
pub fn cocycle_eps(c: &Cocycle, a: &LatticeVector, b: &LatticeVector) -> Result<i32, LatticeError> {
    for v in [a, b] {
        if v.rank() != c.rank() {
            return Err(LatticeError::RankMismatch { expected: c.rank(), got: v.rank() });
        }
    }
    Ok(c.sign_slices(&a.0, &b.0))
}

/// An orthonormal frame of `H_l` or `H_r` with respect to `(·,·)_p`.
///
/// `signs[i] = (e_i, e_i)_p`, which is `+1` for every valid polarization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub vectors: Vec<Vec<f64>>,
    pub signs: Vec<f64>,
}

impl Frame {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// A projection `p` on `H = L ⊗ ℝ` together with the data derived from it.
#[derive(Clone, Debug, PartialEq)]
pub struct Polarization {
    p: DMatrix<f64>,
    tol: f64,
    metric: DMatrix<f64>,
    majorant: DMatrix<f64>,
    left: Frame,
    right: Frame,
    positive: bool,
}

impl Polarization {
    /// Validates P1, P2 and P3 against the lattice.
    pub fn new(lat: &EvenLattice, p: DMatrix<f64>, tol: f64) -> Result<Self, LatticeError> {
        let pol = Self::build(lat, p, tol)?;
        if !pol.positive {
            return Err(LatticeError::InvalidPolarization {
                condition: "P3",
                detail: "(.,.)_lat is not positive on ker(1-p) and negative on ker(p)".into(),
            });
        }
        Ok(pol)
    }

    /// Validates P1 and P2 only. Used to exhibit the failure of unitarity when P3 is violated.
    pub fn new_allow_indefinite(
        lat: &EvenLattice,
        p: DMatrix<f64>,
        tol: f64,
    ) -> Result<Self, LatticeError> {
        Self::build(lat, p, tol)
    }

    fn build(lat: &EvenLattice, p: DMatrix<f64>, tol: f64) -> Result<Self, LatticeError> {
        let n = lat.rank();
        if p.nrows() != n || p.ncols() != n {
            return Err(LatticeError::RankMismatch { expected: n, got: p.nrows() });
        }
        let g = lat.gram_real();
        let scale = 1.0 + p.amax() * p.amax() * (1.0 + g.amax());
        let id = DMatrix::<f64>::identity(n, n);
        let pbar = &id - &p;
        let p1 = (&p * &p - &p).amax();
        if p1 > tol * scale {
            return Err(LatticeError::InvalidPolarization {
                condition: "P1",
                detail: format!("|p^2 - p| = {p1:e}"),
            });
        }
        let p2 = (p.transpose() * &g * &pbar).amax();
        if p2 > tol * scale {
            return Err(LatticeError::InvalidPolarization {
                condition: "P2",
                detail: format!("|(p x, pbar y)_lat| = {p2:e}"),
            });
        }
        let gl = p.transpose() * &g * &p;
        let gr = pbar.transpose() * &g * &pbar;
        let metric = &gl - &gr;
        let metric = (&metric + metric.transpose()) * 0.5;
        let eig = SymmetricEigen::new(metric.clone());
        let majorant = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::abs))
            * eig.eigenvectors.transpose();
        let min_abs = eig.eigenvalues.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        if min_abs <= tol * scale {
            return Err(LatticeError::InvalidPolarization {
                condition: "P3",
                detail: "(.,.)_p is degenerate".into(),
            });
        }
        let left = frame_from_image(&p, &metric, tol * scale);
        let right = frame_from_image(&pbar, &metric, tol * scale);
        if left.dim() + right.dim() != n {
            return Err(LatticeError::InvalidPolarization {
                condition: "P1",
                detail: "rank(p) + rank(1-p) differs from the rank".into(),
            });
        }
        let positive = eig.eigenvalues.iter().all(|&x| x > 0.0)
            && left.signs.iter().all(|&s| s > 0.0)
            && right.signs.iter().all(|&s| s > 0.0)
            && (left.dim(), right.dim()) == lat.signature();
        Ok(Polarization { p, tol, metric, majorant, left, right, positive })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Gram matrix of `(·,·)_p` in the lattice basis.
    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    /// A positive-definite form dominating `|(·,·)_p|`; equal to the metric when P3 holds.
    pub fn majorant(&self) -> &DMatrix<f64> {
        &self.majorant
    }

    pub fn left_frame(&self) -> &Frame {
        &self.left
    }

    pub fn right_frame(&self) -> &Frame {
        &self.right
    }

    /// True when P3 holds.
    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.left.dim(), self.right.dim())
    }
}

fn frame_from_image(proj: &DMatrix<f64>, metric: &DMatrix<f64>, tol: f64) -> Frame {
    let n = proj.nrows();
    let mut vectors: Vec<DVector<f64>> = Vec::new();
    let mut signs = Vec::new();
    for k in 0..n {
        let mut v: DVector<f64> = proj.column(k).into_owned();
        for (u, &s) in vectors.iter().zip(&signs) {
            let c = (v.transpose() * metric * u)[(0, 0)] * s;
            v -= u * c;
        }
        let nv = (v.transpose() * metric * &v)[(0, 0)];
        if nv.abs() > tol.max(1e-10) {
            let s = nv.signum();
            v /= nv.abs().sqrt();
            vectors.push(v);
            signs.push(s);
        }
    }
    Frame { vectors: vectors.iter().map(|v| v.iter().copied().collect()).collect(), signs }
}

/// `(h, h')_p` for real vectors in lattice coordinates.
pub fn metric_p(pol: &Polarization, h: &[f64], h2: &[f64]) -> Result<f64, LatticeError> {
    let n = pol.metric.nrows();
    for v in [h, h2] {
        if v.len() != n {
            return Err(LatticeError::RankMismatch { expected: n, got: v.len() });
        }
    }
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += h[i] * pol.metric[(i, j)] * h2[j];
        }
    }
    Ok(s)
}

/// The rank-2 chart: `H_l` is spanned by `R α_1 + R^{-1} α_2`.
pub fn boost_polarization_rank2(lat: &EvenLattice, r: f64) -> Result<Polarization, LatticeError> {
    boost_polarization_rank2_with_tol(lat, r, DEFAULT_TOL)
}

/// [`boost_polarization_rank2`] validated with tolerance `tol`.
pub fn boost_polarization_rank2_with_tol(lat: &EvenLattice, r: f64, tol: f64) -> Result<Polarization, LatticeError> {
    if !lat.is_ii11() {
        return Err(LatticeError::WrongLattice);
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(LatticeError::NonPositiveR(r));
    }
    let v = DVector::from_vec(vec![r, 1.0 / r]);
    let g = lat.gram_real();
    // orthogonal projection onto span(v); (v, v)_lat = 2
    let p = &v * (v.transpose() * &g) * 0.5;
    Polarization::new(lat, p, tol)
}

/// The lattice with Gram `[[0,1],[1,0]]`.
pub fn ii11() -> EvenLattice {
    new_even_lattice(vec![vec![0, 1], vec![1, 0]]).expect("II_{1,1} is even and unimodular")
}
