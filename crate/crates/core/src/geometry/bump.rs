use super::GeometryError;
use std::sync::OnceLock;

/// Largest derivative order accepted by [`bump_derivative`].
pub const BUMP_DERIVATIVE_CAP: usize = 8;

/// `g_+^{(l)} = Σ_k α_k h_{j_k} g_+` with `h_j(s) = (s + 1)^{-j}` and `g_+(s) = e^{-1/(2(s+1))}`.
///
/// Terms are kept unmerged, one per branch of the product rule.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpFunction {
    pub order: usize,
    pub terms: Vec<(f64, u32)>,
}

impl BumpFunction {
    pub fn g_plus(order: usize) -> Self {
        BumpFunction { order, terms: g_plus_terms(order) }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn max_power(&self) -> u32 {
        self.terms.iter().map(|t| t.1).max().unwrap_or(0)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.iter().map(|t| t.0.abs()).fold(0.0, f64::max)
    }

    /// Value at `s > −1`; zero elsewhere.
    pub fn eval(&self, s: f64) -> f64 {
        if s <= -1.0 {
            return 0.0;
        }
        let u = s + 1.0;
        let (lu, g) = (u.ln(), -0.5 / u);
        self.terms.iter().map(|&(a, j)| a * (g - j as f64 * lu).exp()).sum()
    }
}

/// Symbolic terms of `g_+^{(l)}`; `(α, j) ↦ (−jα, j + 1), (α/2, j + 2)` per derivative.
pub fn g_plus_terms(l: usize) -> Vec<(f64, u32)> {
    if l == 0 {
        return vec![(1.0, 0)];
    }
    let mut terms = vec![(0.5, 2u32)];
    for _ in 1..l {
        let mut next = Vec::with_capacity(2 * terms.len());
        for &(a, j) in &terms {
            next.push((-(j as f64) * a, j + 1));
            next.push((0.5 * a, j + 2));
        }
        terms = next;
    }
    terms
}

pub fn g_plus_derivative(l: usize, s: f64) -> f64 {
    BumpFunction::g_plus(l).eval(s)
}

/// `g_-^{(l)}(s) = (−1)^l g_+^{(l)}(−s)`, nonzero for `s < 1`.
pub fn g_minus_derivative(l: usize, s: f64) -> f64 {
    let v = g_plus_derivative(l, -s);
    if l % 2 == 0 {
        v
    } else {
        -v
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |r, i| r * (n - i) as f64 / (i + 1) as f64)
}

/// `φ^{(k)}` for the standard bump `φ(s) = e^{1/(s²−1)}` on `(−1, 1)`.
fn phi_derivative(k: usize, s: f64) -> f64 {
    if s <= -1.0 || s >= 1.0 {
        return 0.0;
    }
    let gp: Vec<BumpFunction> = (0..=k).map(BumpFunction::g_plus).collect();
    (0..=k)
        .map(|j| {
            let gm = gp[k - j].eval(-s) * if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
            binom(k, j) * gp[j].eval(s) * gm
        })
        .sum()
}

fn phi(s: f64) -> f64 {
    if s <= -1.0 || s >= 1.0 {
        0.0
    } else {
        (1.0 / (s * s - 1.0)).exp()
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 50)
}

const QUAD_TOL: f64 = 1e-13;

/// `∫ φ` over `ℝ`.
pub fn psi_normalization() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| integrate(&phi, -1.0, 1.0, QUAD_TOL))
}

fn psi(s: f64) -> f64 {
    if s <= -1.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else if s <= 0.0 {
        integrate(&phi, -1.0, s, QUAD_TOL) / psi_normalization()
    } else {
        1.0 - integrate(&phi, s, 1.0, QUAD_TOL) / psi_normalization()
    }
}

/// `ψ̃(s) = ψ(s) − ψ(s − 3)`, supported in `[−1, 4]`.
pub fn bump_psi_tilde(s: f64) -> f64 {
    psi(s) - psi(s - 3.0)
}

/// `ψ̃^{(m)}(s)` from the symbolic derivatives of `g_±`.
pub fn bump_derivative(m: usize, s: f64) -> Result<f64, GeometryError> {
    if m > BUMP_DERIVATIVE_CAP {
        return Err(GeometryError::CapExceeded(m));
    }
    if m == 0 {
        return Ok(bump_psi_tilde(s));
    }
    Ok((phi_derivative(m - 1, s) - phi_derivative(m - 1, s - 3.0)) / psi_normalization())
}
