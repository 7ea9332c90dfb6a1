use super::GeometryError;
use num_complex::Complex64;

const POLE_EPS: f64 = 1e-300;

/// A normalized representative of an element of `PSL(2, ℂ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MoebiusMap {
    /// Rescales `[[a, b], [c, d]]` to determinant one.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, GeometryError> {
        let det = a * d - b * c;
        if det.norm() < POLE_EPS {
            return Err(GeometryError::Singular);
        }
        let s = det.sqrt();
        Ok(MoebiusMap { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    fn raw(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        MoebiusMap { a, b, c, d }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self::raw(o, z, z, o)
    }

    /// `ζ ↦ ζ + t`.
    pub fn translation(t: Complex64) -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self::raw(o, t, z, o)
    }

    /// `ζ ↦ e^{iλ} ζ`.
    pub fn rotation(lambda: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::raw(Complex64::from_polar(1.0, lambda / 2.0), z, z, Complex64::from_polar(1.0, -lambda / 2.0))
    }

    /// `ζ ↦ e^{λ} ζ`.
    pub fn dilation(lambda: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::raw(Complex64::new((lambda / 2.0).exp(), 0.0), z, z, Complex64::new((-lambda / 2.0).exp(), 0.0))
    }

    /// The dilation flowing from `1` to `−1` along the unit circle picture.
    pub fn ns_dilation(lambda: f64) -> Self {
        let (ch, sh) = ((lambda / 2.0).cosh(), (lambda / 2.0).sinh());
        Self::raw(Complex64::new(ch, 0.0), Complex64::new(-sh, 0.0), Complex64::new(-sh, 0.0), Complex64::new(ch, 0.0))
    }

    /// `ζ ↦ −1/ζ`.
    pub fn inversion() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self::raw(z, o, -o, z)
    }

    /// `(1/√2) [[1, −1], [1, 1]]`, sending `1, ∞, −1` to `0, 1, ∞`.
    pub fn rotation_cayley() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::raw(s, -s, s, s)
    }

    pub fn inverse(&self) -> Self {
        Self::raw(self.d, -self.b, -self.c, self.a)
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &MoebiusMap) -> Self {
        Self::raw(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Entrywise distance to `other` up to the sign ambiguity of `PSL(2, ℂ)`.
    pub fn distance(&self, o: &MoebiusMap) -> f64 {
        let d = |s: f64| {
            [(self.a - o.a * s), (self.b - o.b * s), (self.c - o.c * s), (self.d - o.d * s)]
                .iter()
                .map(|x| x.norm())
                .fold(0.0, f64::max)
        };
        d(1.0).min(d(-1.0))
    }
}

/// `(γζ, dγ/dζ)` with `dγ/dζ = (cζ + d)^{-2}`.
pub fn moebius_apply(g: &MoebiusMap, z: Complex64) -> Result<(Complex64, Complex64), GeometryError> {
    let den = g.c * z + g.d;
    if den.norm() < POLE_EPS {
        return Err(GeometryError::PoleHit);
    }
    let det = g.det();
    Ok(((g.a * z + g.b) / den, det / (den * den)))
}

/// `𝔠(ω) = (1 + ω)/(1 − ω)`.
pub fn cayley(w: Complex64) -> Result<Complex64, GeometryError> {
    let den = Complex64::new(1.0, 0.0) - w;
    if den.norm() < POLE_EPS {
        return Err(GeometryError::PoleHit);
    }
    Ok((Complex64::new(1.0, 0.0) + w) / den)
}

/// `𝔠⁻¹(ζ) = (ζ − 1)/(ζ + 1)`.
pub fn cayley_inv(z: Complex64) -> Result<Complex64, GeometryError> {
    let den = z + 1.0;
    if den.norm() < POLE_EPS {
        return Err(GeometryError::PoleHit);
    }
    Ok((z - 1.0) / den)
}

/// `𝔍(ω) = 2 / ((1 − ω)(1 + ω))`.
pub fn jacobian_j(w: Complex64) -> Result<Complex64, GeometryError> {
    let den = (Complex64::new(1.0, 0.0) - w) * (Complex64::new(1.0, 0.0) + w);
    if den.norm() < POLE_EPS {
        return Err(GeometryError::PoleHit);
    }
    Ok(Complex64::new(2.0, 0.0) / den)
}

/// The time reflection `θω = −ω̄`.
pub fn theta_reflect(w: Complex64) -> Complex64 {
    -w.conj()
}

/// Stereographic projection of `ζ = τ + iξ` onto the unit sphere.
pub fn stereographic(z: Complex64) -> [f64; 3] {
    let (t, x) = (z.re, z.im);
    let n = 1.0 + t * t + x * x;
    [2.0 * t / n, 2.0 * x / n, (t * t + x * x - 1.0) / n]
}
