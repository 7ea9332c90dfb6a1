//! Schwinger functions: truncated mode sums in the radial domain, the free-field closed
//! form and the Möbius covariance transform.

mod closed;
mod fast;

pub use closed::{closed_form_decompose, schwinger_closed_form, ClosedTerm, MAX_CURRENTS};

use crate::fock::FockState;
use crate::geometry::{moebius_apply, MoebiusMap};
use crate::lattice::{LatticeVector, Model};
use crate::vertex::{apply_vertex, SymbolKind, VertexError, VertexSymbol, CUTOFF_SLACK};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrelatorError {
    #[error("points are not radially ordered |ζ_1| > … > |ζ_n| > 0")]
    NotRadiallyOrdered,
    #[error("points {0} and {1} coincide")]
    CoincidingPoints(usize, usize),
    #[error("intermediate charge sector of weight {weight} lies above the cutoff {cutoff}")]
    ChargeOverflow { weight: f64, cutoff: f64 },
    #[error("{insertions} insertions for {points} points")]
    LengthMismatch { insertions: usize, points: usize },
    #[error("insertion {0} has no closed form")]
    Unsupported(usize),
    #[error("more than {MAX_CURRENTS} currents")]
    TooManyCurrents,
    #[error("point {0} is sent to infinity")]
    PointSentToInfinity(usize),
    #[error(transparent)]
    Vertex(#[from] VertexError),
}

/// An ordered list of points in `ℂ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Configuration {
    pub points: Vec<Complex64>,
}

impl Configuration {
    /// Fails unless the points are pairwise distinct.
    pub fn new(points: Vec<Complex64>) -> Result<Self, CorrelatorError> {
        for j in 0..points.len() {
            for k in (j + 1)..points.len() {
                if points[j] == points[k] {
                    return Err(CorrelatorError::CoincidingPoints(j, k));
                }
            }
        }
        Ok(Configuration { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_radially_ordered(&self) -> bool {
        self.points.windows(2).all(|w| w[0].norm() > w[1].norm()) && self.points.last().map_or(true, |z| z.norm() > 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchwingerValue {
    pub value: Complex64,
    /// `|S_H − S_{H−1}|`.
    pub truncation_error: f64,
    pub cutoff: f64,
}

fn check_lengths(ins: &[VertexSymbol], cfg: &Configuration) -> Result<(), CorrelatorError> {
    if ins.len() != cfg.len() {
        return Err(CorrelatorError::LengthMismatch { insertions: ins.len(), points: cfg.len() });
    }
    Ok(())
}

/// The single charge of a symbol, if it has one.
fn single_charge(model: &Model, s: &VertexSymbol) -> Option<LatticeVector> {
    let c = s.charges(model);
    if c.len() == 1 {
        c.into_iter().next()
    } else {
        None
    }
}

/// `⟨𝟏, Y(a_1, ζ_1) … Y(a_n, ζ_n) 𝟏⟩` truncated to intermediate weights `h + h̄ ≤ H`.
///
/// Exponentials and currents go through a level-block recursion on each chiral half;
/// descendants go through [`schwinger_truncated_general`].
pub fn schwinger_truncated(model: &Model, ins: &[VertexSymbol], cfg: &Configuration, cutoff: f64) -> Result<SchwingerValue, CorrelatorError> {
    check_lengths(ins, cfg)?;
    if !cfg.is_radially_ordered() {
        return Err(CorrelatorError::NotRadiallyOrdered);
    }
    let simple = ins.iter().all(|s| !matches!(s.kind, SymbolKind::Descendant(_)));
    if !simple {
        return schwinger_truncated_general(model, ins, cfg, cutoff);
    }
    let charges: Vec<LatticeVector> = ins.iter().map(|s| single_charge(model, s).expect("simple symbols carry one charge")).collect();
    let total = charges.iter().fold(LatticeVector::zero(model.rank()), |acc, a| &acc + a);
    if !total.is_zero() {
        return Ok(SchwingerValue { value: Complex64::new(0.0, 0.0), truncation_error: 0.0, cutoff });
    }
    check_sectors(model, &charges, cutoff)?;
    let (v, v_prev) = fast::truncated_pair(model, ins, &charges, &cfg.points, cutoff);
    Ok(SchwingerValue { value: v, truncation_error: (v - v_prev).norm(), cutoff })
}

/// Weights of the sectors `α_k + … + α_n` must fit under the cutoff.
fn check_sectors(model: &Model, charges: &[LatticeVector], cutoff: f64) -> Result<(), CorrelatorError> {
    let mut acc = LatticeVector::zero(model.rank());
    for a in charges.iter().rev() {
        acc = &acc + a;
        let (h, hb) = model.sector_weights(&acc);
        if h + hb > cutoff + CUTOFF_SLACK {
            return Err(CorrelatorError::ChargeOverflow { weight: h + hb, cutoff });
        }
    }
    Ok(())
}

/// The same truncated sum computed by applying vertex operators to Fock states right to left.
pub fn schwinger_truncated_general(model: &Model, ins: &[VertexSymbol], cfg: &Configuration, cutoff: f64) -> Result<SchwingerValue, CorrelatorError> {
    check_lengths(ins, cfg)?;
    if !cfg.is_radially_ordered() {
        return Err(CorrelatorError::NotRadiallyOrdered);
    }
    if let Some(charges) = ins.iter().map(|s| single_charge(model, s)).collect::<Option<Vec<_>>>() {
        let total = charges.iter().fold(LatticeVector::zero(model.rank()), |acc, a| &acc + a);
        if !total.is_zero() {
            return Ok(SchwingerValue { value: Complex64::new(0.0, 0.0), truncation_error: 0.0, cutoff });
        }
        check_sectors(model, &charges, cutoff)?;
    }
    let v = general_value(model, ins, &cfg.points, cutoff)?;
    let v_prev = if cutoff >= 1.0 { general_value(model, ins, &cfg.points, cutoff - 1.0)? } else { v };
    Ok(SchwingerValue { value: v, truncation_error: (v - v_prev).norm(), cutoff })
}

fn general_value(model: &Model, ins: &[VertexSymbol], points: &[Complex64], cutoff: f64) -> Result<Complex64, CorrelatorError> {
    let mut state = FockState::vacuum(model.rank());
    for (s, z) in ins.iter().zip(points).rev() {
        state = match apply_vertex(model, s, *z, &state, cutoff) {
            Ok(v) => v,
            Err(VertexError::CutoffTooSmall { .. }) => return Ok(Complex64::new(0.0, 0.0)),
            Err(e) => return Err(e.into()),
        };
        if state.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
    }
    Ok(state.vacuum_coefficient(model.rank()))
}

/// `∏_j (γ′(ζ_j))^{h_j} conj(γ′(ζ_j))^{h̄_j} · S(γζ_1, …, γζ_n)`.
pub fn moebius_pushforward(
    f: &dyn Fn(&Configuration) -> Result<Complex64, CorrelatorError>,
    gamma: &MoebiusMap,
    ins: &[VertexSymbol],
    cfg: &Configuration,
) -> Result<Complex64, CorrelatorError> {
    check_lengths(ins, cfg)?;
    let mut pts = Vec::with_capacity(cfg.len());
    let mut factor = Complex64::new(1.0, 0.0);
    for (j, (z, s)) in cfg.points.iter().zip(ins).enumerate() {
        let (w, d) = moebius_apply(gamma, *z).map_err(|_| CorrelatorError::PointSentToInfinity(j))?;
        if !w.is_finite() {
            return Err(CorrelatorError::PointSentToInfinity(j));
        }
        factor *= covariance_factor(d, s.grading.h, s.grading.hbar);
        pts.push(w);
    }
    Ok(factor * f(&Configuration::new(pts)?)?)
}

/// `d^h d̄^{h̄}` as `|d|^{2h̄} d^{h−h̄}`.
pub fn covariance_factor(d: Complex64, h: f64, hbar: f64) -> Complex64 {
    let spin = (h - hbar).round() as i32;
    d.powi(spin) * d.norm().powf(2.0 * hbar)
}
