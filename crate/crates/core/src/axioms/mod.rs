//! Numerical checks of unitarity and the conformal OS properties, each producing a
//! serializable [`CheckReport`].
//!
//! Smeared statements are checked by point evaluation; reports carry the label
//! [`POINTWISE_PROXY`] where this applies.

mod clustering;
mod energy;
mod invariance;
mod positivity;
mod spectrum;

pub use clustering::{check_clustering, ClusterFamily, CLUSTER_GRID};
pub use energy::{check_energy_bounds, check_peb_estimate, EnergyFit, PEB_GRID, PEB_MAX_EXPONENT};
pub use invariance::{
    all_transpositions, check_conformal_covariance, check_inversion_identity, check_symmetry, check_ward_identities,
    random_permutations, sample_gamma, GammaClass,
};
pub use positivity::{check_reflection_positivity, RpFamily};
pub use spectrum::{check_spectral_density, check_unitarity, UNITARITY_MAX_CUTOFF};

use crate::correlators::{schwinger_closed_form, schwinger_truncated, Configuration, CorrelatorError};
use crate::lattice::{LatticeError, Model};
use crate::vertex::{VertexError, VertexSymbol};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

/// Version of the report layout.
pub const REPORT_SCHEMA: u32 = 1;

/// Label attached to checks that replace smeared test functions by point evaluation.
pub const POINTWISE_PROXY: &str = "pointwise proxy";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AxiomError {
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("cutoff {cutoff} exceeds the configured maximum {max}")]
    CutoffTooLarge { cutoff: f64, max: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Correlator(#[from] CorrelatorError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Vertex(#[from] VertexError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported without a pass/fail claim.
    Informational,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Only [`Verdict::Fail`] counts as a failure.
    pub fn is_ok(self) -> bool {
        self != Verdict::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: u32,
    pub check: String,
    pub params: Value,
    pub metrics: Map<String, Value>,
    pub tolerance: Map<String, Value>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: &str, params: Value) -> Self {
        CheckReport {
            schema: REPORT_SCHEMA,
            check: check.into(),
            params,
            metrics: Map::new(),
            tolerance: Map::new(),
            verdict: Verdict::Fail,
            notes: Vec::new(),
        }
    }

    /// Records a metric; non-finite floats become `null`.
    pub fn metric(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.metrics.insert(key.into(), v.into());
        self
    }

    pub fn tol(&mut self, key: &str, v: f64) -> &mut Self {
        self.tolerance.insert(key.into(), v.into());
        self
    }

    pub fn note(&mut self, s: &str) -> &mut Self {
        self.notes.push(s.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_ok()
    }
}

/// How Schwinger functions are evaluated inside a check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    ClosedForm,
    Truncated { cutoff: f64 },
}

impl Evaluation {
    pub fn eval(&self, model: &Model, ins: &[VertexSymbol], cfg: &Configuration) -> Result<Complex64, CorrelatorError> {
        match *self {
            Evaluation::ClosedForm => schwinger_closed_form(model, ins, cfg),
            Evaluation::Truncated { cutoff } => Ok(schwinger_truncated(model, ins, cfg, cutoff)?.value),
        }
    }
}

/// `|a − b| / max(|a|, |b|)`, zero when both vanish.
pub(crate) fn rel_dev(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

pub(crate) fn complex_json(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

pub(crate) fn points_json(pts: &[Complex64]) -> Value {
    Value::Array(pts.iter().map(|z| complex_json(*z)).collect())
}

pub(crate) fn symbols_json(ins: &[VertexSymbol]) -> Value {
    Value::Array(ins.iter().map(|s| Value::String(symbol_label(s))).collect())
}

/// A short human-readable name for a symbol.
pub fn symbol_label(s: &VertexSymbol) -> String {
    use crate::vertex::SymbolKind;
    match &s.kind {
        SymbolKind::Exponential(a) if a.is_zero() => "1".into(),
        SymbolKind::Exponential(a) => format!("e{:?}", a.0),
        SymbolKind::CurrentLeft(h) => format!("J{h:?}"),
        SymbolKind::CurrentRight(h) => format!("Jbar{h:?}"),
        SymbolKind::Descendant(st) => format!("desc[{} terms; h={}, hbar={}]", st.len(), s.grading.h, s.grading.hbar),
    }
}
