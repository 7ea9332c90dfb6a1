//! Human-editable model files.
//!
//! ```text
//! # II_{1,1} at R = 1.3
//! name = ii11-r1.3
//! gram = 0 1 1 0
//! boost_R = 1.3
//! tolerance = 1e-12
//! ```
//!
//! `gram` and `polarization_matrix` are row-major; exactly one of
//! `polarization_matrix` and `boost_R` must be present.

use super::{boost_polarization_rank2_with_tol, new_even_lattice, LatticeError, Model, Polarization, DEFAULT_TOL};
use nalgebra::DMatrix;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("cannot read model file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("gram has {0} entries, which is not a perfect square")]
    NotSquare(usize),
    #[error("exactly one of `polarization_matrix` and `boost_R` is required")]
    PolarizationChoice,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

const KEYS: [&str; 5] = ["name", "gram", "polarization_matrix", "boost_R", "tolerance"];

/// Parses model text.
pub fn parse_model(text: &str) -> Result<Model, ModelFileError> {
    let mut fields: Vec<(&str, &str)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ModelFileError::Syntax { line: idx + 1 })?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(ModelFileError::UnknownKey { line: idx + 1, key: k.into() });
        }
        if fields.iter().any(|(kk, _)| *kk == k) {
            return Err(ModelFileError::DuplicateKey { line: idx + 1, key: k.into() });
        }
        fields.push((k, v));
    }
    let get = |k: &str| fields.iter().find(|(kk, _)| *kk == k).map(|(_, v)| *v);
    let gram_vals: Vec<i64> = numbers(get("gram").ok_or(ModelFileError::Missing("gram"))?, "gram")?;
    let n = (gram_vals.len() as f64).sqrt().round() as usize;
    if n * n != gram_vals.len() || n == 0 {
        return Err(ModelFileError::NotSquare(gram_vals.len()));
    }
    let gram: Vec<Vec<i64>> = gram_vals.chunks(n).map(|c| c.to_vec()).collect();
    let lat = new_even_lattice(gram)?;
    let tol = match get("tolerance") {
        Some(v) => scalar(v, "tolerance")?,
        None => DEFAULT_TOL,
    };
    let pol = match (get("polarization_matrix"), get("boost_R")) {
        (Some(m), None) => {
            let vals: Vec<f64> = numbers(m, "polarization_matrix")?;
            if vals.len() != n * n {
                return Err(LatticeError::RankMismatch { expected: n * n, got: vals.len() }.into());
            }
            Polarization::new(&lat, DMatrix::from_row_slice(n, n, &vals), tol)?
        }
        (None, Some(r)) => boost_polarization_rank2_with_tol(&lat, scalar(r, "boost_R")?, tol)?,
        _ => return Err(ModelFileError::PolarizationChoice),
    };
    let name = get("name").unwrap_or("model").to_string();
    Ok(Model::new(name, lat, pol))
}

/// Reads and parses a model file.
pub fn load_model(path: &Path) -> Result<Model, ModelFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ModelFileError::Io { path: path.display().to_string(), source })?;
    parse_model(&text)
}

fn numbers<T: std::str::FromStr>(v: &str, key: &str) -> Result<Vec<T>, ModelFileError> {
    v.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| ModelFileError::BadValue { key: key.into(), value: s.into() })
        })
        .collect()
}

fn scalar(v: &str, key: &str) -> Result<f64, ModelFileError> {
    v.parse::<f64>().map_err(|_| ModelFileError::BadValue { key: key.into(), value: v.into() })
}
