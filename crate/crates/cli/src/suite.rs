//! Default inputs for every axiom check, derived from the model and a seed.

use narain_core::axioms::*;
use narain_core::correlators::Configuration;
use narain_core::fock::{exponential_state, hermite_pair};
use narain_core::lattice::{enumerate_lattice_points, LatticeVector, Model};
use narain_core::vertex::VertexSymbol;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub const CHECKS: [&str; 10] = [
    "clustering",
    "conformal_covariance",
    "energy_bounds",
    "inversion_identity",
    "peb_estimate",
    "reflection_positivity",
    "spectral_density",
    "symmetry",
    "unitarity",
    "ward_identities",
];

/// Default tolerance per check; checks without a tunable tolerance are absent.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    [
        ("clustering", 0.15),
        ("conformal_covariance", 1e-8),
        ("inversion_identity", 1e-10),
        ("reflection_positivity", 1e-8),
        ("spectral_density", 0.5),
        ("symmetry", 1e-10),
        ("unitarity", 1e-9),
        ("ward_identities", 1e-6),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

pub const DEFAULT_UNITARITY_CUTOFF: f64 = 6.0;
pub const DEFAULT_BASIS_CUTOFF: f64 = 4.0;
const VACUUM_TOL: f64 = 1e-12;
const GAMMAS_PER_CLASS: usize = 50;
const WARD_CONFIGS: usize = 20;
const WARD_STEP: f64 = 1e-5;
const RP_SIZE: usize = 6;
const DENSITY_NMAX: usize = 20;
const DENSITY_RESIDUAL: f64 = 1.0;
const PEB_TUPLE_LEN: usize = 4;
const PEB_SAMPLES: usize = 300;

#[derive(Clone, Debug)]
pub struct Settings {
    pub cutoff: Option<f64>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
}

impl Settings {
    fn tol(&self, check: &str) -> f64 {
        self.tolerances[check]
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn weight(m: &Model, a: &LatticeVector) -> f64 {
    let (h, hb) = m.sector_weights(a);
    h + hb
}

/// Two short nonzero charges `α, β` with `β ≠ ±α` whenever the lattice allows it.
fn short_charges(m: &Model) -> Result<(LatticeVector, LatticeVector), AxiomError> {
    let mut norm = 2.0;
    loop {
        let mut pts: Vec<LatticeVector> = enumerate_lattice_points(m, norm)?.into_iter().filter(|a| !a.is_zero()).collect();
        pts.sort_by(|a, b| weight(m, a).total_cmp(&weight(m, b)).then_with(|| b.cmp(a)));
        if let Some(a) = pts.first().cloned() {
            let neg = -&a;
            if let Some(b) = pts.iter().find(|b| **b != a && **b != neg) {
                return Ok((a, b.clone()));
            }
            if m.rank() == 1 {
                return Ok((a.clone(), a));
            }
        }
        norm *= 2.0;
    }
}

fn cfg(pts: &[Complex64]) -> Configuration {
    Configuration::new(pts.to_vec()).expect("fixed configurations have distinct points")
}

pub fn run(m: &Model, check: &str, s: &Settings) -> Result<CheckReport, AxiomError> {
    let (a, b) = short_charges(m)?;
    let ab = -&(&a + &b);
    let e = |v: &LatticeVector| VertexSymbol::exponential(m, v);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    match check {
        "unitarity" => check_unitarity(m, s.cutoff.unwrap_or(DEFAULT_UNITARITY_CUTOFF), s.tol(check)),
        "symmetry" => {
            let ins = vec![e(&a), VertexSymbol::current_left(m, &m.left_unit(0))?, e(&b), e(&ab)];
            let pts = cfg(&[c(2.5, 0.3), c(-0.4, 1.0), c(0.3, -0.4), c(0.05, 0.1)]);
            check_symmetry(m, &ins, &pts, &all_transpositions(4), s.tol(check), VACUUM_TOL)
        }
        "conformal_covariance" => {
            let ins = vec![e(&a), VertexSymbol::current_right(m, &m.right_unit(0))?, e(&b), e(&ab)];
            let pts = cfg(&[c(1.4, 0.3), c(-0.6, 0.8), c(0.3, -0.7), c(-0.2, 0.1)]);
            let gammas: Vec<_> = GammaClass::ALL
                .iter()
                .flat_map(|&k| std::iter::repeat(k).take(GAMMAS_PER_CLASS))
                .map(|k| (k, sample_gamma(k, 1.0, &mut rng)))
                .collect();
            check_conformal_covariance(m, &ins, &pts, &gammas, Evaluation::ClosedForm, s.tol(check))
        }
        "inversion_identity" => {
            let ins = vec![e(&a), VertexSymbol::current_right(m, &m.right_unit(0))?, e(&b), e(&ab)];
            let pts = cfg(&[c(1.4, 0.3), c(-0.6, 0.8), c(0.3, -0.7), c(-0.2, 0.1)]);
            check_inversion_identity(m, &ins, &pts, s.tol(check))
        }
        "ward_identities" => {
            let ins = vec![e(&a), VertexSymbol::current_left(m, &m.left_unit(0))?, e(&b), e(&ab)];
            let cfgs: Vec<Configuration> = (0..WARD_CONFIGS)
                .map(|_| Configuration::new((0..4).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect()))
                .collect::<Result<_, _>>()?;
            check_ward_identities(m, &ins, &cfgs, WARD_STEP, s.tol(check))
        }
        "reflection_positivity" => {
            let pool: Vec<LatticeVector> =
                enumerate_lattice_points(m, 3.0_f64.max(2.0 * weight(m, &a)))?.into_iter().filter(|v| !v.is_zero()).collect();
            let mut fams = vec![RpFamily::vacuum()];
            while fams.len() < RP_SIZE {
                let k = rng.gen_range(1..=2);
                let mut pts: Vec<Complex64> = (0..k).map(|_| c(rng.gen_range(0.05..1.5), rng.gen_range(-1.0..1.0))).collect();
                pts.sort_by(|x, y| x.re.total_cmp(&y.re));
                let ins = (0..k)
                    .map(|_| {
                        let (u, v) = hermite_pair(m, &exponential_state(&pool[rng.gen_range(0..pool.len())]));
                        VertexSymbol::descendant(m, if rng.gen_bool(0.5) { u } else { v })
                    })
                    .collect::<Result<_, _>>()?;
                fams.push(RpFamily::new(ins, pts));
            }
            check_reflection_positivity(m, &fams, s.tol(check))
        }
        "clustering" => {
            let f = ClusterFamily { insertions: vec![e(&a)], points: vec![c(0.0, 0.0)] };
            let g = ClusterFamily { insertions: vec![e(&-&a)], points: vec![c(0.3, 0.2)] };
            check_clustering(m, &f, &g, &CLUSTER_GRID, c(1.0, 0.0), Some(weight(m, &a)), s.tol(check))
        }
        "spectral_density" => check_spectral_density(m, DENSITY_NMAX, s.tol(check), DENSITY_RESIDUAL),
        "energy_bounds" => Ok(check_energy_bounds(m, &upsilon(m)?, basis_cutoff(s))?.0),
        "peb_estimate" => {
            let ups = upsilon(m)?;
            let (_, fits) = check_energy_bounds(m, &ups, basis_cutoff(s))?;
            let fits: Vec<EnergyFit> = fits.into_iter().flatten().collect();
            if fits.len() != ups.len() {
                let mut rep = CheckReport::new("peb_estimate", serde_json::json!({ "model": m.name }));
                rep.note("energy bounds produced no constants for some symbol");
                return Ok(rep);
            }
            check_peb_estimate(m, &ups, &fits, basis_cutoff(s), PEB_TUPLE_LEN, PEB_SAMPLES, s.seed)
        }
        other => Err(AxiomError::InvalidInput(format!("unknown check `{other}`"))),
    }
}

fn basis_cutoff(s: &Settings) -> f64 {
    s.cutoff.unwrap_or(DEFAULT_BASIS_CUTOFF)
}

/// `𝟏`, one left current and the exponentials with `(α,α)_p ≤ 2`.
fn upsilon(m: &Model) -> Result<Vec<VertexSymbol>, AxiomError> {
    let mut ups = vec![VertexSymbol::vacuum(m), VertexSymbol::current_left(m, &m.left_unit(0))?];
    ups.extend(enumerate_lattice_points(m, 2.0)?.into_iter().filter(|a| !a.is_zero()).map(|a| VertexSymbol::exponential(m, &a)));
    Ok(ups)
}
