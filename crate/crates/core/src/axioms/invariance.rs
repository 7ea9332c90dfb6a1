use super::{points_json, rel_dev, symbols_json, AxiomError, CheckReport, Evaluation, Verdict};
use crate::correlators::{moebius_pushforward, schwinger_closed_form, schwinger_truncated, Configuration, CorrelatorError};
use crate::geometry::MoebiusMap;
use crate::lattice::Model;
use crate::vertex::{SymbolKind, VertexError, VertexSymbol};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::BTreeMap;

pub fn all_transpositions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, j);
            out.push(p);
        }
    }
    out
}

pub fn random_permutations(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    (0..count)
        .map(|_| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            p
        })
        .collect()
}

/// Compares `S` with its permuted versions on the closed form, and with the vacuum appended
/// on both the closed form and, when possible, the truncated series.
pub fn check_symmetry(
    model: &Model,
    ins: &[VertexSymbol],
    cfg: &Configuration,
    perms: &[Vec<usize>],
    tol: f64,
    vacuum_tol: f64,
) -> Result<CheckReport, AxiomError> {
    let base = schwinger_closed_form(model, ins, cfg)?;
    let mut max_dev = 0.0f64;
    for p in perms {
        if p.len() != ins.len() {
            return Err(AxiomError::InvalidInput(format!("permutation of length {} for {} insertions", p.len(), ins.len())));
        }
        let pi: Vec<VertexSymbol> = p.iter().map(|&k| ins[k].clone()).collect();
        let pc = Configuration::new(p.iter().map(|&k| cfg.points[k]).collect())?;
        max_dev = max_dev.max(rel_dev(schwinger_closed_form(model, &pi, &pc)?, base));
    }
    // the vacuum goes inside the innermost circle so the radial order survives
    let inner = cfg.points.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let vac_point = Complex64::from_polar(0.5 * inner.min(1.0), 0.3);
    let mut vins = ins.to_vec();
    vins.push(VertexSymbol::vacuum(model));
    let mut vpts = cfg.points.clone();
    vpts.push(vac_point);
    let vcfg = Configuration::new(vpts)?;
    let mut vac_dev = (schwinger_closed_form(model, &vins, &vcfg)? - base).norm();
    let simple = ins.iter().all(|s| !matches!(s.kind, SymbolKind::Descendant(_)));
    let mut truncated_checked = false;
    if simple && cfg.is_radially_ordered() {
        let cutoff = 4.0;
        match (schwinger_truncated(model, ins, cfg, cutoff), schwinger_truncated(model, &vins, &vcfg, cutoff)) {
            (Ok(a), Ok(b)) => {
                vac_dev = vac_dev.max((a.value - b.value).norm());
                truncated_checked = true;
            }
            (Err(CorrelatorError::ChargeOverflow { .. }), _) | (_, Err(CorrelatorError::ChargeOverflow { .. })) => {}
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        }
    }
    let mut rep = CheckReport::new(
        "symmetry",
        json!({ "model": model.name, "insertions": symbols_json(ins), "points": points_json(&cfg.points), "permutations": perms }),
    );
    rep.metric("max_relative_deviation", max_dev)
        .metric("vacuum_deviation", vac_dev)
        .metric("vacuum_truncated_checked", truncated_checked)
        .metric("reference_value", super::complex_json(base))
        .tol("relative_deviation", tol)
        .tol("vacuum_deviation", vacuum_tol);
    rep.verdict = Verdict::from_bool(max_dev <= tol && vac_dev <= vacuum_tol);
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GammaClass {
    Translation,
    Rotation,
    Dilation,
    NsDilation,
    /// `ζ ↦ ζ/(1 − tζ)`, an inversion conjugate of a translation.
    InversionType,
}

impl GammaClass {
    pub const ALL: [GammaClass; 5] =
        [GammaClass::Translation, GammaClass::Rotation, GammaClass::Dilation, GammaClass::NsDilation, GammaClass::InversionType];

    pub fn name(self) -> &'static str {
        match self {
            GammaClass::Translation => "translation",
            GammaClass::Rotation => "rotation",
            GammaClass::Dilation => "dilation",
            GammaClass::NsDilation => "ns_dilation",
            GammaClass::InversionType => "inversion_type",
        }
    }
}

/// A random element of the given class with parameters of size at most `scale`
/// (rotation angles at most `π·min(scale, 1)`).
pub fn sample_gamma(class: GammaClass, scale: f64, rng: &mut ChaCha8Rng) -> MoebiusMap {
    let mut x = || rng.gen_range(-scale..=scale);
    match class {
        GammaClass::Translation => MoebiusMap::translation(Complex64::new(x(), x())),
        GammaClass::Rotation => MoebiusMap::rotation(std::f64::consts::PI * x().clamp(-1.0, 1.0)),
        GammaClass::Dilation => MoebiusMap::dilation(x()),
        GammaClass::NsDilation => MoebiusMap::ns_dilation(x()),
        GammaClass::InversionType => {
            let t = Complex64::new(x(), x());
            MoebiusMap::inversion().compose(&MoebiusMap::translation(-t)).compose(&MoebiusMap::inversion())
        }
    }
}

/// Compares `S(ζ)` with `∏ γ′(ζ_j)^{h_j} conj(γ′(ζ_j))^{h̄_j} S(γζ)`.
///
/// Maps sending a point to infinity, or breaking the radial order for truncated evaluation,
/// are skipped and counted.
pub fn check_conformal_covariance(
    model: &Model,
    ins: &[VertexSymbol],
    cfg: &Configuration,
    gammas: &[(GammaClass, MoebiusMap)],
    eval: Evaluation,
    tol: f64,
) -> Result<CheckReport, AxiomError> {
    if let Some(k) = ins.iter().position(|s| !s.quasi_primary) {
        return Err(AxiomError::InvalidInput(format!("insertion {k} is not quasi-primary")));
    }
    let f = |c: &Configuration| eval.eval(model, ins, c);
    let base = f(cfg)?;
    let mut per_class: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut skipped = 0usize;
    let mut used = 0usize;
    for (class, g) in gammas {
        let moved = match moebius_pushforward(&f, g, ins, cfg) {
            Ok(v) => v,
            Err(CorrelatorError::PointSentToInfinity(_)) | Err(CorrelatorError::NotRadiallyOrdered) => {
                skipped += 1;
                continue;
            }
            Err(CorrelatorError::Vertex(VertexError::CutoffTooSmall { .. })) | Err(CorrelatorError::ChargeOverflow { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        used += 1;
        let e = per_class.entry(class.name()).or_insert(0.0);
        *e = e.max(rel_dev(moved, base));
    }
    let max_dev = per_class.values().copied().fold(0.0, f64::max);
    let mut rep = CheckReport::new(
        "conformal_covariance",
        json!({ "model": model.name, "insertions": symbols_json(ins), "points": points_json(&cfg.points),
                "evaluation": eval, "maps": gammas.len() }),
    );
    rep.metric("max_relative_deviation", max_dev)
        .metric("per_class", serde_json::to_value(&per_class).expect("map of floats"))
        .metric("maps_used", used)
        .metric("maps_skipped", skipped)
        .tol("relative_deviation", tol);
    rep.verdict = Verdict::from_bool(max_dev <= tol && used > 0);
    Ok(rep)
}

/// Compares `S(ζ)` with `∏ (−1)^{h_j−h̄_j} ζ_j^{−2h_j} ζ̄_j^{−2h̄_j} S(ζ^{−1})` on the closed form.
pub fn check_inversion_identity(model: &Model, ins: &[VertexSymbol], cfg: &Configuration, tol: f64) -> Result<CheckReport, AxiomError> {
    if cfg.points.iter().any(|z| z.norm() == 0.0) {
        return Err(VertexError::ZeroPoint.into());
    }
    let lhs = schwinger_closed_form(model, ins, cfg)?;
    let inv = Configuration::new(cfg.points.iter().map(|z| 1.0 / z).collect())?;
    let mut factor = Complex64::new(1.0, 0.0);
    for (z, s) in cfg.points.iter().zip(ins) {
        let spin = s.grading.spin();
        let sign = if spin.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        factor *= z.powi(-2 * spin as i32) * z.norm().powf(-4.0 * s.grading.hbar) * sign;
    }
    let rhs = factor * schwinger_closed_form(model, ins, &inv)?;
    let dev = rel_dev(lhs, rhs);
    let mut rep = CheckReport::new(
        "inversion_identity",
        json!({ "model": model.name, "insertions": symbols_json(ins), "points": points_json(&cfg.points) }),
    );
    rep.metric("relative_deviation", dev).tol("relative_deviation", tol);
    rep.verdict = Verdict::from_bool(dev <= tol);
    Ok(rep)
}

/// `(∂_ζ f, ∂_ζ̄ f)` at point `i` by central differences.
fn wirtinger(f: &dyn Fn(&[Complex64]) -> Result<Complex64, CorrelatorError>, pts: &[Complex64], i: usize, h: f64) -> Result<(Complex64, Complex64), CorrelatorError> {
    let shifted = |d: Complex64| -> Result<Complex64, CorrelatorError> {
        let mut p = pts.to_vec();
        p[i] += d;
        f(&p)
    };
    let dx = (shifted(Complex64::new(h, 0.0))? - shifted(Complex64::new(-h, 0.0))?) / (2.0 * h);
    let dy = (shifted(Complex64::new(0.0, h))? - shifted(Complex64::new(0.0, -h))?) / (2.0 * h);
    let i_unit = Complex64::new(0.0, 1.0);
    Ok(((dx - i_unit * dy) * 0.5, (dx + i_unit * dy) * 0.5))
}

/// The six global Ward identities for quasi-primary insertions, with derivatives by central
/// differences of step `step` on the closed form.
///
/// Each residual is divided by the sum of the moduli of its terms.
pub fn check_ward_identities(model: &Model, ins: &[VertexSymbol], cfgs: &[Configuration], step: f64, tol: f64) -> Result<CheckReport, AxiomError> {
    if let Some(k) = ins.iter().position(|s| !s.quasi_primary) {
        return Err(AxiomError::InvalidInput(format!("insertion {k} is not quasi-primary")));
    }
    const NAMES: [&str; 6] = ["translation", "translation_bar", "dilation", "dilation_bar", "special", "special_bar"];
    let f = |p: &[Complex64]| schwinger_closed_form(model, ins, &Configuration { points: p.to_vec() });
    let mut worst = [0.0f64; 6];
    for cfg in cfgs {
        let pts = &cfg.points;
        let s = f(pts)?;
        let mut sums = [Complex64::new(0.0, 0.0); 6];
        let mut scales = [0.0f64; 6];
        for (i, (z, a)) in pts.iter().zip(ins).enumerate() {
            let (d, db) = wirtinger(&f, pts, i, step)?;
            let (h, hb) = (a.grading.h, a.grading.hbar);
            let zb = z.conj();
            let terms = [
                vec![d],
                vec![db],
                vec![z * d, s * h],
                vec![zb * db, s * hb],
                vec![z * z * d, s * (2.0 * h) * z],
                vec![zb * zb * db, s * (2.0 * hb) * zb],
            ];
            for (k, t) in terms.iter().enumerate() {
                for x in t {
                    sums[k] += x;
                    scales[k] += x.norm();
                }
            }
        }
        for k in 0..6 {
            let r = if scales[k] > 0.0 { sums[k].norm() / scales[k] } else { 0.0 };
            worst[k] = worst[k].max(r);
        }
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    let mut rep = CheckReport::new(
        "ward_identities",
        json!({ "model": model.name, "insertions": symbols_json(ins), "configurations": cfgs.len(), "step": step }),
    );
    let per: serde_json::Map<String, serde_json::Value> = NAMES.iter().zip(worst).map(|(n, w)| (n.to_string(), w.into())).collect();
    rep.metric("max_relative_residual", max).metric("per_identity", per).tol("relative_residual", tol);
    rep.verdict = Verdict::from_bool(max <= tol);
    Ok(rep)
}
