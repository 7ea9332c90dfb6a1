use narain_core::axioms::*;
use narain_core::correlators::{schwinger_closed_form, Configuration};
use narain_core::fock::{exponential_state, heisenberg_apply, norm, FockState, Osc, PBWMonomial};
use narain_core::geometry::MoebiusMap;
use narain_core::lattice::{enumerate_lattice_points, ii11, LatticeVector, Model, Polarization};
use narain_core::vertex::{mode_norm_sample, VertexSymbol};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn lv(v: &[i64]) -> LatticeVector {
    LatticeVector(v.to_vec())
}

fn cfg(pts: &[(f64, f64)]) -> Configuration {
    Configuration::new(pts.iter().map(|&(x, y)| c(x, y)).collect()).unwrap()
}

fn metric_f64(r: &CheckReport, k: &str) -> f64 {
    r.metrics[k].as_f64().unwrap_or_else(|| panic!("metric {k} missing in {:?}", r.metrics))
}

fn model() -> Model {
    Model::ii11_boost(1.3).unwrap()
}

fn pair_symbol(m: &Model, a: &LatticeVector) -> VertexSymbol {
    VertexSymbol::descendant(m, exponential_state(a).add(&exponential_state(&-a))).unwrap()
}

#[test]
fn unitarity_holds_at_the_bundled_point() {
    let r = check_unitarity(&model(), 6.0, 1e-9).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(metric_f64(&r, "min_eigenvalue") > 0.0);
    let v = check_unitarity(&model(), 0.0, 1e-9).unwrap();
    assert_eq!(v.metrics["sectors"], 1);
    assert_eq!(metric_f64(&v, "min_eigenvalue"), 1.0);
    assert!(matches!(check_unitarity(&model(), 11.0, 1e-9), Err(AxiomError::CutoffTooLarge { .. })));
}

#[test]
fn unitarity_fails_for_swapped_definiteness() {
    let lat = ii11();
    let p = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]);
    assert!(Polarization::new(&lat, p.clone(), 1e-12).is_err());
    let pol = Polarization::new_allow_indefinite(&lat, p, 1e-12).unwrap();
    let m = Model::new("swapped", lat, pol);
    let r = check_unitarity(&m, 1.0, 1e-9).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!((metric_f64(&r, "min_eigenvalue") + 1.0).abs() < 1e-12);
}

#[test]
fn symmetry_examples() {
    let m = model();
    let ins3 = vec![
        VertexSymbol::exponential(&m, &lv(&[1, 0])),
        VertexSymbol::exponential(&m, &lv(&[-1, 1])),
        VertexSymbol::exponential(&m, &lv(&[0, -1])),
    ];
    let c3 = cfg(&[(1.2, 0.4), (-0.3, 0.7), (0.2, -0.5)]);
    let id = check_symmetry(&m, &ins3, &c3, &[vec![0, 1, 2]], 1e-10, 1e-12).unwrap();
    assert_eq!(metric_f64(&id, "max_relative_deviation"), 0.0);
    let r = check_symmetry(&m, &ins3, &c3, &all_transpositions(3), 1e-12, 1e-12).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let ins4 = vec![
        VertexSymbol::exponential(&m, &lv(&[1, 1])),
        VertexSymbol::current_left(&m, &m.left_unit(0)).unwrap(),
        VertexSymbol::current_right(&m, &m.right_unit(0)).unwrap(),
        VertexSymbol::exponential(&m, &lv(&[-1, -1])),
    ];
    let c4 = cfg(&[(2.0, 0.1), (-0.4, 1.1), (0.5, -0.6), (0.1, 0.2)]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let r = check_symmetry(&m, &ins4, &c4, &random_permutations(4, 10, &mut rng), 1e-10, 1e-12).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.metrics);
    assert_eq!(r.metrics["vacuum_truncated_checked"], true);
    let bad = check_symmetry(&m, &ins3, &c3, &[vec![0, 1]], 1e-10, 1e-12);
    assert!(matches!(bad, Err(AxiomError::InvalidInput(_))));
}

#[test]
fn covariance_examples() {
    let m = model();
    let ins = vec![
        VertexSymbol::exponential(&m, &lv(&[1, 0])),
        VertexSymbol::current_left(&m, &m.left_unit(0)).unwrap(),
        VertexSymbol::exponential(&m, &lv(&[-1, 0])),
    ];
    let conf = cfg(&[(1.5, 0.2), (-0.3, 0.6), (0.2, -0.1)]);
    let run = |gs: Vec<(GammaClass, MoebiusMap)>, tol| check_conformal_covariance(&m, &ins, &conf, &gs, Evaluation::ClosedForm, tol).unwrap();
    let r = run(vec![(GammaClass::Rotation, MoebiusMap::rotation(std::f64::consts::FRAC_PI_3))], 1e-12);
    assert_eq!(r.verdict, Verdict::Pass);
    let r = run(vec![(GammaClass::NsDilation, MoebiusMap::ns_dilation(0.2))], 1e-8);
    assert_eq!(r.verdict, Verdict::Pass);
    let r = run(vec![(GammaClass::Translation, MoebiusMap::identity())], 0.0);
    assert_eq!(metric_f64(&r, "max_relative_deviation"), 0.0);
    // the pole of the inversion sits on a point; the map is skipped
    let r = run(vec![(GammaClass::InversionType, MoebiusMap::inversion().compose(&MoebiusMap::translation(c(-0.2, 0.1))))], 1e-8);
    assert_eq!(r.metrics["maps_skipped"], 1);
    assert_eq!(r.verdict, Verdict::Fail);
}

#[test]
fn covariance_of_truncated_series_near_identity() {
    let m = model();
    let ins = vec![
        VertexSymbol::exponential(&m, &lv(&[1, 0])),
        VertexSymbol::current_left(&m, &m.left_unit(0)).unwrap(),
        VertexSymbol::exponential(&m, &lv(&[-1, 0])),
    ];
    let conf = cfg(&[(5.0, 0.5), (0.3, 1.2), (0.1, -0.15)]);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let gs: Vec<_> = GammaClass::ALL.iter().flat_map(|&k| (0..4).map(move |_| k)).map(|k| (k, sample_gamma(k, 0.01, &mut rng))).collect();
    let r = check_conformal_covariance(&m, &ins, &conf, &gs, Evaluation::Truncated { cutoff: 10.0 }, 1e-3).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.metrics);
}

#[test]
fn covariance_rejects_descendants_that_are_not_quasi_primary() {
    let m = model();
    let d = heisenberg_apply(&m, &m.left_unit(0), -2, &FockState::vacuum(2)).unwrap();
    let ins = vec![VertexSymbol::descendant(&m, d).unwrap(), VertexSymbol::vacuum(&m)];
    let r = check_conformal_covariance(&m, &ins, &cfg(&[(1.0, 0.0), (0.1, 0.0)]), &[], Evaluation::ClosedForm, 1e-8);
    assert!(matches!(r, Err(AxiomError::InvalidInput(_))));
}

#[test]
fn inversion_examples() {
    let m = model();
    let a = lv(&[1, 1]);
    let two = vec![VertexSymbol::exponential(&m, &a), VertexSymbol::exponential(&m, &-&a)];
    let r = check_inversion_identity(&m, &two, &cfg(&[(0.7, 1.1), (-0.4, 0.2)]), 1e-12).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let unit = Configuration::new(vec![Complex64::from_polar(1.0, 0.4), Complex64::from_polar(1.0, 2.9)]).unwrap();
    assert_eq!(check_inversion_identity(&m, &two, &unit, 1e-12).unwrap().verdict, Verdict::Pass);
    let r = check_inversion_identity(&m, &[VertexSymbol::vacuum(&m)], &cfg(&[(0.3, 0.2)]), 0.0).unwrap();
    assert_eq!(metric_f64(&r, "relative_deviation"), 0.0);
    assert!(matches!(check_inversion_identity(&m, &two, &cfg(&[(0.0, 0.0), (1.0, 0.0)]), 1e-10), Err(AxiomError::Vertex(_))));
}

#[test]
fn ward_identities_on_random_configurations() {
    let m = model();
    let ins = vec![
        VertexSymbol::exponential(&m, &lv(&[1, 1])),
        VertexSymbol::current_right(&m, &m.right_unit(0)).unwrap(),
        VertexSymbol::exponential(&m, &lv(&[0, -1])),
        VertexSymbol::exponential(&m, &lv(&[-1, 0])),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let cfgs: Vec<Configuration> =
        (0..20).map(|_| Configuration::new((0..4).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect()).unwrap()).collect();
    let r = check_ward_identities(&m, &ins, &cfgs, 1e-5, 1e-6).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.metrics);
}

#[test]
fn reflection_positivity_single_pair() {
    let m = model();
    let a = lv(&[1, 0]);
    let (h, hb) = m.sector_weights(&a);
    let r = check_reflection_positivity(&m, &[RpFamily::new(vec![pair_symbol(&m, &a)], vec![c(0.3, 0.0)])], 1e-8).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let want = 2.0 * 0.6f64.powf(-2.0 * (h + hb));
    assert!((metric_f64(&r, "min_eigenvalue") - want).abs() < 1e-12 * want);
}

#[test]
fn reflection_positivity_empty_and_mixed_families() {
    let r = check_reflection_positivity(&model(), &[], 1e-8).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(metric_f64(&r, "min_eigenvalue"), 1.0);
    let m = Model::ii11_boost(1.0).unwrap();
    let a = lv(&[1, 0]);
    let fams = vec![
        RpFamily::vacuum(),
        RpFamily::new(vec![pair_symbol(&m, &a)], vec![c(0.4, 0.1)]),
        RpFamily::new(vec![pair_symbol(&m, &a), pair_symbol(&m, &a)], vec![c(0.2, -0.3), c(0.5, 0.2)]),
    ];
    let r = check_reflection_positivity(&m, &fams, 1e-8).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.metrics);
    assert!(r.notes.iter().any(|n| n == POINTWISE_PROXY));
    assert!(metric_f64(&r, "hermitian_deviation") <= 1e-12 * metric_f64(&r, "spectral_norm"));
}

#[test]
fn reflection_positivity_with_odd_spin_and_currents() {
    let m = model();
    let odd = lv(&[1, 1]);
    let (u, v) = narain_core::fock::hermite_pair(&m, &exponential_state(&odd));
    let su = VertexSymbol::descendant(&m, u).unwrap();
    let sv = VertexSymbol::descendant(&m, v).unwrap();
    let j = VertexSymbol::current_left(&m, &m.left_unit(0)).unwrap();
    let jb = VertexSymbol::current_right(&m, &m.right_unit(0)).unwrap();
    let fams = vec![
        RpFamily::vacuum(),
        RpFamily::new(vec![su.clone()], vec![c(0.3, 0.1)]),
        RpFamily::new(vec![sv.clone()], vec![c(0.5, -0.2)]),
        RpFamily::new(vec![j.clone()], vec![c(0.4, 0.0)]),
        RpFamily::new(vec![su, jb], vec![c(0.2, 0.0), c(0.7, 0.3)]),
        RpFamily::new(vec![j, sv], vec![c(0.25, 0.5), c(0.6, -0.1)]),
    ];
    let r = check_reflection_positivity(&m, &fams, 1e-8).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.metrics);
}

#[test]
fn reflection_positivity_across_seeds() {
    let m = model();
    let pool: Vec<LatticeVector> = enumerate_lattice_points(&m, 3.0).unwrap().into_iter().filter(|a| !a.is_zero()).collect();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fams = vec![RpFamily::vacuum()];
        while fams.len() < 6 {
            let k = rng.gen_range(1..=2);
            let mut pts: Vec<Complex64> = (0..k).map(|_| c(rng.gen_range(0.05..1.5), rng.gen_range(-1.0..1.0))).collect();
            pts.sort_by(|a, b| a.re.total_cmp(&b.re));
            let ins = (0..k)
                .map(|_| {
                    let a = &pool[rng.gen_range(0..pool.len())];
                    let (u, v) = narain_core::fock::hermite_pair(&m, &exponential_state(a));
                    VertexSymbol::descendant(&m, if rng.gen_bool(0.5) { u } else { v }).unwrap()
                })
                .collect();
            fams.push(RpFamily::new(ins, pts));
        }
        let r = check_reflection_positivity(&m, &fams, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "seed {seed}: {:?}", r.metrics);
    }
}

#[test]
fn reflection_positivity_support_and_descendants() {
    let m = model();
    let a = pair_symbol(&m, &lv(&[1, 0]));
    let bad = check_reflection_positivity(&m, &[RpFamily::new(vec![a.clone()], vec![c(-0.1, 0.0)])], 1e-8);
    assert!(matches!(bad, Err(AxiomError::SupportViolation(_))));
    let bad = check_reflection_positivity(&m, &[RpFamily::new(vec![a.clone(), a.clone()], vec![c(0.5, 0.0), c(0.2, 0.0)])], 1e-8);
    assert!(matches!(bad, Err(AxiomError::SupportViolation(_))));
    let mono = PBWMonomial::new(lv(&[0, 0]), vec![Osc { dir: 0, mode: 1 }], vec![]);
    let d = VertexSymbol::descendant(&m, FockState::from_monomial(mono)).unwrap();
    let r = check_reflection_positivity(&m, &[RpFamily::new(vec![d], vec![c(0.3, 0.0)])], 1e-8).unwrap();
    assert_eq!(r.verdict, Verdict::Informational);
    assert!(r.passed());
}

#[test]
fn clustering_of_the_lightest_charge() {
    let m = Model::ii11_boost(1.0).unwrap();
    let a = lv(&[1, 0]);
    let f = ClusterFamily { insertions: vec![VertexSymbol::exponential(&m, &a)], points: vec![c(0.0, 0.0)] };
    let g = ClusterFamily { insertions: vec![VertexSymbol::exponential(&m, &-&a)], points: vec![c(0.3, 0.2)] };
    let r = check_clustering(&m, &f, &g, &CLUSTER_GRID, c(1.0, 0.0), None, 0.15).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!((metric_f64(&r, "delta_min") - 0.5).abs() < 1e-12);
    assert!((metric_f64(&r, "fitted_exponent") + 1.0).abs() < 0.15);
    // rotating both families and the direction leaves the fit unchanged
    let rot = Complex64::from_polar(1.0, 0.7);
    let rf = ClusterFamily { insertions: f.insertions.clone(), points: f.points.iter().map(|z| z * rot).collect() };
    let rg = ClusterFamily { insertions: g.insertions.clone(), points: g.points.iter().map(|z| z * rot).collect() };
    let rr = check_clustering(&m, &rf, &rg, &CLUSTER_GRID, rot, None, 0.15).unwrap();
    assert!((metric_f64(&rr, "fitted_exponent") - metric_f64(&r, "fitted_exponent")).abs() < 1e-9);
}

#[test]
fn clustering_degenerate_and_current_cases() {
    let m = Model::ii11_boost(1.0).unwrap();
    let a = lv(&[1, 0]);
    let f = ClusterFamily { insertions: vec![VertexSymbol::exponential(&m, &a)], points: vec![c(0.0, 0.0)] };
    let r = check_clustering(&m, &f, &f, &CLUSTER_GRID, c(1.0, 0.0), None, 0.15).unwrap();
    assert_eq!(r.metrics["degenerate_fit"], true);
    assert_eq!(r.verdict, Verdict::Pass);
    let j = VertexSymbol::current_left(&m, &m.left_unit(0)).unwrap();
    let fj = ClusterFamily { insertions: vec![j.clone()], points: vec![c(0.0, 0.0)] };
    let gj = ClusterFamily { insertions: vec![j], points: vec![c(0.2, 0.1)] };
    let r = check_clustering(&m, &fj, &gj, &CLUSTER_GRID, c(1.0, 0.0), Some(1.0), 0.15).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!((metric_f64(&r, "fitted_exponent") + 2.0).abs() < 0.05);
    assert!(matches!(check_clustering(&m, &f, &f, &[1.0, 2.0], c(1.0, 0.0), None, 0.15), Err(AxiomError::InvalidInput(_))));
}

fn upsilon(m: &Model) -> Vec<VertexSymbol> {
    let mut ups = vec![VertexSymbol::vacuum(m), VertexSymbol::current_left(m, &m.left_unit(0)).unwrap()];
    for a in enumerate_lattice_points(m, 2.0).unwrap() {
        if !a.is_zero() {
            ups.push(VertexSymbol::exponential(m, &a));
        }
    }
    ups
}

#[test]
fn energy_bound_fits() {
    let m = model();
    let ups = upsilon(&m);
    let (r, fits) = check_energy_bounds(&m, &ups, 4.0).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let vac = fits[0].as_ref().unwrap();
    assert_eq!((vac.m, vac.p, vac.q), (1.0, 0, 0));
    assert!(fits[1].as_ref().unwrap().p <= 1);
    assert!(fits.iter().all(|f| f.as_ref().is_some_and(|f| f.m.is_finite() && f.p <= PEB_MAX_EXPONENT && f.q <= PEB_MAX_EXPONENT)));
    let fits: Vec<EnergyFit> = fits.into_iter().map(Option::unwrap).collect();
    let est = check_peb_estimate(&m, &ups, &fits, 4.0, 4, 150, 7).unwrap();
    assert_eq!(est.verdict, Verdict::Pass, "{:?}", est.metrics);
}

#[test]
fn current_mode_norms_match_the_general_route() {
    let m = model();
    let h = m.left_unit(0);
    let j = VertexSymbol::current_left(&m, &h).unwrap();
    let b = FockState::from_monomial(PBWMonomial::new(lv(&[1, 0]), vec![Osc { dir: 0, mode: 2 }], vec![Osc { dir: 0, mode: 1 }]));
    for r in -3i64..=3 {
        let direct = norm(&m, &heisenberg_apply(&m, &h, r, &b).unwrap());
        let general = mode_norm_sample(&m, &j, r as f64, -1.0, &b, 12.0).unwrap();
        assert!((direct - general).abs() < 1e-10, "r={r}: {direct} vs {general}");
    }
}

#[test]
fn energy_bounds_reject_descendants() {
    let m = model();
    let d = heisenberg_apply(&m, &m.left_unit(0), -2, &FockState::vacuum(2)).unwrap();
    let r = check_energy_bounds(&m, &[VertexSymbol::descendant(&m, d).unwrap()], 2.0);
    assert!(matches!(r, Err(AxiomError::InvalidInput(_))));
}

#[test]
fn spectral_density_examples() {
    let m = model();
    let r = check_spectral_density(&m, 20, 0.5, 1.0).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(metric_f64(&r, "exponent") <= 2.5);
    let d = check_spectral_density(&m, 1, 0.5, 1.0).unwrap();
    assert_eq!(d.metrics["degenerate_fit"], true);
    let small: Vec<u64> = serde_json::from_value(check_spectral_density(&m, 8, 0.5, 1.0).unwrap().metrics["counts"].clone()).unwrap();
    let big: Vec<u64> = serde_json::from_value(r.metrics["counts"].clone()).unwrap();
    assert_eq!(&big[..small.len()], &small[..]);
}

#[test]
fn reports_round_trip_and_are_deterministic() {
    let m = model();
    let a = lv(&[1, 0]);
    let ins = vec![VertexSymbol::exponential(&m, &a), VertexSymbol::exponential(&m, &-&a)];
    let make = || {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let gs: Vec<_> = GammaClass::ALL.iter().map(|&k| (k, sample_gamma(k, 1.0, &mut rng))).collect();
        check_conformal_covariance(&m, &ins, &cfg(&[(1.0, 0.5), (0.2, 0.1)]), &gs, Evaluation::ClosedForm, 1e-8).unwrap()
    };
    let (r1, r2) = (make(), make());
    let s1 = serde_json::to_string(&r1).unwrap();
    assert_eq!(s1, serde_json::to_string(&r2).unwrap());
    let back: CheckReport = serde_json::from_str(&s1).unwrap();
    assert_eq!(back, r1);
    assert_eq!(back.schema, REPORT_SCHEMA);
    let u = check_spectral_density(&m, 1, 0.5, 1.0).unwrap();
    assert!(serde_json::to_string(&u).unwrap().contains("\"verdict\":\"pass\""));
}

#[test]
fn closed_form_is_used_for_the_pair_example() {
    let m = model();
    let a = lv(&[1, 0]);
    let s = pair_symbol(&m, &a);
    let v = schwinger_closed_form(&m, &[s.clone(), s], &cfg(&[(-0.3, 0.0), (0.3, 0.0)])).unwrap();
    let (h, hb) = m.sector_weights(&a);
    assert!((v - c(2.0 * 0.6f64.powf(-2.0 * (h + hb)), 0.0)).norm() < 1e-12);
}
