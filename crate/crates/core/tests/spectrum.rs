use std::sync::OnceLock;

use disspec::regions::{default_params, Region, RegionParams};
use disspec::spectrum::{band_envelope, classify_point, full_spectrum, PointClass, Spectrum};
use disspec::weyl::{counting_function, fit_growth, leading_coefficient, weyl_coefficient_gt1, GammaProfile};
use disspec::Complex64;
use proptest::prelude::*;

fn spectra() -> &'static [Spectrum] {
    static S: OnceLock<Vec<Spectrum>> = OnceLock::new();
    S.get_or_init(|| [0.0, 0.5, 0.9, 1.0, 1.5].iter().map(|&g| full_spectrum(g, 30, 0)).collect())
}

#[test]
fn point_relations() {
    for s in spectra() {
        assert!(s.failures.is_empty(), "gamma={}: {:?}", s.gamma, s.failures);
        assert!(s.unpaired().is_empty());
        for p in &s.points {
            let want = -1.0 / (2.0 * p.w);
            assert!((p.lambda - want).norm() <= 1e-14 * want.norm());
            assert_eq!(p.multiplicity, 2 * p.n + 1);
            assert_eq!(p.class, PointClass::of(p.w, p.error_radius));
            match p.class {
                PointClass::Eigenvalue => assert!(p.lambda.re < 0.0),
                PointClass::IncomingResonance => assert!(p.lambda.re > 0.0),
                PointClass::Indeterminate => {}
            }
            assert!(p.hankel_residual <= 1e-8, "n={} w={}: {}", p.n, p.w, p.hankel_residual);
        }
        for n in 0..=s.n_max {
            let mode: Vec<_> = s.mode(n).collect();
            let expected = if s.gamma == 1.0 { n } else { n + 1 };
            assert_eq!(mode.len(), expected, "gamma={} n={n}", s.gamma);
            for pair in mode.windows(2) {
                let (a, b) = (pair[0].lambda, pair[1].lambda);
                assert!(a.im > b.im || (a.im == b.im && a.re <= b.re));
            }
        }
    }
}

#[test]
fn subunit_gamma_has_only_resonances() {
    for s in spectra().iter().filter(|s| s.gamma < 1.0) {
        assert_eq!(s.count(PointClass::Eigenvalue), 0);
        assert_eq!(s.count(PointClass::Indeterminate), 0);
        assert!(s.points.iter().all(|p| p.lambda.re > 0.0));
    }
}

#[test]
fn unit_gamma_roots() {
    let s = spectra().iter().find(|s| s.gamma == 1.0).unwrap();
    assert_eq!(s.zero_root_modes, (0..=30).collect::<Vec<_>>());
    assert!(s.points.iter().all(|p| p.w.re < 0.0));
}

#[test]
fn supercritical_gamma_has_eigenvalues() {
    let s = spectra().iter().find(|s| s.gamma == 1.5).unwrap();
    // one real positive root (a negative eigenvalue) per mode
    assert_eq!(s.count(PointClass::Eigenvalue), 31);
    for p in s.points.iter().filter(|p| p.class == PointClass::Eigenvalue) {
        assert!(p.lambda.re < 0.0 && p.lambda.im.abs() <= 1e-12 * p.lambda.norm());
    }
}

#[test]
fn counting_is_monotone_and_additive() {
    let radii: Vec<f64> = (1..=40).map(|k| k as f64).collect();
    for s in spectra() {
        let params = RegionParams::unit();
        for region in [None, Some(Region::Lambda), Some(Region::QN), Some(Region::Mc), Some(Region::R)] {
            let cs = counting_function(s, region, &params, &radii).unwrap();
            assert!(cs.counts.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(cs.gamma, s.gamma);
            assert_eq!(cs.n_max, 30);
        }
        let all = counting_function(s, None, &params, &radii).unwrap();
        let (lo, hi): (Vec<_>, Vec<_>) = s.points.iter().cloned().partition(|p| p.n < 12);
        let part = |pts| Spectrum { points: pts, ..s.clone() };
        let a = counting_function(&part(lo), None, &params, &radii).unwrap();
        let b = counting_function(&part(hi), None, &params, &radii).unwrap();
        for k in 0..radii.len() {
            assert_eq!(all.counts[k], a.counts[k] + b.counts[k]);
        }
        let mut last = counting_function(s, Some(Region::Lambda), &params, &radii).unwrap().counts;
        for c2 in [10.0, 1e3, 1e5, 1e7] {
            let wider = RegionParams { C2: c2, ..params };
            let now = counting_function(s, Some(Region::Lambda), &wider, &radii).unwrap().counts;
            assert!(now.iter().zip(&last).all(|(x, y)| x >= y));
            last = now;
        }
    }
}

#[test]
fn counting_flags_truncation() {
    let s = &spectra()[1];
    let near = counting_function(s, None, &RegionParams::unit(), &[5.0, 10.0]).unwrap();
    assert!(!near.truncated);
    let far = counting_function(s, None, &RegionParams::unit(), &[100.0, 200.0]).unwrap();
    assert!(far.truncated);
    assert!(counting_function(s, None, &RegionParams::unit(), &[2.0, 1.0]).is_err());
}

#[test]
fn fit_recovers_exact_quadratic() {
    let s = &spectra()[0];
    let radii: Vec<f64> = (1..=20).map(|k| k as f64).collect();
    let mut cs = counting_function(s, None, &RegionParams::unit(), &radii).unwrap();
    cs.counts = radii.iter().map(|r| (3.0 * r * r + 2.0 * r) as u64).collect();
    let f = fit_growth(&cs, 1.0, 20.0).unwrap();
    assert!((f.a2 - 3.0).abs() < 1e-10 && (f.a1 - 2.0).abs() < 1e-9 && f.rel_resid < 1e-12);
    assert!(fit_growth(&cs, 1.0, 5.0).is_err());
    cs.counts.iter_mut().for_each(|c| *c = 0);
    assert!(fit_growth(&cs, 1.0, 20.0).is_err());
}

#[test]
fn weyl_coefficients() {
    assert!((leading_coefficient(3, GammaProfile::Constant(0.5), 0).unwrap() - 1.5).abs() < 1e-14);
    assert!((leading_coefficient(3, GammaProfile::Constant(0.8), 0).unwrap() - 0.72).abs() < 1e-14);
    assert!((weyl_coefficient_gt1(3, 1.5).unwrap() - 1.25).abs() < 1e-14);
    assert!(leading_coefficient(4, GammaProfile::Constant(0.5), 0).is_err());
    assert!(weyl_coefficient_gt1(3, 0.9).is_err());
    // spherical mean of (0.5 + 0.3 cos θ)² is 0.25 + 0.03
    let f = |t: f64, _p: f64| 0.5 + 0.3 * t.cos();
    let v = leading_coefficient(3, GammaProfile::Function(&f), 16).unwrap();
    assert!((v - 2.0 * (1.0 - 0.28)).abs() < 1e-12, "{v}");
    let c = |_t: f64, _p: f64| 0.5;
    let v = leading_coefficient(3, GammaProfile::Function(&c), 8).unwrap();
    assert!((v - 1.5).abs() < 1e-12);
    assert!(leading_coefficient(5, GammaProfile::Function(&c), 8).is_err());
    // d = 5 constant against ω₄ |S⁴| (1 − γ²)² · 2 / (2π)⁴
    let w4 = std::f64::consts::PI.powi(2) / 2.0;
    let s4 = 8.0 * std::f64::consts::PI.powi(2) / 3.0;
    let want = 2.0 * w4 * s4 * 0.75f64.powi(2) / (2.0 * std::f64::consts::PI).powi(4);
    assert!((leading_coefficient(5, GammaProfile::Constant(0.5), 0).unwrap() - want).abs() < 1e-14);
}

#[test]
fn band_envelope_uses_lambda_points() {
    let s = &spectra()[1];
    let params = default_params(0.5).unwrap();
    let wide = RegionParams { C2: 1e9, ..params };
    let env = band_envelope(&s.points, &wide, 8.0).unwrap();
    let want = s
        .points
        .iter()
        .filter(|p| (8.0..=16.0).contains(&p.lambda.im.abs()))
        .map(|p| p.lambda.re.abs())
        .fold(0.0, f64::max);
    assert_eq!(env, want);
    assert_eq!(band_envelope(&[], &params, 8.0), None);
}

fn params_strategy() -> impl Strategy<Value = RegionParams> {
    (0.1f64..10.0, 0.5f64..10.0, 0.1f64..10.0, 1u32..6, 0.1f64..3.0, 0.5f64..5.0, 0.1f64..5.0, 0.1f64..5.0).prop_map(
        |(c2, a2, b_n, n, c, d_c, c1, c0)| RegionParams { C2: c2, A2: a2, B_N: b_n, N: n, c, D_c: d_c, C1: c1, C0: c0 },
    )
}

proptest! {
    #[test]
    fn qn_inside_lambda(p in params_strategy(), re in -20.0f64..20.0, im in -200.0f64..200.0) {
        let l = Complex64::new(re, im);
        if p.B_N <= p.C2 && p.N >= 2 && p.in_qn(l) {
            prop_assert!(p.in_lambda(l));
        }
    }

    #[test]
    fn lambda_and_r_disjoint(g in 0.05f64..0.95, re in -50.0f64..50.0, im in -50.0f64..50.0) {
        let p = default_params(g).unwrap();
        let l = Complex64::new(re, im);
        prop_assert!(!(p.in_lambda(l) && p.in_r(l)));
    }

    #[test]
    fn tags_agree_with_predicates(p in params_strategy(), re in -20.0f64..20.0, im in -100.0f64..100.0) {
        let l = Complex64::new(re, im);
        let tags = p.tags(l);
        for r in [Region::Lambda, Region::QN, Region::Mc, Region::R] {
            prop_assert_eq!(tags.contains(&r), p.contains(r, l));
        }
        prop_assert!(!(tags.contains(&Region::Mc) && tags.contains(&Region::R)));
    }

    #[test]
    fn classify_matches_tags(k in 0usize..400) {
        let s = &spectra()[2];
        let p = &s.points[k % s.points.len()];
        let params = default_params(0.9).unwrap();
        prop_assert_eq!(classify_point(p, &params), params.tags(p.lambda));
    }
}
