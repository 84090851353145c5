mod common;

use disspec::hankel::{characteristic_value_mp, spherical_hankel_ratio, spherical_hankel_ratio_mp};
use disspec::mp::{eval_real_poly, BigComplex};
use disspec::polymode::{char_poly_with_precision, normalized_bessel, working_precision};
use disspec::rootfind::roots;
use disspec::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

#[test]
fn order_one_at_i_matches_recurrence() {
    let x = BigComplex::from_f64(0.0, 1.0, 128);
    let a = spherical_hankel_ratio_mp(1, &x).unwrap();
    let b = common::hankel_ratio_recurrence(1, &x);
    let mut d = a.clone();
    d -= &b;
    assert!(d.abs_f64() <= 1e-12 * b.abs_f64());
}

#[test]
fn closed_form_matches_recurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut skipped = 0;
    for _ in 0..100 {
        let r = 0.5 * 100f64.powf(rng.gen::<f64>());
        let t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let x = Complex64::from_polar(r, t);
        for n in [0usize, 1, 2, 5, 12, 30] {
            let bits = 256;
            let xm = BigComplex::from_c64(x, bits);
            let a = match spherical_hankel_ratio_mp(n, &xm) {
                Ok(v) => v,
                // R_n vanishes at i/(2x): both sides are infinite there
                Err(_) => {
                    skipped += 1;
                    continue;
                }
            };
            let b = common::hankel_ratio_recurrence(n, &xm);
            let mut d = a.clone();
            d -= &b;
            assert!(d.abs_f64() <= 1e-10 * b.abs_f64(), "n={n} x={x}: {} vs {}", a.to_c64(), b.to_c64());
        }
    }
    assert_eq!(skipped, 0);
}

#[test]
fn reflection_symmetry() {
    // real coefficients: ratio(−x̄) = −conj(ratio(x)); purely imaginary on iℝ
    for n in [0usize, 3, 9] {
        for x in [Complex64::new(0.3, 2.0), Complex64::new(-4.0, 0.5), Complex64::new(1.0, -1.0)] {
            let a = spherical_hankel_ratio(n, -x.conj()).unwrap();
            let b = -spherical_hankel_ratio(n, x).unwrap().conj();
            assert!((a - b).norm() <= 1e-13 * b.norm());
        }
        for y in [0.5, 1.0, 7.0, -2.0] {
            let r = spherical_hankel_ratio(n, Complex64::new(0.0, y)).unwrap();
            assert!(r.re.abs() <= 1e-14 * r.norm(), "n={n} y={y}: {r}");
        }
    }
}

/// `2w R_n(w) (−C(n; i/(2w), γ))` against `B_n(w; γ)`, both over `b_{n+1}`.
#[test]
fn numerator_identity_on_circles() {
    for n in 0..=30usize {
        for g in [0.0, 0.4, 1.0, 1.3] {
            let bits = working_precision(n, 128);
            let p = char_poly_with_precision(n, g, bits);
            let chat = normalized_bessel(n, bits);
            for radius in [0.25, 0.5, 1.0] {
                for k in 0..12 {
                    let w = BigComplex::from_c64(Complex64::from_polar(radius, 0.1 + k as f64 * 0.5), bits);
                    let mu = BigComplex::i(bits).div(&w);
                    let mut mu = mu;
                    mu.re /= 2u32;
                    mu.im /= 2u32;
                    let (c, _) = characteristic_value_mp(n, &mu, g).unwrap();
                    let r = eval_real_poly(&chat, &w).value;
                    let mut lhs = w.mul(&r).mul(&c);
                    let f = Float::with_val(bits, -2.0 / (2 * (n + 1)) as f64);
                    lhs.mul_real(&f);
                    let e = p.eval(&w);
                    let mut d = lhs;
                    d -= &e.value;
                    let rel = Float::with_val(bits, d.abs() / &e.abs_sum).to_f64();
                    assert!(rel <= 1e-10, "n={n} g={g} |w|={radius}: {rel:e}");
                }
            }
        }
    }
}

/// Secant iteration on `w ↦ C(n; i/(2w), γ)`.
fn char_zero_near(n: usize, g: f64, w0: &BigComplex, w1: &BigComplex) -> BigComplex {
    let eval = |w: &BigComplex| {
        let mut mu = BigComplex::i(w.prec()).div(w);
        mu.re /= 2u32;
        mu.im /= 2u32;
        characteristic_value_mp(n, &mu, g).unwrap().0
    };
    let (mut a, mut b) = (w0.clone(), w1.clone());
    let (mut fa, mut fb) = (eval(&a), eval(&b));
    for _ in 0..60 {
        if fb.is_zero() {
            break;
        }
        let mut den = fb.clone();
        den -= &fa;
        if den.is_zero() {
            break;
        }
        let mut db = b.clone();
        db -= &a;
        let step = fb.mul(&db).div(&den);
        a = b.clone();
        fa = fb;
        b -= &step;
        fb = eval(&b);
        if step.abs_f64() <= 1e-30 * b.abs_f64() {
            break;
        }
    }
    b
}

#[test]
fn characteristic_zeros_are_the_polynomial_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &(n, g) in &[(1usize, 0.0), (4, 0.5), (10, 0.9), (25, 0.3), (40, 1.2), (60, 0.7)] {
        let bits = working_precision(n, 128);
        let p = char_poly_with_precision(n, g, bits);
        let set = roots(&p, bits).unwrap();
        for (i, w) in set.roots.iter().enumerate().filter(|(_, w)| w.norm() > 0.0) {
            let mut nudge = |s: f64| Complex64::from_polar(s * w.norm(), rng.gen_range(0.0..6.28));
            let w0 = BigComplex::from_c64(w + nudge(1e-7), bits);
            let w1 = BigComplex::from_c64(w + nudge(2e-7), bits);
            let z = char_zero_near(n, g, &w0, &w1);
            let mut d = z.clone();
            d -= &set.roots_mp[i];
            assert!(d.abs_f64() <= 1e-8 * w.norm(), "n={n} g={g} root {w}: moved {}", d.abs_f64());
        }
    }
}
