//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use disspec::mp::BigComplex;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rug::Float;

fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |acc, j| acc * j)
}

/// `c_m = (n+m)! / ((n−m)! m!)`, straight from the factorials.
pub fn bessel_exact(n: usize) -> Vec<BigUint> {
    (0..=n).map(|m| factorial(n + m) / (factorial(n - m) * factorial(m))).collect()
}

/// `b_m(γ)` as exact rationals, with `γ` taken as the exact value of the f64.
pub fn char_exact(n: usize, gamma: f64) -> Vec<BigRational> {
    let c: Vec<BigRational> = bessel_exact(n).into_iter().map(|v| BigRational::from_integer(BigInt::from(v))).collect();
    let one_minus = BigRational::one() - BigRational::from_float(gamma).expect("finite gamma");
    let mut b = Vec::with_capacity(n + 2);
    for m in 0..=n + 1 {
        let mut v = BigRational::zero();
        if m <= n {
            v += &one_minus * &c[m];
        }
        if m >= 1 {
            v += BigRational::from_integer(BigInt::from(2 * m)) * &c[m - 1];
        }
        b.push(v);
    }
    b
}

/// `b_m / b_{n+1}` rounded to f64.
pub fn normalized_exact(n: usize, gamma: f64) -> Vec<f64> {
    let b = char_exact(n, gamma);
    let lead = b[n + 1].clone();
    b.iter().map(|v| (v / &lead).to_f64().expect("representable")).collect()
}

/// `h_n'(x)/h_n(x)` by the upward recurrence `h_{k+1} = (2k+1)/x h_k − h_{k−1}`
/// from `h_0 ∝ −i/x`, `h_1 ∝ −(x + i)/x²` (the common factor `e^{ix}` dropped),
/// and `h_n' = h_{n−1} − (n+1)/x h_n`.
pub fn hankel_ratio_recurrence(n: usize, x: &BigComplex) -> BigComplex {
    let bits = x.prec();
    let xinv = x.recip();
    let minus_i = BigComplex::from_f64(0.0, -1.0, bits);
    let h0 = minus_i.mul(&xinv);
    let mut xi = x.clone();
    xi.im += 1u32;
    let mut h1 = xi.mul(&xinv).mul(&xinv);
    h1.re = -h1.re;
    h1.im = -h1.im;
    let (mut prev, mut cur) = (h0, h1);
    if n == 0 {
        // h_0' = −h_1 for the standard normalization
        let mut d = cur.clone();
        d.re = -d.re;
        d.im = -d.im;
        return d.div(&prev);
    }
    for k in 1..n {
        let mut next = cur.mul(&xinv);
        next.mul_real(&Float::with_val(bits, 2 * k + 1));
        next -= &prev;
        prev = cur;
        cur = next;
    }
    let mut t = cur.mul(&xinv);
    t.mul_real(&Float::with_val(bits, n + 1));
    let mut d = prev;
    d -= &t;
    d.div(&cur)
}
