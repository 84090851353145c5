//! Minimal arbitrary-precision complex arithmetic on top of MPFR floats.
//!
//! Only the operations the root finder, the contour evaluator and the Hankel
//! oracle need are provided. Every value carries its own precision; binary
//! operations round to the precision of the left operand.

use std::fmt;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex64;
use rug::{Assign, Float};

/// Unit roundoff `2^-bits` of a binary significand of the given width.
pub fn unit_roundoff(bits: u32) -> f64 {
    (-(bits as f64)).exp2()
}

#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)@{}", self.re, self.im, self.prec())
    }
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        BigComplex { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        BigComplex { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_c64(z: Complex64, prec: u32) -> Self {
        Self::from_f64(z.re, z.im, prec)
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        BigComplex { re, im }
    }

    pub fn i(prec: u32) -> Self {
        Self::from_f64(0.0, 1.0, prec)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Copy rounded (or widened) to a new precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut n = Float::with_val(self.prec(), &self.re * &self.re);
        n.mul_add_mut(&Float::with_val(self.prec(), 1), &Float::with_val(self.prec(), &self.im * &self.im));
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn mul_real(&mut self, r: &Float) {
        self.re *= r;
        self.im *= r;
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let mut out = self.conj();
        out.re /= &n;
        out.im /= &n;
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out *= other;
        out
    }

    pub fn div(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out /= other;
        out
    }
}

impl AddAssign<&BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: &BigComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&BigComplex> for BigComplex {
    fn sub_assign(&mut self, rhs: &BigComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&BigComplex> for BigComplex {
    fn mul_assign(&mut self, rhs: &BigComplex) {
        let old_re = self.re.clone();
        self.re.mul_sub_mul_mut(&rhs.re, &self.im, &rhs.im);
        self.im.mul_add_mul_mut(&rhs.re, &old_re, &rhs.im);
    }
}

impl DivAssign<&BigComplex> for BigComplex {
    fn div_assign(&mut self, rhs: &BigComplex) {
        let r = rhs.recip();
        *self *= &r;
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: -self.re, im: -self.im }
    }
}

/// Value and derivative of a real-coefficient polynomial at a complex point,
/// together with the absolute sums used for rounding-error bounds.
#[derive(Clone, Debug)]
pub struct PolyEval {
    pub value: BigComplex,
    pub deriv: BigComplex,
    /// Σ |a_m| |w|^m
    pub abs_sum: Float,
    /// Σ m |a_m| |w|^(m-1)
    pub abs_deriv_sum: Float,
}

/// Horner evaluation at the precision of `w`. `coeffs[m]` multiplies `w^m`.
pub fn eval_real_poly(coeffs: &[Float], w: &BigComplex) -> PolyEval {
    let prec = w.prec();
    let mut p = BigComplex::zero(prec);
    let mut dp = BigComplex::zero(prec);
    let mut s = Float::new(prec);
    let mut ds = Float::new(prec);
    let r = w.abs();
    let mut t = Float::new(prec);
    for a in coeffs.iter().rev() {
        // dp = dp * w + p
        t.assign(&dp.re);
        dp.re.mul_sub_mul_mut(&w.re, &dp.im, &w.im);
        dp.im.mul_add_mul_mut(&w.re, &t, &w.im);
        dp += &p;
        // p = p * w + a
        t.assign(&p.re);
        p.re.mul_sub_mul_mut(&w.re, &p.im, &w.im);
        p.im.mul_add_mul_mut(&w.re, &t, &w.im);
        p.re += a;
        ds.mul_add_mut(&r, &s);
        t.assign(a.abs_ref());
        s.mul_add_mut(&r, &t);
    }
    PolyEval { value: p, deriv: dp, abs_sum: s, abs_deriv_sum: ds }
}

/// [`eval_real_poly`] at the imaginary point `w = iy`, in real arithmetic:
/// with `E`, `O` the even and odd parts in `u = w² = −y²`,
/// `P = E(u) + iy O(u)` and `P' = O(u) + 2u O'(u) + 2iy E'(u)`.
pub fn eval_real_poly_imag(coeffs: &[Float], y: &Float) -> PolyEval {
    let prec = y.prec();
    let t = Float::with_val(prec, y.square_ref());
    let u = Float::with_val(prec, -&t);
    let s = Float::with_val(prec, y.abs_ref());
    let top = coeffs.len() - 1;
    let (mut e, mut de, mut o, mut d_o) = (Float::new(prec), Float::new(prec), Float::new(prec), Float::new(prec));
    let (mut ae, mut dae, mut ao, mut dao) = (Float::new(prec), Float::new(prec), Float::new(prec), Float::new(prec));
    let mut abs = Float::new(prec);
    for m in (0..=top).rev() {
        let a = &coeffs[m];
        abs.assign(a.abs_ref());
        if m % 2 == 0 {
            de.mul_add_mut(&u, &e);
            e.mul_add_mut(&u, a);
            dae.mul_add_mut(&t, &ae);
            ae.mul_add_mut(&t, &abs);
        } else {
            d_o.mul_add_mut(&u, &o);
            o.mul_add_mut(&u, a);
            dao.mul_add_mut(&t, &ao);
            ao.mul_add_mut(&t, &abs);
        }
    }
    let two_y = Float::with_val(prec, y * 2u32);
    let value = BigComplex { re: e, im: Float::with_val(prec, y * &o) };
    let mut dre = Float::with_val(prec, &u * &d_o) * 2u32;
    dre += &o;
    let deriv = BigComplex { re: dre, im: Float::with_val(prec, &two_y * &de) };
    let mut abs_sum = Float::with_val(prec, &s * &ao);
    abs_sum += &ae;
    let mut abs_deriv_sum = Float::with_val(prec, &t * &dao) * 2u32;
    abs_deriv_sum += &ao;
    abs_deriv_sum += Float::with_val(prec, &s * &dae) * 2u32;
    PolyEval { value, deriv, abs_sum, abs_deriv_sum }
}

/// Value only; cheaper when no derivative is needed.
pub fn eval_real_poly_value(coeffs: &[Float], w: &BigComplex) -> BigComplex {
    let prec = w.prec();
    let mut p = BigComplex::zero(prec);
    let mut t = Float::new(prec);
    for a in coeffs.iter().rev() {
        t.assign(&p.re);
        p.re.mul_sub_mul_mut(&w.re, &p.im, &w.im);
        p.im.mul_add_mul_mut(&w.re, &t, &w.im);
        p.re += a;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_f64() {
        let a = Complex64::new(1.25, -0.5);
        let b = Complex64::new(-0.3, 2.0);
        let (x, y) = (BigComplex::from_c64(a, 100), BigComplex::from_c64(b, 100));
        assert!((x.mul(&y).to_c64() - a * b).norm() < 1e-15);
        assert!((x.div(&y).to_c64() - a / b).norm() < 1e-15);
        assert!((x.recip().to_c64() - 1.0 / a).norm() < 1e-15);
        assert!((x.abs_f64() - a.norm()).abs() < 1e-15);
    }

    #[test]
    fn horner_value_and_derivative() {
        // 2 + 3w + w^3 at w = 1 + i: value 2 + 3 + 3i + (-2 + 2i) = 3 + 5i
        let c: Vec<Float> = [2.0, 3.0, 0.0, 1.0].iter().map(|&v| Float::with_val(80, v)).collect();
        let w = BigComplex::from_f64(1.0, 1.0, 80);
        let e = eval_real_poly(&c, &w);
        assert_eq!(e.value.to_c64(), Complex64::new(3.0, 5.0));
        // derivative 3 + 3w^2 = 3 + 6i
        assert_eq!(e.deriv.to_c64(), Complex64::new(3.0, 6.0));
        let r = 2f64.sqrt();
        assert!((e.abs_sum.to_f64() - (2.0 + 3.0 * r + r.powi(3))).abs() < 1e-14);
        assert_eq!(eval_real_poly_value(&c, &w).to_c64(), Complex64::new(3.0, 5.0));
    }

    #[test]
    fn imaginary_axis_matches_complex_horner() {
        let c: Vec<Float> = [0.3, -1.5, 2.0, 0.25, -0.7, 1.0].iter().map(|&v| Float::with_val(100, v)).collect();
        for y in [0.0, 0.4, -1.3, 2.5] {
            let a = eval_real_poly(&c, &BigComplex::from_f64(0.0, y, 100));
            let b = eval_real_poly_imag(&c, &Float::with_val(100, y));
            assert!((a.value.to_c64() - b.value.to_c64()).norm() < 1e-25);
            assert!((a.deriv.to_c64() - b.deriv.to_c64()).norm() < 1e-25);
            assert!((a.abs_sum.to_f64() - b.abs_sum.to_f64()).abs() < 1e-25);
            assert!((a.abs_deriv_sum.to_f64() - b.abs_deriv_sum.to_f64()).abs() < 1e-25);
        }
    }
}
