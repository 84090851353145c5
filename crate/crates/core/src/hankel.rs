//! Spherical Hankel closed form `h_n(x) ∝ (e^{ix}/x) R_n(i/(2x))` and the
//! characteristic function `C(n; μ, γ) = μ h_n'(μ)/h_n(μ) − iμγ`.
//!
//! Only logarithmic derivatives are formed, so the normalization constant of
//! `h_n` never matters. With `z = i/(2x)` and `q = z R_n'(z)/R_n(z)`:
//!
//! ```text
//! h_n'(x)/h_n(x) = i − (1 + q)/x,      C(n; μ, γ) = (1 − γ) iμ − 1 − q.
//! ```

use num_complex::Complex64;
use rug::Float;

use crate::error::{Error, Result};
use crate::mp::{eval_real_poly, unit_roundoff, BigComplex};
use crate::polymode::{normalized_bessel, working_precision};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharValue {
    pub value: Complex64,
    /// `|μ| (1 + |h_n'(μ)/h_n(μ)|)`
    pub scale: f64,
}

impl CharValue {
    pub fn relative(&self) -> f64 {
        self.value.norm() / self.scale
    }
}

/// `z R_n'(z) / R_n(z)` at the precision of `z`.
fn log_derivative_term(n: usize, z: &BigComplex) -> Result<BigComplex> {
    let bits = z.prec();
    let coeffs = normalized_bessel(n, bits);
    let e = eval_real_poly(&coeffs, z);
    let rel = Float::with_val(bits, e.value.abs() / &e.abs_sum).to_f64();
    if !(rel > 1e3 * unit_roundoff(bits)) {
        return Err(Error::NearZeroDenominator(rel));
    }
    Ok(z.mul(&e.deriv.div(&e.value)))
}

fn z_of(x: &BigComplex) -> BigComplex {
    // i / (2x)
    let mut z = BigComplex::i(x.prec()).div(x);
    z.re /= 2u32;
    z.im /= 2u32;
    z
}

fn ensure_nonzero(x: &BigComplex) -> Result<()> {
    if x.is_zero() {
        return Err(Error::InvalidInput("argument must be nonzero".into()));
    }
    Ok(())
}

/// `h_n'(x)/h_n(x)` at the precision of `x`.
pub fn spherical_hankel_ratio_mp(n: usize, x: &BigComplex) -> Result<BigComplex> {
    ensure_nonzero(x)?;
    let mut one_q = log_derivative_term(n, &z_of(x))?;
    one_q.re += 1u32;
    let mut r = BigComplex::i(x.prec());
    r -= &one_q.div(x);
    Ok(r)
}

pub fn spherical_hankel_ratio(n: usize, x: Complex64) -> Result<Complex64> {
    let bits = working_precision(n, 0);
    spherical_hankel_ratio_mp(n, &BigComplex::from_c64(x, bits)).map(|r| r.to_c64())
}

/// `C(n; μ, γ)` and its scale, at the precision of `mu`.
pub fn characteristic_value_mp(n: usize, mu: &BigComplex, gamma: f64) -> Result<(BigComplex, Float)> {
    ensure_nonzero(mu)?;
    let bits = mu.prec();
    let q = log_derivative_term(n, &z_of(mu))?;
    let one_minus = Float::with_val(bits, 1) - Float::with_val(bits, gamma);
    // (1 − γ) iμ
    let mut value = BigComplex { re: -Float::with_val(bits, &mu.im * &one_minus), im: Float::with_val(bits, &mu.re * &one_minus) };
    value.re -= 1u32;
    value -= &q;
    let mut one_q = q;
    one_q.re += 1u32;
    let mut ratio = BigComplex::i(bits);
    ratio -= &one_q.div(mu);
    let mut scale = ratio.abs();
    scale += 1u32;
    scale *= mu.abs();
    Ok((value, scale))
}

pub fn characteristic_value(n: usize, mu: Complex64, gamma: f64) -> Result<CharValue> {
    let bits = working_precision(n, 0);
    let (v, s) = characteristic_value_mp(n, &BigComplex::from_c64(mu, bits), gamma)?;
    Ok(CharValue { value: v.to_c64(), scale: s.to_f64() })
}

/// `|C(n; i/(2w), γ)| / scale` for a polynomial root `w`, at the precision of `w`.
pub fn root_residual(n: usize, w: &BigComplex, gamma: f64) -> Result<f64> {
    ensure_nonzero(w)?;
    let mu = z_of(w);
    let (v, s) = characteristic_value_mp(n, &mu, gamma)?;
    Ok(Float::with_val(w.prec(), v.abs() / s).to_f64())
}
