//! Bessel-polynomial coefficients `c_m = (n+m)! / ((n−m)! m!)` and the
//! characteristic polynomial
//!
//! ```text
//! B_n(w; γ) = Σ_{m=0}^{n+1} b_m(γ) w^m,
//! b_0 = 1 − γ,  b_m = (1 − γ) c_m + 2 m c_{m−1} (1 ≤ m ≤ n),  b_{n+1} = 2 (n+1) c_n.
//! ```
//!
//! Factorials are never formed. Coefficients are stored divided by the
//! leading one, built top-down from `c_n` with the exact integer ratio
//! `c_{m+1}/c_m = (n+m+1)(n−m)/(m+1)`, so every stored number lies in
//! `[0, 1]` when `0 ≤ γ ≤ 1`.

use num_complex::Complex64;
use rug::Float;

use crate::error::{Error, Result};
use crate::mp::{eval_real_poly, BigComplex, PolyEval};

/// Significand width of IEEE double.
pub const NATIVE_BITS: u32 = 53;
/// Default width of the extended mode.
pub const DEFAULT_EXTENDED_BITS: u32 = 128;
/// Largest mode solved in native double under the automatic policy.
///
/// The roots of `B_n` have a relative condition number of about `2^(1.9 n)`
/// with respect to the coefficients, so double precision leaves fewer than
/// 45 correct bits from `n = 5` on.
pub const NATIVE_MODE_LIMIT: usize = 4;

/// Smallest width the automatic policy uses for an extended-precision mode:
/// the bits lost to conditioning plus 64.
pub fn extended_floor_bits(n: usize) -> u32 {
    let need = (1.9 * n as f64 + 64.0).ceil() as u32;
    DEFAULT_EXTENDED_BITS.max(need.div_ceil(32) * 32)
}

/// Working precision for mode `n` given a requested width.
///
/// A request of at most [`NATIVE_BITS`] means "automatic": native double for
/// `n ≤ NATIVE_MODE_LIMIT`, extended above. A wider request is honoured for
/// every mode but never drops below [`extended_floor_bits`] for large modes.
pub fn working_precision(n: usize, requested: u32) -> u32 {
    if requested <= NATIVE_BITS {
        if n <= NATIVE_MODE_LIMIT {
            NATIVE_BITS
        } else {
            extended_floor_bits(n)
        }
    } else if n <= NATIVE_MODE_LIMIT {
        requested
    } else {
        requested.max(extended_floor_bits(n))
    }
}

/// Ratio/log representation of the coefficients of `R_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselCoeffs {
    pub n: usize,
    /// `ratios[m] = c_{m+1} / c_m`, length `n`.
    pub ratios: Vec<f64>,
    /// `log_c[m] = ln c_m`, length `n + 1`.
    pub log_c: Vec<f64>,
}

impl BesselCoeffs {
    /// `c_m` as a double; overflows to infinity for large `n`.
    pub fn c(&self, m: usize) -> f64 {
        self.log_c[m].exp()
    }
}

fn ratio_parts(n: usize, m: usize) -> (u64, u64) {
    ((n + m + 1) as u64 * (n - m) as u64, (m + 1) as u64)
}

pub fn bessel_coeffs(n: usize) -> BesselCoeffs {
    let mut ratios = Vec::with_capacity(n);
    let mut log_c = Vec::with_capacity(n + 1);
    log_c.push(0.0);
    for m in 0..n {
        let (num, den) = ratio_parts(n, m);
        let r = num as f64 / den as f64;
        ratios.push(r);
        log_c.push(log_c[m] + r.ln());
    }
    BesselCoeffs { n, ratios, log_c }
}

/// `c_m / c_n` for `m = 0..=n` at the given precision.
pub fn normalized_bessel(n: usize, bits: u32) -> Vec<Float> {
    let mut out = vec![Float::new(bits); n + 1];
    out[n] = Float::with_val(bits, 1);
    for m in (0..n).rev() {
        let (num, den) = ratio_parts(n, m);
        let mut v = Float::with_val(bits, &out[m + 1] * den);
        v /= num;
        out[m] = v;
    }
    out
}

/// A polynomial divided by its leading coefficient, at a fixed precision.
#[derive(Clone, Debug)]
pub struct ScaledPolynomial {
    n: usize,
    gamma: Option<f64>,
    norm_coeffs: Vec<Float>,
    log_lead: f64,
    view: Option<FloatView>,
}

impl ScaledPolynomial {
    /// Polynomial from explicit coefficients (`coeffs[m]` multiplies `w^m`).
    pub fn from_coeffs(coeffs: &[f64], bits: u32) -> Result<Self> {
        let floats = coeffs.iter().map(|&c| Float::with_val(bits, c)).collect();
        Self::from_floats(floats)
    }

    pub fn from_floats(mut coeffs: Vec<Float>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput("polynomial degree must be at least 1".into()));
        }
        let lead = coeffs.last().expect("nonempty").clone();
        if !lead.is_finite() || lead.is_zero() || lead.clone().abs() < f64::MIN_POSITIVE {
            return Err(Error::DegenerateLeading(lead.to_f64()));
        }
        for c in coeffs.iter_mut() {
            *c /= &lead;
        }
        let log_lead = Float::with_val(lead.prec(), lead.abs_ref()).ln().to_f64();
        let n = coeffs.len() - 2;
        Ok(Self::assemble(n, None, coeffs, log_lead))
    }

    fn assemble(n: usize, gamma: Option<f64>, norm_coeffs: Vec<Float>, log_lead: f64) -> Self {
        let view = FloatView::build(&norm_coeffs);
        ScaledPolynomial { n, gamma, norm_coeffs, log_lead, view }
    }

    /// Mode index; equals `degree − 1` for every polynomial.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.norm_coeffs.len() - 1
    }

    /// Boundary parameter, `None` for explicit polynomials.
    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn bits(&self) -> u32 {
        self.norm_coeffs[0].prec()
    }

    pub fn norm_coeffs(&self) -> &[Float] {
        &self.norm_coeffs
    }

    pub fn norm_coeffs_f64(&self) -> Vec<f64> {
        self.norm_coeffs.iter().map(Float::to_f64).collect()
    }

    /// `ln |leading coefficient|` of the unnormalized polynomial.
    pub fn log_lead(&self) -> f64 {
        self.log_lead
    }

    /// Scaled double-precision view, when the scaled coefficients fit.
    pub fn view(&self) -> Option<&FloatView> {
        self.view.as_ref()
    }

    pub fn eval(&self, w: &BigComplex) -> PolyEval {
        eval_real_poly(&self.norm_coeffs, w)
    }

    /// The same polynomial at another precision. Mode polynomials are rebuilt
    /// from scratch; explicit ones are rounded.
    pub fn with_precision(&self, bits: u32) -> Self {
        match self.gamma {
            Some(g) => char_poly_with_precision(self.n, g, bits),
            None => {
                let c = self.norm_coeffs.iter().map(|c| Float::with_val(bits, c)).collect();
                Self::assemble(self.n, None, c, self.log_lead)
            }
        }
    }

    /// Number of exactly vanishing low-order coefficients, i.e. the
    /// multiplicity of the root at zero.
    pub fn zero_root_multiplicity(&self) -> usize {
        self.norm_coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Strip `w^k` for the exact zero root; `None` if nothing remains.
    pub fn deflate_zero_roots(&self) -> (usize, Option<ScaledPolynomial>) {
        let k = self.zero_root_multiplicity();
        if k == 0 {
            return (0, Some(self.clone()));
        }
        let rest: Vec<Float> = self.norm_coeffs[k..].to_vec();
        if rest.len() < 2 {
            return (k, None);
        }
        let n = rest.len() - 2;
        (k, Some(Self::assemble(n, None, rest, self.log_lead)))
    }
}

/// `B_n(w; γ)` at the automatic working precision for mode `n`.
pub fn char_poly(n: usize, gamma: f64) -> ScaledPolynomial {
    char_poly_with_precision(n, gamma, working_precision(n, NATIVE_BITS))
}

pub fn char_poly_with_precision(n: usize, gamma: f64, bits: u32) -> ScaledPolynomial {
    let chat = normalized_bessel(n, bits);
    let one_minus = Float::with_val(bits, 1) - Float::with_val(bits, gamma);
    let lead = 2 * (n as u64 + 1);
    let mut coeffs = Vec::with_capacity(n + 2);
    coeffs.push(Float::with_val(bits, &one_minus * &chat[0]) / lead);
    for m in 1..=n {
        let mut b = Float::with_val(bits, &chat[m - 1] * (2 * m as u64));
        b.mul_add_mut(&Float::with_val(bits, 1), &Float::with_val(bits, &one_minus * &chat[m]));
        b /= lead;
        coeffs.push(b);
    }
    coeffs.push(Float::with_val(bits, 1));
    let log_lead = (lead as f64).ln() + bessel_coeffs(n).log_c[n];
    ScaledPolynomial::assemble(n, Some(gamma), coeffs, log_lead)
}

/// Double-precision evaluation of `P(w) = s^d P̃(w/s)` through the balanced
/// coefficients `ã_m = a_m s^(m−d)`, with `s` the geometric-mean root radius.
/// Points with `|w| > s` use the reversed polynomial, so nothing overflows.
#[derive(Clone, Debug)]
pub struct FloatView {
    pub scale: f64,
    pub coeffs: Vec<f64>,
}

/// Logarithmic derivative of a [`FloatView`] at one point.
#[derive(Clone, Copy, Debug)]
pub struct ViewEval {
    /// `P'(x) / P(x)` in the variable the point was given in.
    pub ratio: Complex64,
    /// Normalized residual `|P| / Σ|a_m||x|^m`.
    pub resid: f64,
    /// A-priori bound on the absolute rounding error of `ratio`.
    pub ratio_err: f64,
}

impl FloatView {
    fn build(coeffs: &[Float]) -> Option<FloatView> {
        let d = coeffs.len() - 1;
        let bits = coeffs[0].prec().max(NATIVE_BITS);
        let k = coeffs.iter().position(|c| !c.is_zero())?;
        let ln_s = if k < d {
            Float::with_val(bits, coeffs[k].abs_ref()).ln() / (d - k) as u32
        } else {
            Float::new(bits)
        };
        let scale = Float::with_val(bits, ln_s.exp_ref()).to_f64();
        if !(scale.is_normal()) {
            return None;
        }
        let mut out = Vec::with_capacity(d + 1);
        for (m, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                out.push(0.0);
                continue;
            }
            let e = Float::with_val(bits, &ln_s * (m as i64 - d as i64)).exp();
            let v = Float::with_val(bits, c * &e).to_f64();
            if !v.is_normal() {
                return None;
            }
            out.push(v);
        }
        Some(FloatView { scale, coeffs: out })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluate in the scaled variable `z = w / s`.
    pub fn eval_scaled(&self, z: Complex64) -> ViewEval {
        let d = self.degree();
        let kappa = (4 * d + 4) as f64 * f64::EPSILON;
        let r = z.norm();
        if r <= 1.0 {
            let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            let (mut s, mut ds) = (0.0f64, 0.0f64);
            for &a in self.coeffs.iter().rev() {
                dp = dp * z + p;
                p = p * z + a;
                ds = ds * r + s;
                s = s * r + a.abs();
            }
            let ratio = dp / p;
            let pn = p.norm();
            let ratio_err = kappa * (ratio.norm() * s / pn + ds / pn);
            ViewEval { ratio, resid: pn / s, ratio_err }
        } else {
            // Q(u) = u^d P(1/u);  P'/P = u (d − u Q'/Q)
            let u = 1.0 / z;
            let ru = 1.0 / r;
            let (mut q, mut dq) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            let (mut s, mut ds) = (0.0f64, 0.0f64);
            for &a in self.coeffs.iter() {
                dq = dq * u + q;
                q = q * u + a;
                ds = ds * ru + s;
                s = s * ru + a.abs();
            }
            let qn = q.norm();
            let lq = dq / q;
            let ratio = u * (d as f64 - u * lq);
            let lq_err = kappa * (lq.norm() * s / qn + ds / qn);
            ViewEval { ratio, resid: qn / s, ratio_err: ru * ru * lq_err }
        }
    }

    /// Evaluate at `w`; the returned ratio is `P'(w)/P(w)`.
    pub fn eval(&self, w: Complex64) -> ViewEval {
        let e = self.eval_scaled(w / self.scale);
        ViewEval { ratio: e.ratio / self.scale, resid: e.resid, ratio_err: e.ratio_err / self.scale }
    }
}
