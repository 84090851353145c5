//! All complex roots of a [`ScaledPolynomial`].
//!
//! Aberth–Ehrlich simultaneous iteration, first in double precision on the
//! balanced polynomial of [`FloatView`], then (for widths above 53 bits) in
//! MPFR starting from the double-precision approximations. Every returned
//! root carries its normalized residual and an inclusion radius
//! `d |P(w_i)| / Π_{j≠i} |w_i − w_j|`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rug::Float;

use crate::error::{Error, Result};
use crate::mp::{unit_roundoff, BigComplex};
use crate::polymode::{FloatView, ScaledPolynomial, NATIVE_BITS};

/// Hard iteration cap of the simultaneous iteration.
pub const MAX_ITERATIONS: usize = 400;
/// Angular offset of the initial guesses on the seeding circle.
pub const SEED_OFFSET: f64 = 0.37;
/// Sweeps an iterate may spend below the residual threshold without
/// separating from its neighbours before it is accepted as part of a cluster
/// (a multiple root).
const CLUSTER_SWEEPS: usize = 8;
/// Rotation applied to caller-supplied starting points.
const SEED_TILT: f64 = 1e-3;
/// A root is frozen only once its Newton step is this small relative to the
/// distance to its nearest neighbour.
const ISOLATION: f64 = 1e-3;

/// Normalized-residual acceptance threshold `1e3 · 2^-bits`.
pub fn residual_threshold(bits: u32) -> f64 {
    1e3 * unit_roundoff(bits)
}

#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// The same roots at the working precision.
    pub roots_mp: Vec<BigComplex>,
    /// `|P(w_j)| / Σ |a_m| |w_j|^m`
    pub residuals: Vec<f64>,
    pub error_radii: Vec<f64>,
    pub precision_bits: u32,
    pub iterations: usize,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }

    /// `|Σ w_j + a_{d−1}|`, evaluated at the working precision.
    pub fn vieta_defect(&self, p: &ScaledPolynomial) -> f64 {
        let bits = self.precision_bits.max(NATIVE_BITS);
        let mut s = BigComplex::zero(bits);
        for w in &self.roots_mp {
            s += &w.with_prec(bits);
        }
        s.re += &p.norm_coeffs()[p.degree() - 1];
        s.abs_f64()
    }

    /// Bound for [`RootSet::vieta_defect`]: every root is within its error
    /// radius of a true root, plus rounding of the sum itself.
    pub fn vieta_tolerance(&self) -> f64 {
        let radii: f64 = self.error_radii.iter().sum();
        radii + self.len() as f64 * unit_roundoff(self.precision_bits.max(NATIVE_BITS)) * self.max_modulus().max(1.0)
    }

    /// Largest distance from a root's conjugate to the nearest root, in units
    /// of the error radii involved (0 for an exactly closed set).
    pub fn conjugate_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, w) in self.roots.iter().enumerate() {
            let c = w.conj();
            let (j, dist) = self
                .roots
                .iter()
                .enumerate()
                .map(|(j, v)| (j, (v - c).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty");
            let tol = self.error_radii[i] + self.error_radii[j];
            if dist > 0.0 {
                worst = worst.max(if tol > 0.0 { dist / tol } else { f64::INFINITY });
            }
        }
        worst
    }
}

/// The Fujiwara bound
/// `2 max{ |a_{d−1}|, |a_{d−2}|^{1/2}, …, |a_1|^{1/(d−1)}, |a_0/2|^{1/d} }`
/// of a monic polynomial.
pub fn fujiwara_bound(p: &ScaledPolynomial) -> f64 {
    let d = p.degree();
    let c = p.norm_coeffs();
    let bits = p.bits().max(NATIVE_BITS);
    let mut best = 0.0f64;
    for k in 1..=d {
        let a = &c[d - k];
        if a.is_zero() {
            continue;
        }
        let mut mag = Float::with_val(bits, a.abs_ref());
        if k == d {
            mag /= 2u32;
        }
        let t = (mag.ln() / k as u32).exp().to_f64();
        best = best.max(t);
    }
    2.0 * best
}

/// Requests below the polynomial's own precision are raised to it.
pub fn roots(p: &ScaledPolynomial, precision_bits: u32) -> Result<RootSet> {
    roots_from(p, precision_bits, &[])
}

/// [`roots`] started from approximate roots, e.g. those of a neighbouring
/// mode. Missing starting points are filled in on the seeding circle; surplus
/// ones are ignored.
pub fn roots_from(p: &ScaledPolynomial, precision_bits: u32, start: &[Complex64]) -> Result<RootSet> {
    let bits = precision_bits.max(p.bits()).max(NATIVE_BITS);
    let p = if p.bits() >= bits { p.clone() } else { p.with_precision(bits) };
    let (zeros, rest) = p.deflate_zero_roots();
    let mut set = match rest {
        None => RootSet {
            roots: vec![],
            roots_mp: vec![],
            residuals: vec![],
            error_radii: vec![],
            precision_bits: bits,
            iterations: 0,
        },
        Some(q) if q.degree() == 1 => linear_root(&q, bits),
        Some(q) => nonlinear_roots(&q, bits, start)?,
    };
    for _ in 0..zeros {
        set.roots.push(Complex64::new(0.0, 0.0));
        set.roots_mp.push(BigComplex::zero(bits));
        set.residuals.push(0.0);
        set.error_radii.push(0.0);
    }
    Ok(set)
}

fn linear_root(q: &ScaledPolynomial, bits: u32) -> RootSet {
    let w = BigComplex::from_real(-Float::with_val(bits, &q.norm_coeffs()[0]));
    let e = q.with_precision(bits).eval(&w);
    let resid = if e.abs_sum.is_zero() { 0.0 } else { Float::with_val(bits, e.value.abs() / &e.abs_sum).to_f64() };
    let radius = 2.0 * unit_roundoff(bits) * w.abs_f64();
    RootSet {
        roots: vec![w.to_c64()],
        roots_mp: vec![w],
        residuals: vec![resid],
        error_radii: vec![radius],
        precision_bits: bits,
        iterations: 0,
    }
}

fn circle_seeds(d: usize) -> Vec<Complex64> {
    (0..d).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / d as f64 + SEED_OFFSET)).collect()
}

/// Displacement for an iterate that sits on a root already taken by another.
fn kick(z: Complex64, i: usize) -> Complex64 {
    Complex64::from_polar(0.1 * z.norm().max(f64::MIN_POSITIVE), 1.0 + i as f64)
}

struct Stage<T> {
    roots: Vec<T>,
    converged: bool,
    iterations: usize,
    worst: f64,
}

fn aberth_f64(view: &FloatView, start: Vec<Complex64>, tol: f64) -> Stage<Complex64> {
    let d = view.degree();
    let mut z = start;
    let mut done = vec![false; d];
    let mut settled = vec![0usize; d];
    let mut iterations = 0;
    let mut worst = f64::INFINITY;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        worst = 0.0;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let e = view.eval_scaled(z[i]);
            if e.ratio.norm() == 0.0 || !e.ratio.is_finite() {
                if e.resid > tol {
                    worst = worst.max(e.resid);
                    z[i] *= Complex64::new(1.0, 1e-3);
                } else {
                    done[i] = true;
                }
                continue;
            }
            let newton = 1.0 / e.ratio;
            let mut repulse = Complex64::new(0.0, 0.0);
            let mut nearest = f64::INFINITY;
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    nearest = nearest.min(diff.norm());
                    if diff.norm() > 0.0 {
                        repulse += 1.0 / diff;
                    }
                }
            }
            // a small residual alone also holds for two iterates on one root
            if e.resid <= tol {
                settled[i] += 1;
                if newton.norm() <= ISOLATION * nearest || settled[i] >= CLUSTER_SWEEPS {
                    done[i] = true;
                } else if newton.norm() <= f64::EPSILON * z[i].norm() {
                    let k = kick(z[i], i);
                    z[i] += k;
                }
                continue;
            }
            worst = worst.max(e.resid);
            let corr = newton / (1.0 - newton * repulse);
            if corr.is_finite() {
                z[i] -= corr;
            }
        }
        if done.iter().all(|&x| x) {
            return Stage { roots: z, converged: true, iterations, worst: 0.0 };
        }
    }
    Stage { roots: z, converged: false, iterations, worst }
}

fn aberth_mp(coeffs: &ScaledPolynomial, start: Vec<BigComplex>, tol: f64) -> Stage<BigComplex> {
    let d = start.len();
    let bits = start[0].prec();
    let mut w = start;
    let mut approx: Vec<Complex64> = w.iter().map(BigComplex::to_c64).collect();
    let mut done = vec![false; d];
    let mut settled = vec![0usize; d];
    let mut iterations = 0;
    let mut worst = f64::INFINITY;
    let one = BigComplex::from_f64(1.0, 0.0, bits);
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        worst = 0.0;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let e = coeffs.eval(&w[i]);
            let resid = if e.abs_sum.is_zero() {
                0.0
            } else {
                Float::with_val(bits, e.value.abs() / &e.abs_sum).to_f64()
            };
            if e.deriv.is_zero() {
                if resid > tol {
                    worst = worst.max(resid);
                    w[i] = w[i].mul(&BigComplex::from_f64(1.0, 1e-3, bits));
                    approx[i] = w[i].to_c64();
                } else {
                    done[i] = true;
                }
                continue;
            }
            let newton = e.value.div(&e.deriv);
            // The repulsion term only rescales a Newton step that is already
            // small near convergence, so double precision is enough for it.
            let mut repulse = Complex64::new(0.0, 0.0);
            let mut nearest = f64::INFINITY;
            for j in 0..d {
                if j != i {
                    let diff = approx[i] - approx[j];
                    let r = diff.norm();
                    nearest = nearest.min(r);
                    if r > 0.0 {
                        repulse += 1.0 / diff;
                    }
                }
            }
            if resid <= tol {
                let step = newton.abs_f64();
                settled[i] += 1;
                if step <= ISOLATION * nearest || settled[i] >= CLUSTER_SWEEPS {
                    done[i] = true;
                } else if step <= unit_roundoff(bits) * approx[i].norm() {
                    w[i] += &BigComplex::from_c64(kick(approx[i], i), bits);
                    approx[i] = w[i].to_c64();
                }
                continue;
            }
            worst = worst.max(resid);
            let mut denom = one.clone();
            denom -= &newton.mul(&BigComplex::from_c64(repulse, bits));
            if denom.is_zero() {
                continue;
            }
            let corr = newton.div(&denom);
            if corr.re.is_finite() && corr.im.is_finite() {
                w[i] -= &corr;
                approx[i] = w[i].to_c64();
            }
        }
        if done.iter().all(|&x| x) {
            return Stage { roots: w, converged: true, iterations, worst: 0.0 };
        }
    }
    Stage { roots: w, converged: false, iterations, worst }
}

fn nonlinear_roots(q: &ScaledPolynomial, bits: u32, start: &[Complex64]) -> Result<RootSet> {
    let d = q.degree();
    let scale = root_scale(q);
    // real starting points would stay real under a real-coefficient iteration
    let tilt = Complex64::from_polar(1.0, SEED_TILT);
    let mut seeds: Vec<Complex64> =
        start.iter().filter(|z| z.norm() > 0.0 && z.is_finite()).take(d).map(|z| z * tilt).collect();
    let from_circle = seeds.is_empty();
    let missing = d - seeds.len();
    seeds.extend(circle_seeds(missing).into_iter().map(|z| z * scale));
    let view = q.view().filter(|_| bits <= NATIVE_BITS || from_circle);
    let mut iterations = 0;
    let mut mp_start = None;
    if let Some(v) = view {
        let z: Vec<Complex64> = seeds.iter().map(|w| w / v.scale).collect();
        let stage = aberth_f64(v, z, residual_threshold(NATIVE_BITS));
        iterations += stage.iterations;
        if bits <= NATIVE_BITS {
            if !stage.converged {
                return Err(Error::NonConvergence { degree: d, bits, residual: stage.worst });
            }
            let mut w: Vec<BigComplex> =
                stage.roots.iter().map(|z| BigComplex::from_c64(z * v.scale, bits)).collect();
            let radii = inclusion_radii_view(v, &stage.roots);
            pair_conjugates(&mut w, &radii);
            return finish(q, w, bits, iterations);
        }
        mp_start = Some(stage.roots.iter().map(|z| BigComplex::from_c64(z * v.scale, bits)).collect());
    }
    let mp_start = mp_start.unwrap_or_else(|| seeds.iter().map(|&z| BigComplex::from_c64(z, bits)).collect());
    let work = q.with_precision(bits);
    let stage = aberth_mp(&work, mp_start, residual_threshold(bits));
    iterations += stage.iterations;
    if !stage.converged {
        return Err(Error::NonConvergence { degree: d, bits, residual: stage.worst });
    }
    let mut w = stage.roots;
    let (_, radii) = residuals_and_radii(&work, &w);
    pair_conjugates(&mut w, &radii);
    finish(&work, w, bits, iterations)
}

/// Geometric-mean root modulus `|a_0|^(1/d)` of a monic polynomial with
/// nonzero constant term.
fn root_scale(q: &ScaledPolynomial) -> f64 {
    let d = q.degree();
    let (m, e) = q.norm_coeffs()[0].to_f64_exp();
    ((m.abs().ln() + e as f64 * std::f64::consts::LN_2) / d as f64).exp()
}

fn finish(q: &ScaledPolynomial, w: Vec<BigComplex>, bits: u32, iterations: usize) -> Result<RootSet> {
    let work = if q.bits() == bits { q.clone() } else { q.with_precision(bits) };
    let (residuals, error_radii) = residuals_and_radii(&work, &w);
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst > residual_threshold(bits) {
        return Err(Error::NonConvergence { degree: q.degree(), bits, residual: worst });
    }
    Ok(RootSet { roots: w.iter().map(BigComplex::to_c64).collect(), roots_mp: w, residuals, error_radii, precision_bits: bits, iterations })
}

/// Normalized residuals and inclusion radii at the precision of the roots.
fn residuals_and_radii(q: &ScaledPolynomial, w: &[BigComplex]) -> (Vec<f64>, Vec<f64>) {
    let d = w.len();
    let bits = w[0].prec();
    let kappa = (4 * d + 4) as f64 * unit_roundoff(bits);
    let approx: Vec<Complex64> = w.iter().map(BigComplex::to_c64).collect();
    let mut residuals = Vec::with_capacity(d);
    let mut radii = Vec::with_capacity(d);
    for i in 0..d {
        let e = q.eval(&w[i]);
        let vabs = e.value.abs();
        let resid = if e.abs_sum.is_zero() { 0.0 } else { Float::with_val(bits, &vabs / &e.abs_sum).to_f64() };
        let mut bound = Float::with_val(bits, &e.abs_sum * kappa);
        bound += &vabs;
        // distinct roots are far apart compared with double rounding
        let log_prod: f64 = (0..d).filter(|&j| j != i).map(|j| (approx[i] - approx[j]).norm().ln()).sum();
        let r = if bound.is_zero() { 0.0 } else { ((d as f64).ln() + bound.ln().to_f64() - log_prod).exp() };
        residuals.push(resid);
        radii.push(r);
    }
    (residuals, radii)
}

fn inclusion_radii_view(view: &FloatView, z: &[Complex64]) -> Vec<f64> {
    let d = z.len();
    let kappa = (4 * d + 4) as f64 * f64::EPSILON;
    (0..d)
        .map(|i| {
            let zi = z[i];
            // |P̃(z_i)| relative to the absolute sum, from the same evaluation path
            let e = view.eval_scaled(zi);
            let log_abs_sum: f64 = if zi.norm() <= 1.0 {
                view.coeffs.iter().rev().fold(0.0, |s, a| s * zi.norm() + a.abs()).ln()
            } else {
                let ru = 1.0 / zi.norm();
                view.coeffs.iter().fold(0.0, |s, a| s * ru + a.abs()).ln() + d as f64 * zi.norm().ln()
            };
            let log_bound = log_abs_sum + (e.resid + kappa).ln();
            let log_prod: f64 = (0..d).filter(|&j| j != i).map(|j| (zi - z[j]).norm().ln()).sum();
            view.scale * ((d as f64).ln() + log_bound - log_prod).exp()
        })
        .collect()
}

/// Real coefficients: pair each root with the one closest to its conjugate
/// when their inclusion disks allow it, and average the pair. Unpaired roots
/// whose disk meets the real axis are made real.
fn pair_conjugates(w: &mut [BigComplex], radii: &[f64]) {
    let d = w.len();
    let approx: Vec<Complex64> = w.iter().map(BigComplex::to_c64).collect();
    let mut used = vec![false; d];
    for i in 0..d {
        if used[i] {
            continue;
        }
        let target = approx[i].conj();
        let partner = (0..d)
            .filter(|&j| j != i && !used[j])
            .map(|j| (j, (approx[j] - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let slack = 8.0 * f64::EPSILON * approx[i].norm();
        if let Some((j, dist)) = partner {
            if approx[i].im != 0.0 && dist <= radii[i] + radii[j] + slack {
                let mut re = w[i].re.clone();
                re += &w[j].re;
                re /= 2u32;
                let mut im = w[i].im.clone();
                im -= &w[j].im;
                im /= 2u32;
                w[j] = BigComplex { re: re.clone(), im: -im.clone() };
                w[i] = BigComplex { re, im };
                used[i] = true;
                used[j] = true;
                continue;
            }
        }
        if approx[i].im.abs() <= radii[i] + slack {
            w[i].im = Float::new(w[i].prec());
            used[i] = true;
        }
    }
}

/// Newton refinement of a single root.
pub fn polish(p: &ScaledPolynomial, w0: Complex64, precision_bits: u32) -> Result<(BigComplex, f64)> {
    let bits = precision_bits.max(p.bits()).max(NATIVE_BITS);
    let q = if p.bits() == bits { p.clone() } else { p.with_precision(bits) };
    let mut w = BigComplex::from_c64(w0, bits);
    let mut prev_step = f64::INFINITY;
    let floor = 4.0 * unit_roundoff(bits);
    for _ in 0..100 {
        let e = q.eval(&w);
        if e.value.is_zero() {
            return Ok((w, 0.0));
        }
        if e.deriv.is_zero() {
            break;
        }
        let step = e.value.div(&e.deriv);
        let s = step.abs_f64();
        w -= &step;
        if s <= floor * w.abs_f64() || s >= prev_step {
            break;
        }
        prev_step = s;
    }
    let e = q.eval(&w);
    let resid = if e.abs_sum.is_zero() { 0.0 } else { Float::with_val(bits, e.value.abs() / &e.abs_sum).to_f64() };
    if resid > residual_threshold(bits) {
        return Err(Error::NonConvergence { degree: q.degree(), bits, residual: resid });
    }
    Ok((w, resid))
}
