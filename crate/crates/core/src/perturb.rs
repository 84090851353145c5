//! The root of `F_n(w; η) = B_n(w; 1 + η)` that leaves `w = 0` as `γ` moves
//! through 1. Since `b_m(1 + η) = −η c_m + 2m c_{m−1}`, `F_n = B_n(·; 1) − η R_n`
//! and `w'(0) = 1/2` for every `n`.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mp::{eval_real_poly, BigComplex};
use crate::polymode::{working_precision, ScaledPolynomial, DEFAULT_EXTENDED_BITS};
use crate::rootfind::roots;

/// Smallest `|η|` on the tracking grid, relative to `η_max`.
pub const INNER_ETA: f64 = 1e-6;
/// Tracked roots must be real to this absolute tolerance.
pub const IMAG_TOL: f64 = 1e-12;
/// The nearest other root must stay this many step displacements away.
pub const GAP_FACTOR: f64 = 10.0;
const NEWTON_ITERATIONS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPath {
    pub n: usize,
    /// Increasing, symmetric about 0, which is included.
    pub etas: Vec<f64>,
    pub ws: Vec<f64>,
    /// `−1/(2w)`; `None` at `η = 0`.
    pub lambdas: Vec<Option<f64>>,
    /// Central difference over the two innermost steps.
    pub derivative_at_zero: f64,
    /// Smallest distance from the tracked root to any other root of `F_n`.
    pub min_gap: f64,
    /// Smallest `|∂F/∂w|` along the path.
    pub min_slope: f64,
}

/// Coefficients of `F_n(·; η)`, lowest degree first.
fn coefficients(n: usize, eta: &Float) -> Vec<Float> {
    let bits = eta.prec();
    let mut c = Float::with_val(bits, 1);
    let mut out = Vec::with_capacity(n + 2);
    out.push(Float::with_val(bits, -eta));
    for m in 1..=n + 1 {
        // 2m c_{m−1} − η c_m
        let mut b = Float::with_val(bits, &c * (2 * m as u64));
        if m <= n {
            c *= ((n + m) * (n + 1 - m)) as u64;
            c /= m as u64;
            b -= Float::with_val(bits, eta * &c);
        }
        out.push(b);
    }
    out
}

/// `−(∂F/∂η)/(∂F/∂w)` at `(0, 0)`: `∂F/∂η = −c₀` and `∂F/∂w = b₁(1) = 2c₀`.
pub fn implicit_derivative(n: usize) -> f64 {
    let zero = Float::new(DEFAULT_EXTENDED_BITS);
    let one = Float::with_val(DEFAULT_EXTENDED_BITS, 1);
    let f0 = coefficients(n, &zero);
    let f1 = coefficients(n, &one);
    let d_eta = Float::with_val(DEFAULT_EXTENDED_BITS, &f1[0] - &f0[0]);
    let d_w = &f0[1];
    (-(d_eta / d_w)).to_f64()
}

/// Root of `F_n(·; η)` by real Newton from `start`, with `|∂F/∂w|` there.
fn newton(n: usize, eta: &Float, start: &Float) -> (Float, f64) {
    let bits = eta.prec();
    let coeffs = coefficients(n, eta);
    let mut w = start.clone();
    for _ in 0..NEWTON_ITERATIONS {
        let e = eval_real_poly(&coeffs, &BigComplex::from_real(w.clone()));
        if e.deriv.re.is_zero() {
            break;
        }
        let step = Float::with_val(bits, &e.value.re / &e.deriv.re);
        w -= &step;
        let floor = Float::with_val(bits, w.abs_ref()) >> (bits as i32 - 8);
        if step.abs() <= floor {
            break;
        }
    }
    let e = eval_real_poly(&coeffs, &BigComplex::from_real(w.clone()));
    (w, e.deriv.re.to_f64().abs())
}

/// The tracked root against the full root set of `F_n(·; η)`: it must be one
/// of the roots and real. Returns the distance to the nearest other root.
fn check_against_roots(n: usize, eta: &Float, w: &Float) -> Result<f64> {
    let eta_f = eta.to_f64();
    let p = ScaledPolynomial::from_floats(coefficients(n, eta))?;
    let set = roots(&p, eta.prec())?;
    let w = w.to_f64();
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&a, &b| (set.roots[a].re - w).hypot(set.roots[a].im).total_cmp(&(set.roots[b].re - w).hypot(set.roots[b].im)));
    let near = order[0];
    let z = set.roots[near];
    let dist = (z.re - w).hypot(z.im);
    if dist > IMAG_TOL.max(set.error_radii[near]) + 1e-14 * w.abs() {
        return Err(Error::PathLoss { eta: eta_f, reason: format!("no root of F within {dist:e} of the tracked point") });
    }
    if z.im.abs() > IMAG_TOL {
        return Err(Error::PathLoss { eta: eta_f, reason: format!("tracked root left the real axis (Im w = {:e})", z.im) });
    }
    Ok(order.get(1).map_or(f64::INFINITY, |&j| (set.roots[j].re - w).hypot(set.roots[j].im)))
}

/// `η_max · INNER_ETA` for the derivative, then `k η_max / steps`, `k = 1..=steps`.
fn grid(eta_max: f64, steps: usize) -> Vec<f64> {
    std::iter::once(eta_max * INNER_ETA).chain((1..=steps).map(|k| eta_max * k as f64 / steps as f64)).collect()
}

/// Follow `w(η)` from `w(0) = 0` out to `±η_max` in `steps` equal steps per
/// side, after a first tiny step used for `w'(0)`.
pub fn track_root(n: usize, eta_max: f64, steps: usize) -> Result<RootPath> {
    if !(eta_max > 0.0 && eta_max <= 0.1) {
        return Err(Error::OutOfRange { what: "eta_max", value: eta_max, expected: "0 < eta_max <= 0.1" });
    }
    if steps < 5 {
        return Err(Error::InvalidInput(format!("steps must be at least 5, got {steps}")));
    }
    let bits = working_precision(n, DEFAULT_EXTENDED_BITS);
    let g = grid(eta_max, steps);
    let mut min_gap = f64::INFINITY;
    let mut min_slope = f64::INFINITY;
    let mut sides: Vec<Vec<(f64, f64)>> = Vec::new();
    for sign in [-1.0, 1.0] {
        let mut side = Vec::with_capacity(steps);
        let mut prev: Option<(f64, Float)> = None;
        for &h in &g {
            let eta_f = sign * h;
            let eta = Float::with_val(bits, eta_f);
            // w ≈ η/2 at first, then scale the previous root with η.
            let start = match &prev {
                None => Float::with_val(bits, &eta / 2u32),
                Some((pe, pw)) => Float::with_val(bits, pw * (eta_f / pe)),
            };
            let (w, slope) = newton(n, &eta, &start);
            min_slope = min_slope.min(slope);
            let gap = check_against_roots(n, &eta, &w)?;
            let moved = (w.to_f64() - side.last().map_or(0.0, |p: &(f64, f64)| p.1)).abs();
            if !(gap > GAP_FACTOR * moved) {
                return Err(Error::PathLoss { eta: eta_f, reason: format!("another root at distance {gap:e} after a step of {moved:e}") });
            }
            min_gap = min_gap.min(gap);
            side.push((eta_f, w.to_f64()));
            prev = Some((eta_f, w));
        }
        sides.push(side);
    }
    let (neg, pos) = (&sides[0], &sides[1]);
    let derivative_at_zero = (pos[0].1 - neg[0].1) / (pos[0].0 - neg[0].0);
    let mut pts: Vec<(f64, f64)> = neg.iter().rev().copied().collect();
    pts.push((0.0, 0.0));
    pts.extend(pos.iter().copied());
    let lambdas = pts.iter().map(|&(e, w)| (e != 0.0).then(|| -0.5 / w)).collect();
    Ok(RootPath {
        n,
        etas: pts.iter().map(|p| p.0).collect(),
        ws: pts.iter().map(|p| p.1).collect(),
        lambdas,
        derivative_at_zero,
        min_gap,
        min_slope,
    })
}

/// [`track_root`] with `η_max` halved from `start` until the path is not lost,
/// at most `halvings` times. The root collides with its neighbours at
/// `|η| ~ n^-2`, so the admissible `η_max` shrinks with `n`.
pub fn track_root_admissible(n: usize, start: f64, steps: usize, halvings: u32) -> Result<RootPath> {
    let mut eta_max = start;
    let mut last = None;
    for _ in 0..=halvings {
        match track_root(n, eta_max, steps) {
            Err(e @ Error::PathLoss { .. }) => {
                last = Some(e);
                eta_max /= 2.0;
            }
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}
