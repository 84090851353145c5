//! Argument-principle root counts `(1/2πi) ∮ P'/P dw`.
//!
//! The right half-disk `ω = α ∪ β` (arc `α = {|w| = R, Re w ≥ 0}`, diameter
//! `β = {iy : |y| ≤ R}`) is integrated over its upper half only: real
//! coefficients make the two halves complex conjugates of each other.
//! Quadrature is composite 16-point Gauss–Legendre with adaptive bisection;
//! the logarithmic derivative is taken from the double-precision view when
//! its a-priori error bound allows and from MPFR otherwise.

use std::cell::{Cell, RefCell};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::num::NonZeroUsize;
use std::rc::Rc;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rug::Float;

use crate::error::{Error, Result};
use crate::mp::{eval_real_poly_imag, unit_roundoff, BigComplex};
use crate::polymode::{char_poly, ScaledPolynomial};

/// Largest distance from the nearest integer accepted as a count.
pub const SNAP_RADIUS: f64 = 0.25;
/// A root closer than this to a quadrature node invalidates the contour.
pub const MIN_ROOT_DISTANCE: f64 = 1e-9;
pub const MIN_NODES_PER_SEGMENT: usize = 64;
/// Radius factors tried, in order, when the contour passes too close to a root.
pub const NUDGES: [f64; 3] = [1.02, 0.98, 1.04];

const PANEL_ORDER: usize = 16;
/// Relative accuracy demanded of a logarithmic-derivative value.
const RATIO_RTOL: f64 = 1e-6;
/// Absolute quadrature tolerance per segment, in units of the raw integral.
const SEGMENT_TOL: f64 = 1e-7;
const MAX_DEPTH: u32 = 40;
const NOISE_FACTOR: f64 = 4.0;
const MAX_EVAL_BITS: u32 = 1 << 14;

static RULE: Lazy<Vec<(f64, f64)>> =
    Lazy::new(|| GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).unwrap()).as_node_weight_pairs().to_vec());

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ContourKind {
    HalfDiskRight,
    Circle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub radius: f64,
    /// Ignored for the half-disk, which is centred at 0.
    pub center: Complex64,
    pub nodes_per_segment: usize,
    /// Node doublings allowed when the integral does not snap.
    pub max_refinements: u32,
}

impl ContourSpec {
    pub fn half_disk(radius: f64) -> Self {
        ContourSpec {
            kind: ContourKind::HalfDiskRight,
            radius,
            center: Complex64::new(0.0, 0.0),
            nodes_per_segment: MIN_NODES_PER_SEGMENT,
            max_refinements: 4,
        }
    }

    pub fn circle(center: Complex64, radius: f64) -> Self {
        ContourSpec { kind: ContourKind::Circle, center, ..Self::half_disk(radius) }
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::OutOfRange { what: "radius", value: self.radius, expected: "positive" });
        }
        if self.nodes_per_segment < MIN_NODES_PER_SEGMENT {
            return Err(Error::OutOfRange {
                what: "nodes_per_segment",
                value: self.nodes_per_segment as f64,
                expected: ">= 64",
            });
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidInput("contour center must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountResult {
    pub count: usize,
    pub raw_integral: Complex64,
    pub snap_distance: f64,
    pub nodes_used: usize,
    /// Radius actually integrated over, after any nudges.
    pub radius_used: f64,
    pub nudges: u32,
    /// Smallest normalized `|P| / Σ|a_m||w|^m` seen on the diameter (half-disk)
    /// or on the circle.
    pub min_normalized_value: f64,
}

struct LogDerivative<'a> {
    p: &'a ScaledPolynomial,
    degree: f64,
    extended: RefCell<Vec<Rc<ScaledPolynomial>>>,
    evals: Cell<usize>,
    min_value: Cell<f64>,
}

impl<'a> LogDerivative<'a> {
    fn new(p: &'a ScaledPolynomial) -> Self {
        LogDerivative {
            p,
            degree: p.degree() as f64,
            extended: RefCell::new(Vec::new()),
            evals: Cell::new(0),
            min_value: Cell::new(f64::INFINITY),
        }
    }

    fn too_close(&self, w: Complex64, ratio: Complex64) -> Result<()> {
        // |Σ 1/(w − w_j)| ≤ d / dist, so a large ratio bounds the distance
        let distance = self.degree / ratio.norm();
        if !(distance >= MIN_ROOT_DISTANCE) {
            return Err(Error::ContourTooClose { distance, re: w.re, im: w.im });
        }
        Ok(())
    }

    fn at(&self, w: Complex64, track: bool) -> Result<Complex64> {
        self.evals.set(self.evals.get() + 1);
        if let Some(view) = self.p.view() {
            let e = view.eval(w);
            if e.ratio.is_finite() && e.ratio_err <= RATIO_RTOL * e.ratio.norm() {
                if track {
                    self.min_value.set(self.min_value.get().min(e.resid));
                }
                self.too_close(w, e.ratio)?;
                return Ok(e.ratio);
            }
        }
        // cancellation on the contour costs far fewer bits than root conditioning
        let mut bits = 128;
        loop {
            let q = self.extended_at(bits);
            let e = if w.re == 0.0 {
                eval_real_poly_imag(q.norm_coeffs(), &Float::with_val(bits, w.im))
            } else {
                q.eval(&BigComplex::from_c64(w, bits))
            };
            if e.value.is_zero() {
                return Err(Error::ContourTooClose { distance: 0.0, re: w.re, im: w.im });
            }
            let ratio = e.deriv.div(&e.value);
            let r = ratio.to_c64();
            let vabs = e.value.abs();
            let kappa = (4.0 * self.degree + 4.0) * unit_roundoff(bits);
            let err = Float::with_val(bits, ratio.abs() * &e.abs_sum + &e.abs_deriv_sum) / &vabs * kappa;
            if err.to_f64() <= RATIO_RTOL * r.norm() || bits >= MAX_EVAL_BITS {
                if track {
                    self.min_value.set(self.min_value.get().min(Float::with_val(bits, &vabs / &e.abs_sum).to_f64()));
                }
                self.too_close(w, r)?;
                return Ok(r);
            }
            bits *= 2;
        }
    }

    fn extended_at(&self, bits: u32) -> Rc<ScaledPolynomial> {
        let mut cache = self.extended.borrow_mut();
        if let Some(q) = cache.iter().find(|q| q.bits() == bits) {
            return Rc::clone(q);
        }
        let q = Rc::new(self.p.with_precision(bits));
        cache.push(Rc::clone(&q));
        q
    }
}

/// One Gauss–Legendre panel: the integral and the integral of its modulus.
fn panel<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = Complex64::new(0.0, 0.0);
    let mut m = 0.0;
    for &(x, wt) in RULE.iter() {
        let v = f(mid + half * x)?;
        s += v * wt;
        m += v.norm() * wt;
    }
    Ok((s * half, m * half))
}

/// Adaptive composite Gauss–Legendre on `[a, b]` starting from `panels`
/// equal panels; each panel is bisected until its two halves agree with it
/// to within the tolerance or the evaluation noise, whichever is larger.
fn integrate<F>(f: &F, a: f64, b: f64, panels: usize, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let len = b - a;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let lo = a + len * k as f64 / panels as f64;
        let hi = a + len * (k + 1) as f64 / panels as f64;
        let (coarse, _) = panel(f, lo, hi)?;
        // depth-first, left to right: the summation order is fixed
        let mut stack = vec![(lo, hi, coarse, 0u32)];
        while let Some((lo, hi, coarse, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let (left, lm) = panel(f, lo, mid)?;
            let (right, rm) = panel(f, mid, hi)?;
            let fine = left + right;
            let allowed = tol * (hi - lo) / len + NOISE_FACTOR * RATIO_RTOL * (lm + rm);
            if (fine - coarse).norm() <= allowed || depth >= MAX_DEPTH {
                total += fine;
            } else {
                stack.push((mid, hi, right, depth + 1));
                stack.push((lo, mid, left, depth + 1));
            }
        }
    }
    Ok(total)
}

fn integrate_once(ld: &LogDerivative, kind: ContourKind, center: Complex64, radius: f64, panels: usize, tol: f64) -> Result<Complex64> {
    match kind {
        ContourKind::HalfDiskRight => {
            // the folded integrand hides a root sitting exactly at a corner
            for w in [Complex64::new(0.0, 0.0), Complex64::new(0.0, radius), Complex64::new(radius, 0.0)] {
                ld.at(w, false)?;
            }
            // upper halves: arc θ ∈ [0, π/2], diameter y ∈ [0, R]
            let arc = |t: f64| -> Result<Complex64> {
                let w = Complex64::from_polar(radius, t);
                let g = ld.at(w, false)? * Complex64::i() * w;
                Ok(Complex64::new(g.im, 0.0))
            };
            let diameter = |y: f64| -> Result<Complex64> {
                let w = Complex64::new(0.0, y);
                let h = ld.at(w, true)? * Complex64::i();
                Ok(Complex64::new(h.im, 0.0))
            };
            let a = integrate(&arc, 0.0, FRAC_PI_2, panels, tol)?;
            let b = integrate(&diameter, 0.0, radius, panels, tol)?;
            // 2i (∫Im g − ∫Im h) / (2πi)
            Ok((a - b) / PI)
        }
        ContourKind::Circle => {
            let f = |t: f64| -> Result<Complex64> {
                let e = Complex64::from_polar(radius, t);
                Ok(ld.at(center + e, true)? * Complex64::i() * e)
            };
            Ok(integrate(&f, 0.0, TAU, 2 * panels, tol)? / Complex64::new(0.0, TAU))
        }
    }
}

fn count_at_radius(p: &ScaledPolynomial, c: &ContourSpec, radius: f64) -> Result<CountResult> {
    let ld = LogDerivative::new(p);
    let mut last = Complex64::new(f64::NAN, f64::NAN);
    for r in 0..=c.max_refinements {
        let panels = (c.nodes_per_segment << r) / PANEL_ORDER;
        let tol = SEGMENT_TOL / (1u64 << r) as f64;
        let raw = integrate_once(&ld, c.kind, c.center, radius, panels.max(1), tol)?;
        last = raw;
        let nearest = raw.re.round();
        let snap = (raw - Complex64::new(nearest, 0.0)).norm();
        if snap < SNAP_RADIUS && nearest >= 0.0 {
            return Ok(CountResult {
                count: nearest as usize,
                raw_integral: raw,
                snap_distance: snap,
                nodes_used: ld.evals.get(),
                radius_used: radius,
                nudges: 0,
                min_normalized_value: ld.min_value.get(),
            });
        }
    }
    Err(Error::NoSnap { re: last.re, im: last.im })
}

/// Number of roots of `p`, with multiplicity, strictly inside the contour.
pub fn count_roots(p: &ScaledPolynomial, c: &ContourSpec) -> Result<CountResult> {
    c.validate()?;
    let mut err = match count_at_radius(p, c, c.radius) {
        Ok(r) => return Ok(r),
        Err(e @ (Error::ContourTooClose { .. } | Error::NoSnap { .. })) => e,
        Err(e) => return Err(e),
    };
    for (k, f) in NUDGES.iter().enumerate() {
        match count_at_radius(p, c, c.radius * f) {
            Ok(mut r) => {
                r.nudges = k as u32 + 1;
                return Ok(r);
            }
            Err(e @ (Error::ContourTooClose { .. } | Error::NoSnap { .. })) => err = e,
            Err(e) => return Err(e),
        }
    }
    Err(err)
}

/// Half-disk counts `q_n(ε_k)` for `B_n(w; ε_k γ)`, `ε_k = k/(steps − 1)`.
/// γ outside `[0, 1]` is refused unless `allow_outside` is set.
pub fn homotopy_sweep(n: usize, gamma: f64, steps: usize, allow_outside: bool) -> Result<Vec<CountResult>> {
    if steps < 2 {
        return Err(Error::OutOfRange { what: "steps", value: steps as f64, expected: ">= 2" });
    }
    if !(gamma >= 0.0 && (gamma <= 1.0 || allow_outside) && gamma.is_finite()) {
        return Err(Error::OutOfRange { what: "gamma", value: gamma, expected: "0 <= gamma <= 1" });
    }
    let spec = ContourSpec::half_disk(2.0);
    (0..steps)
        .map(|k| {
            let eps = k as f64 / (steps - 1) as f64;
            count_roots(&char_poly(n, eps * gamma), &spec).map_err(|e| Error::Homotopy { eps, source: Box::new(e) })
        })
        .collect()
}
