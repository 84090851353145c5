//! Spectral points `λ = −1/(2w)` of each mode and the assembled spectrum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::root_residual;
use crate::polymode::{char_poly_with_precision, working_precision};
use crate::regions::{Region, RegionParams};
use crate::rootfind::{roots_from, RootSet};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Eigenvalue,
    IncomingResonance,
    Indeterminate,
}

impl PointClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PointClass::Eigenvalue => "eigenvalue",
            PointClass::IncomingResonance => "incoming_resonance",
            PointClass::Indeterminate => "indeterminate",
        }
    }

    /// Sign of `Re w` against the root's error radius.
    pub fn of(w: Complex64, error_radius: f64) -> Self {
        if w.re > error_radius {
            PointClass::Eigenvalue
        } else if w.re < -error_radius {
            PointClass::IncomingResonance
        } else {
            PointClass::Indeterminate
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub n: usize,
    pub w: Complex64,
    pub lambda: Complex64,
    pub multiplicity: usize,
    pub class: PointClass,
    pub poly_residual: f64,
    pub hankel_residual: f64,
    pub error_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeFailure {
    pub n: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub gamma: f64,
    pub n_max: usize,
    pub points: Vec<SpectralPoint>,
    /// As requested; each mode runs at `working_precision(n, precision_bits)`.
    pub precision_bits: u32,
    pub tool_version: String,
    pub timestamp: String,
    /// Modes whose `w = 0` root was dropped (γ = 1).
    #[serde(default)]
    pub zero_root_modes: Vec<usize>,
    #[serde(default)]
    pub failures: Vec<ModeFailure>,
}

impl Spectrum {
    pub fn mode(&self, n: usize) -> impl Iterator<Item = &SpectralPoint> {
        self.points.iter().filter(move |p| p.n == n)
    }

    /// Points whose conjugate has no partner within the two error radii
    /// (plus a few ulps of `|λ|`).
    pub fn unpaired(&self) -> Vec<&SpectralPoint> {
        self.points
            .iter()
            .filter(|p| {
                let c = p.w.conj();
                !self.mode(p.n).any(|q| (q.w - c).norm() <= p.error_radius + q.error_radius + 8.0 * f64::EPSILON * p.w.norm())
            })
            .collect()
    }

    pub fn count(&self, class: PointClass) -> usize {
        self.points.iter().filter(|p| p.class == class).count()
    }
}

pub struct ModeSolution {
    pub points: Vec<SpectralPoint>,
    pub zero_roots: usize,
    pub roots: RootSet,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::OutOfRange { what: "gamma", value: gamma, expected: "finite and >= 0" });
    }
    Ok(())
}

/// Solve mode `n`, starting the root iteration from `seeds` when given.
pub fn solve_mode(n: usize, gamma: f64, precision_bits: u32, seeds: &[Complex64]) -> Result<ModeSolution> {
    check_gamma(gamma).map_err(|e| e.in_mode(n, gamma))?;
    let bits = working_precision(n, precision_bits);
    let p = char_poly_with_precision(n, gamma, bits);
    let set = match roots_from(&p, bits, seeds) {
        Ok(s) => Ok(s),
        Err(_) if !seeds.is_empty() => roots_from(&p, bits, &[]),
        Err(e) => Err(e),
    }
    .map_err(|e| e.in_mode(n, gamma))?;
    let mut points = Vec::with_capacity(set.len());
    let mut zero_roots = 0;
    for (i, wm) in set.roots_mp.iter().enumerate() {
        if wm.is_zero() {
            zero_roots += 1;
            continue;
        }
        let mut lm = wm.recip();
        lm.re /= -2i32;
        lm.im /= -2i32;
        let w = set.roots[i];
        let r = set.error_radii[i];
        let hankel_residual = root_residual(n, wm, gamma).map_err(|e| e.in_mode(n, gamma))?;
        points.push(SpectralPoint {
            n,
            w,
            lambda: lm.to_c64(),
            multiplicity: 2 * n + 1,
            class: PointClass::of(w, r),
            poly_residual: set.residuals[i],
            hankel_residual,
            error_radius: r,
        });
    }
    points.sort_by(|a, b| b.lambda.im.total_cmp(&a.lambda.im).then(a.lambda.re.total_cmp(&b.lambda.re)));
    Ok(ModeSolution { points, zero_roots, roots: set })
}

/// The `n + 1` spectral points of mode `n` (`n` at γ = 1, where the zero root
/// is dropped), ordered by decreasing `Im λ`.
pub fn mode_spectrum(n: usize, gamma: f64, precision_bits: u32) -> Result<Vec<SpectralPoint>> {
    solve_mode(n, gamma, precision_bits, &[]).map(|s| s.points)
}

/// Roots of mode `n` moved towards mode `n + 1`: the zeros of the Bessel
/// polynomials spread roughly like `1/(n + 1/2)`.
pub fn continuation_seeds(roots: &RootSet, n: usize) -> Vec<Complex64> {
    let f = (n as f64 + 0.5) / (n as f64 + 1.5);
    roots.roots.iter().map(|w| w * f).collect()
}

/// RFC 3339 time, pinned by `SOURCE_DATE_EPOCH` when set.
pub fn timestamp() -> String {
    let t = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|s| chrono::DateTime::from_timestamp(s, 0))
        .unwrap_or_else(chrono::Utc::now);
    t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// All modes `0..=n_max`. Failed modes are listed in `failures` and
/// contribute no points; the next mode then starts cold.
pub fn full_spectrum(gamma: f64, n_max: usize, precision_bits: u32) -> Spectrum {
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut zero_root_modes = Vec::new();
    let mut seeds = Vec::new();
    for n in 0..=n_max {
        match solve_mode(n, gamma, precision_bits, &seeds) {
            Ok(sol) => {
                seeds = continuation_seeds(&sol.roots, n);
                if sol.zero_roots > 0 {
                    zero_root_modes.push(n);
                }
                points.extend(sol.points);
            }
            Err(e) => {
                log::warn!("{e}");
                seeds.clear();
                failures.push(ModeFailure { n, error: e.to_string() });
            }
        }
    }
    Spectrum {
        gamma,
        n_max,
        points,
        precision_bits,
        tool_version: TOOL_VERSION.to_string(),
        timestamp: timestamp(),
        zero_root_modes,
        failures,
    }
}

/// Region tags of a point, evaluated on `λ`; empty when it lies in none.
pub fn classify_point(p: &SpectralPoint, r: &RegionParams) -> Vec<Region> {
    r.tags(p.lambda)
}

/// `max |Re λ|` over points in Λ with `T ≤ |Im λ| ≤ 2T`.
pub fn band_envelope(points: &[SpectralPoint], r: &RegionParams, t: f64) -> Option<f64> {
    points
        .iter()
        .filter(|p| r.in_lambda(p.lambda))
        .filter(|p| (t..=2.0 * t).contains(&p.lambda.im.abs()))
        .map(|p| p.lambda.re.abs())
        .reduce(f64::max)
}

/// Smallest `C₂` putting every point with `|Im λ| ≥ A₂` into Λ, i.e.
/// `max |Re λ| (1 + |Im λ|)²` over those points.
pub fn fitted_c2(points: &[SpectralPoint], a2: f64) -> Option<f64> {
    points
        .iter()
        .filter(|p| p.lambda.im.abs() >= a2)
        .map(|p| p.lambda.re.abs() * (1.0 + p.lambda.im.abs()).powi(2))
        .reduce(f64::max)
}
