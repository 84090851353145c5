//! Counting functions `N(r)` with multiplicity, Weyl leading coefficients and
//! the quadratic growth fit `N(r) ≈ a₂ r² + a₁ r`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regions::{Region, RegionParams};
use crate::spectrum::Spectrum;

/// Points of mode `n_max` inside the counted region and within this factor
/// of the largest radius mark a count as possibly truncated.
pub const TRUNCATION_MARGIN: f64 = 1.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingSeries {
    pub radii: Vec<f64>,
    pub counts: Vec<u64>,
    /// `None` counts every point.
    pub region: Option<Region>,
    pub params: RegionParams,
    pub gamma: f64,
    pub n_max: usize,
    /// The top mode still has points with `|λ|` near the largest radius, so
    /// higher modes would probably contribute.
    pub truncated: bool,
}

pub fn counting_function(s: &Spectrum, region: Option<Region>, params: &RegionParams, radii: &[f64]) -> Result<CountingSeries> {
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("radii must be positive and strictly increasing".into()));
    }
    let mut inside: Vec<(f64, u64)> = s
        .points
        .iter()
        .filter(|p| region.is_none_or(|g| params.contains(g, p.lambda)))
        .map(|p| (p.lambda.norm(), p.multiplicity as u64))
        .collect();
    inside.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut counts = Vec::with_capacity(radii.len());
    let (mut k, mut acc) = (0, 0u64);
    for &r in radii {
        while k < inside.len() && inside[k].0 <= r {
            acc += inside[k].1;
            k += 1;
        }
        counts.push(acc);
    }
    let truncated = match radii.last() {
        Some(&r_max) => s
            .mode(s.n_max)
            .filter(|p| region.is_none_or(|g| params.contains(g, p.lambda)))
            .any(|p| p.lambda.norm() <= TRUNCATION_MARGIN * r_max),
        None => false,
    };
    if truncated {
        log::warn!("mode {} has points below {}·r_max; counts may be incomplete", s.n_max, TRUNCATION_MARGIN);
    }
    Ok(CountingSeries { radii: radii.to_vec(), counts, region, params: *params, gamma: s.gamma, n_max: s.n_max, truncated })
}

/// Boundary parameter on the unit sphere in R³ as a function of the polar
/// and azimuthal angles `(θ, φ)`.
pub enum GammaProfile<'a> {
    Constant(f64),
    Function(&'a dyn Fn(f64, f64) -> f64),
}

/// Volume of the unit ball in R^k.
fn ball_volume(k: usize) -> f64 {
    // ω_k = π^{k/2} / Γ(k/2 + 1), stepping ω_k = 2π/k · ω_{k−2}
    let (mut v, mut j) = if k % 2 == 0 { (1.0, 0) } else { (2.0, 1) };
    while j < k {
        j += 2;
        v *= 2.0 * PI / j as f64;
    }
    v
}

/// Area of the unit sphere in R^d, `d ω_d`.
fn sphere_area(d: usize) -> f64 {
    d as f64 * ball_volume(d)
}

fn check_dimension(d: usize) -> Result<()> {
    if d < 3 || d % 2 == 0 {
        return Err(Error::InvalidInput(format!("dimension must be odd and >= 3, got {d}")));
    }
    Ok(())
}

fn positive_part(x: f64, warned: &mut bool) -> f64 {
    if x < 0.0 && !*warned {
        *warned = true;
        log::warn!("gamma exceeds 1 on part of the sphere; 1 - gamma^2 clipped to 0");
    }
    x.max(0.0)
}

/// `(2 ω_{d−1} / (2π)^{d−1}) ∫_{S^{d−1}} (1 − γ²)^{(d−1)/2} dS`.
///
/// A variable profile is integrated on the sphere in R³ only, by
/// Gauss–Legendre in `θ` times the trapezoid rule in `φ`.
pub fn leading_coefficient(d: usize, gamma: GammaProfile<'_>, quad_order: usize) -> Result<f64> {
    check_dimension(d)?;
    let k = (d - 1) as i32;
    let pre = 2.0 * ball_volume(d - 1) / (2.0 * PI).powi(k);
    let mut warned = false;
    let integral = match gamma {
        GammaProfile::Constant(g) => sphere_area(d) * positive_part(1.0 - g * g, &mut warned).powf(k as f64 / 2.0),
        GammaProfile::Function(f) => {
            if d != 3 {
                return Err(Error::InvalidInput("variable gamma is supported on the sphere in R^3 only".into()));
            }
            let order = NonZeroUsize::new(quad_order.max(2)).expect("nonzero");
            let rule = GaussLegendre::new(order);
            let n_phi = 2 * order.get();
            let h = 2.0 * PI / n_phi as f64;
            let mut total = 0.0;
            for &(x, wt) in rule.as_node_weight_pairs() {
                let theta = 0.5 * PI * (x + 1.0);
                let mut ring = 0.0;
                for j in 0..n_phi {
                    let g = f(theta, j as f64 * h);
                    ring += positive_part(1.0 - g * g, &mut warned);
                }
                total += 0.5 * PI * wt * theta.sin() * ring * h;
            }
            total
        }
    };
    Ok(pre * integral)
}

/// `(ω_{d−1} / (2π)^{d−1}) |S^{d−1}| (γ² − 1)^{(d−1)/2}`, the coefficient
/// for the eigenvalues near the negative real axis when `γ > 1`.
pub fn weyl_coefficient_gt1(d: usize, gamma: f64) -> Result<f64> {
    check_dimension(d)?;
    if !(gamma > 1.0) {
        return Err(Error::OutOfRange { what: "gamma", value: gamma, expected: "> 1" });
    }
    let k = (d - 1) as i32;
    Ok(ball_volume(d - 1) / (2.0 * PI).powi(k) * sphere_area(d) * (gamma * gamma - 1.0).powf(k as f64 / 2.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub a2: f64,
    pub a1: f64,
    /// RMS residual over `N(r_max)`.
    pub rel_resid: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

/// Least-squares fit of `N(r) = a₂ r² + a₁ r` over the radii in `[r_min, r_max]`.
pub fn fit_growth(cs: &CountingSeries, r_min: f64, r_max: f64) -> Result<GrowthFit> {
    let data: Vec<(f64, f64)> = cs
        .radii
        .iter()
        .zip(&cs.counts)
        .filter(|(r, _)| (r_min..=r_max).contains(*r))
        .map(|(&r, &c)| (r, c as f64))
        .collect();
    if data.len() < 8 {
        return Err(Error::InsufficientData(format!("{} radii in [{r_min}, {r_max}], need 8", data.len())));
    }
    if data.iter().all(|&(_, c)| c == 0.0) {
        return Err(Error::InsufficientData(format!("all counts in [{r_min}, {r_max}] are zero")));
    }
    // Normal equations in the scaled variable t = r / r_top.
    let top = data.last().expect("nonempty").0;
    let (mut s2, mut s3, mut s4, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(r, c) in &data {
        let t = r / top;
        s2 += t * t;
        s3 += t * t * t;
        s4 += t * t * t * t;
        y1 += c * t;
        y2 += c * t * t;
    }
    let det = s4 * s2 - s3 * s3;
    if !(det.abs() > 1e-14 * s4 * s2) {
        return Err(Error::InsufficientData("radii do not determine a quadratic".into()));
    }
    let b2 = (y2 * s2 - y1 * s3) / det;
    let b1 = (s4 * y1 - s3 * y2) / det;
    let (a2, a1) = (b2 / (top * top), b1 / top);
    let ss: f64 = data.iter().map(|&(r, c)| (c - a2 * r * r - a1 * r).powi(2)).sum();
    let rms = (ss / data.len() as f64).sqrt();
    let n_top = data.last().expect("nonempty").1;
    let rel_resid = if n_top > 0.0 { rms / n_top } else { f64::INFINITY };
    Ok(GrowthFit { a2, a1, rel_resid, r_min, r_max, points: data.len() })
}
