//! Neighbourhoods of the imaginary and negative real axes used to locate and
//! count spectral points:
//!
//! ```text
//! Λ   : |Re λ| ≤ C₂ (1 + |Im λ|)^-2,  |Im λ| ≥ A₂
//! Q_N : |Re λ| ≤ B_N (1 + |Im λ|)^-N, |Im λ| ≥ A₂
//! M_c : 0 < Re λ ≤ c ln|Im λ|,       |Im λ| ≥ D_c
//! ℛ   : |Im λ| ≤ C₁ (1 + |Re λ|)^-2,  Re λ ≤ −C₀
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct RegionParams {
    pub C2: f64,
    pub A2: f64,
    pub B_N: f64,
    pub N: u32,
    pub c: f64,
    pub D_c: f64,
    pub C1: f64,
    pub C0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    Lambda,
    QN,
    Mc,
    R,
}

impl Region {
    pub fn tag(self) -> &'static str {
        match self {
            Region::Lambda => "Lambda",
            Region::QN => "Q_N",
            Region::Mc => "M_c",
            Region::R => "R_region",
        }
    }
}

/// `A₂ = 1 / min{γ², √(1−γ²)/2}` and the unit conventions for the rest.
pub fn default_params(gamma: f64) -> Result<RegionParams> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::OutOfRange { what: "gamma", value: gamma, expected: "0 < gamma < 1" });
    }
    let a2 = 1.0 / (gamma * gamma).min((1.0 - gamma * gamma).sqrt() / 2.0);
    Ok(RegionParams { A2: a2, ..RegionParams::unit() })
}

impl RegionParams {
    /// Every constant 1 and `N = 2`; the defaults for γ outside (0, 1), where
    /// the A₂ bound is not available.
    pub fn unit() -> Self {
        RegionParams { C2: 1.0, A2: 1.0, B_N: 1.0, N: 2, c: 1.0, D_c: 1.0, C1: 1.0, C0: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("C2", self.C2), ("A2", self.A2), ("B_N", self.B_N), ("c", self.c), ("D_c", self.D_c), ("C1", self.C1)];
        for (what, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::OutOfRange { what, value: v, expected: "positive" });
            }
        }
        if self.N < 1 {
            return Err(Error::OutOfRange { what: "N", value: self.N as f64, expected: ">= 1" });
        }
        if !(self.C0.is_finite() && self.C0 > 0.0) {
            return Err(Error::OutOfRange { what: "C0", value: self.C0, expected: "positive" });
        }
        Ok(())
    }

    pub fn in_lambda(&self, l: Complex64) -> bool {
        let y = l.im.abs();
        y >= self.A2 && l.re.abs() <= self.C2 * (1.0 + y).powi(-2)
    }

    pub fn in_qn(&self, l: Complex64) -> bool {
        let y = l.im.abs();
        y >= self.A2 && l.re.abs() <= self.B_N * (1.0 + y).powi(-(self.N as i32))
    }

    pub fn in_mc(&self, l: Complex64) -> bool {
        let y = l.im.abs();
        y >= self.D_c && l.re > 0.0 && l.re <= self.c * y.ln()
    }

    pub fn in_r(&self, l: Complex64) -> bool {
        l.re <= -self.C0 && l.im.abs() <= self.C1 * (1.0 + l.re.abs()).powi(-2)
    }

    pub fn contains(&self, region: Region, l: Complex64) -> bool {
        match region {
            Region::Lambda => self.in_lambda(l),
            Region::QN => self.in_qn(l),
            Region::Mc => self.in_mc(l),
            Region::R => self.in_r(l),
        }
    }

    /// All regions containing `l`, in the order Λ, Q_N, M_c, ℛ.
    pub fn tags(&self, l: Complex64) -> Vec<Region> {
        [Region::Lambda, Region::QN, Region::Mc, Region::R].into_iter().filter(|&r| self.contains(r, l)).collect()
    }
}
