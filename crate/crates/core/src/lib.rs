//! Spectra of the dissipative exterior problem on the unit ball in R³.
//!
//! For constant boundary parameter `γ ≥ 0` the boundary condition
//! `∂_ν u − γ ∂_t u = 0` decouples over spherical harmonics of degree `n`,
//! and the spectral parameters of mode `n` are `λ = −1/(2w)` where `w` runs
//! over the roots of a degree `n + 1` characteristic polynomial `B_n(w; γ)`.
//! Roots with `Re w > 0` are eigenvalues (`Re λ < 0`), roots with `Re w < 0`
//! are incoming resonances (`Re λ > 0`).
//!
//! The crate is organised bottom-up:
//!
//! - [`polymode`]: Bessel-polynomial and characteristic-polynomial coefficients
//! - [`rootfind`]: simultaneous root finding, Fujiwara bound, Newton polishing
//! - [`contour`]: argument-principle root counting and the ε-homotopy sweep
//! - [`hankel`]: closed-form spherical Hankel oracle for the characteristic function
//! - [`spectrum`]: per-mode and aggregated spectra with classification
//! - [`regions`]: the Λ, Q_N, M_c and ℛ predicates
//! - [`weyl`]: counting functions, Weyl coefficients, growth fits
//! - [`perturb`]: the bifurcating root near `γ = 1`

pub mod contour;
pub mod error;
pub mod hankel;
pub mod mp;
pub mod perturb;
pub mod polymode;
pub mod regions;
pub mod rootfind;
pub mod spectrum;
pub mod weyl;

pub use error::{Error, Result};
pub use mp::BigComplex;
pub use num_complex::Complex64;
