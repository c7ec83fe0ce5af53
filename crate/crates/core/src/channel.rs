//! Fading coefficient generation and noisy link application.
//!
//! Fading is quasi-static: one coefficient per link per frame, redrawn
//! independently every frame. A coefficient is
//! `h = sqrt(K/(K+1)) + sqrt(1/(K+1)) * w` with `w` zero-mean circular
//! complex Gaussian of unit power, so `E[|h|^2] = 1` for every K and K = 0
//! reduces to pure Rayleigh scattering.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::modem::IqBlock;

/// Fading model family for one hop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingModel {
    Rayleigh,
    Rician,
}

/// A fading distribution: Rayleigh, or Rician with K-factor > 0.
///
/// The K-factor is the specular-to-scattered power ratio; K = 0 is
/// Rayleigh. Validation lives in the constructors, so a `FadingSpec` value
/// is always internally consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec {
    model: FadingModel,
    k_factor: f64,
}

impl FadingSpec {
    pub fn rayleigh() -> Self {
        FadingSpec {
            model: FadingModel::Rayleigh,
            k_factor: 0.0,
        }
    }

    /// A Rician spec with the given K-factor. K = 0 normalizes to Rayleigh;
    /// negative or non-finite K is rejected.
    pub fn rician(k_factor: f64) -> Result<Self> {
        if !k_factor.is_finite() || k_factor < 0.0 {
            return Err(Error::invalid(format!(
                "Rician K-factor must be finite and >= 0, got {k_factor}"
            )));
        }
        if k_factor == 0.0 {
            return Ok(Self::rayleigh());
        }
        Ok(FadingSpec {
            model: FadingModel::Rician,
            k_factor,
        })
    }

    pub fn model(&self) -> FadingModel {
        self.model
    }

    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    /// Deterministic (line-of-sight) amplitude q = sqrt(K/(K+1)).
    pub fn los_amplitude(&self) -> f64 {
        (self.k_factor / (self.k_factor + 1.0)).sqrt()
    }

    /// Scattered amplitude scale sigma = sqrt(1/(K+1)).
    pub fn scatter_scale(&self) -> f64 {
        (1.0 / (self.k_factor + 1.0)).sqrt()
    }
}

/// Draws one unit-power fading coefficient.
pub fn draw_fading<R: Rng + ?Sized>(spec: &FadingSpec, rng: &mut R) -> Complex64 {
    let q = spec.los_amplitude();
    // scatter has per-component std sigma/sqrt(2) so E[|h - q|^2] = sigma^2
    let s = spec.scatter_scale() * std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(q + s * re, s * im)
}

/// Per-frame state of one hop: fading coefficient, geometric power gain,
/// and noise spectral level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub h: Complex64,
    pub gain: f64,
    pub n0: f64,
}

impl LinkState {
    pub fn new(h: Complex64, gain: f64, n0: f64) -> Result<Self> {
        if !(gain.is_finite() && gain > 0.0) {
            return Err(Error::invalid(format!("link gain must be > 0, got {gain}")));
        }
        if !(n0.is_finite() && n0 > 0.0) {
            return Err(Error::invalid(format!("noise level must be > 0, got {n0}")));
        }
        Ok(LinkState { h, gain, n0 })
    }
}

/// Passes a block through one hop: `y[i] = sqrt(gain) * h * x[i] + n[i]`
/// with i.i.d. circular complex Gaussian noise of power `n0` per symbol.
/// The coefficient is constant across the block (quasi-static fading).
pub fn apply_link<R: Rng + ?Sized>(x: &IqBlock, link: &LinkState, rng: &mut R) -> IqBlock {
    let scale = link.gain.sqrt() * link.h;
    let noise_amp = (link.n0 / 2.0).sqrt();
    let symbols = x
        .symbols
        .iter()
        .map(|&s| {
            let nr: f64 = rng.sample(StandardNormal);
            let ni: f64 = rng.sample(StandardNormal);
            scale * s + Complex64::new(noise_amp * nr, noise_amp * ni)
        })
        .collect();
    IqBlock::new(symbols)
}
