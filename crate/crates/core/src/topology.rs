//! Relay-placement geometry: distances and geometric power gains.
//!
//! All distances are expressed in units of the source-destination hop, so
//! `d_sd = 1` everywhere and the path-loss constant cancels: a hop at
//! distance d sees the power gain `(d_sd / d)^alpha` relative to the S-D
//! reference, with `alpha = 4` for obstructed-building environments.

use crate::error::{Error, Result};

/// Default path-loss exponent.
pub const DEFAULT_ALPHA: f64 = 4.0;

/// Relay placement, parameterized per topology family.
///
/// The isosceles variants put the relay on the unit circle around the
/// source (near destination) or destination (near source) at the given
/// apex angle. `Linear` slides the relay along the S-D segment. `Scalene`
/// puts the relay on a line parallel to S-D at offset `f`, at fraction
/// `rho` along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopologySpec {
    Equilateral,
    IsoscelesNearDest { theta: f64 },
    IsoscelesNearSource { phi: f64 },
    Linear { rho: f64 },
    Scalene { f: f64, rho: f64 },
}

/// Distance triple for one placement, in units of `d_sd`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distances {
    pub d_sd: f64,
    pub d_sr: f64,
    pub d_rd: f64,
}

/// Geometric power gains of the three hops plus the distances they came
/// from. `g_sd = 1` by definition of the reference hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub g_sr: f64,
    pub g_rd: f64,
    pub g_sd: f64,
    pub d_sr: f64,
    pub d_rd: f64,
    pub d_sd: f64,
}

const MAX_APEX: f64 = std::f64::consts::FRAC_PI_3;

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 || v >= 1.0 {
        return Err(Error::invalid(format!("{name} must lie in (0, 1), got {v}")));
    }
    Ok(())
}

impl TopologySpec {
    /// Validates the placement parameters against their declared ranges.
    pub fn validate(&self) -> Result<()> {
        match *self {
            TopologySpec::Equilateral => Ok(()),
            TopologySpec::IsoscelesNearDest { theta } => {
                if !theta.is_finite() || theta <= 0.0 || theta >= MAX_APEX {
                    return Err(Error::invalid(format!(
                        "theta must lie in (0, pi/3), got {theta}"
                    )));
                }
                Ok(())
            }
            TopologySpec::IsoscelesNearSource { phi } => {
                if !phi.is_finite() || phi <= 0.0 || phi >= MAX_APEX {
                    return Err(Error::invalid(format!(
                        "phi must lie in (0, pi/3), got {phi}"
                    )));
                }
                Ok(())
            }
            TopologySpec::Linear { rho } => check_open_unit("rho", rho),
            TopologySpec::Scalene { f, rho } => {
                if !f.is_finite() || f <= 0.0 {
                    return Err(Error::invalid(format!("f must be > 0, got {f}")));
                }
                check_open_unit("rho", rho)
            }
        }
    }

    /// Computes the (d_sd, d_sr, d_rd) triple with `d_sd` normalized to 1.
    pub fn distances(&self) -> Result<Distances> {
        self.validate()?;
        let (d_sr, d_rd) = match *self {
            TopologySpec::Equilateral => (1.0, 1.0),
            TopologySpec::IsoscelesNearDest { theta } => {
                (1.0, (2.0 * (1.0 - theta.cos())).sqrt())
            }
            TopologySpec::IsoscelesNearSource { phi } => {
                ((2.0 * (1.0 - phi.cos())).sqrt(), 1.0)
            }
            TopologySpec::Linear { rho } => (rho, 1.0 - rho),
            TopologySpec::Scalene { f, rho } => (
                (f * f + rho * rho).sqrt(),
                (f * f + (1.0 - rho) * (1.0 - rho)).sqrt(),
            ),
        };
        Ok(Distances {
            d_sd: 1.0,
            d_sr,
            d_rd,
        })
    }
}

impl Distances {
    /// Power gains `g = (d_sd / d)^alpha` per hop; `g_sd = 1` always.
    pub fn gains(&self, alpha: f64) -> Result<LinkGains> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::invalid(format!(
                "path-loss exponent must be > 0, got {alpha}"
            )));
        }
        for (name, d) in [("d_sd", self.d_sd), ("d_sr", self.d_sr), ("d_rd", self.d_rd)] {
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::invalid(format!("{name} must be > 0, got {d}")));
            }
        }
        Ok(LinkGains {
            g_sr: (self.d_sd / self.d_sr).powf(alpha),
            g_rd: (self.d_sd / self.d_rd).powf(alpha),
            g_sd: 1.0,
            d_sr: self.d_sr,
            d_rd: self.d_rd,
            d_sd: self.d_sd,
        })
    }

    /// Exchanges the source and relay positions.
    ///
    /// The S-R distance is unchanged, the old R-D hop becomes the new S-D
    /// hop and vice versa. The result is renormalized so the returned
    /// `d_sd` is 1, since gains are always referenced to the current S-D
    /// hop.
    pub fn swap_source_relay(&self) -> Result<Distances> {
        if !(self.d_rd.is_finite() && self.d_rd > 0.0) {
            return Err(Error::invalid(format!(
                "cannot swap roles with d_rd = {}",
                self.d_rd
            )));
        }
        Ok(Distances {
            d_sd: 1.0,
            d_sr: self.d_sr / self.d_rd,
            d_rd: self.d_sd / self.d_rd,
        })
    }
}
