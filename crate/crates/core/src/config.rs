//! Scenario configuration: SNR ranges, topology construction from flag
//! values, and the plain-text scenario file used by `compare`.
//!
//! A scenario file holds one `[section]` per scenario with `key = value`
//! lines; every key matches a CLI flag of the `sweep` subcommand. Blank
//! lines and `#` comments are ignored.
//!
//! ```text
//! [linear-midpoint]
//! topology = linear
//! rho = 0.5
//! snr = 0:2:30
//! seed = 42
//! ```

use crate::channel::FadingSpec;
use crate::coop_link::{MrcMode, PowerAllocation};
use crate::engine::SweepConfig;
use crate::error::{Error, Result};
use crate::topology::TopologySpec;

/// Expands a `start:step:stop` dB range into an inclusive grid.
pub fn parse_snr_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::config(format!(
            "SNR range must be start:step:stop, got '{text}'"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad number '{p}' in SNR range")))
        })
        .collect::<Result<_>>()?;
    let (start, step, stop) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && step.is_finite() && stop.is_finite()) {
        return Err(Error::config("SNR range values must be finite"));
    }
    if step <= 0.0 {
        return Err(Error::config(format!("SNR step must be > 0, got {step}")));
    }
    if stop < start {
        return Err(Error::config(format!(
            "SNR stop ({stop}) must not precede start ({start})"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// Builds a placement from the CLI-style (kind, theta, rho, f) values,
/// rejecting missing or extraneous parameters.
pub fn build_topology(
    kind: &str,
    theta: Option<f64>,
    rho: Option<f64>,
    f: Option<f64>,
) -> Result<TopologySpec> {
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| Error::config(format!("topology '{kind}' requires --{name}")))
    };
    let forbid = |name: &str, v: Option<f64>| {
        if v.is_some() {
            Err(Error::config(format!(
                "topology '{kind}' does not take --{name}"
            )))
        } else {
            Ok(())
        }
    };
    let spec = match kind {
        "equilateral" => {
            forbid("theta", theta)?;
            forbid("rho", rho)?;
            forbid("f", f)?;
            TopologySpec::Equilateral
        }
        "isosceles-dest" => {
            forbid("rho", rho)?;
            forbid("f", f)?;
            TopologySpec::IsoscelesNearDest {
                theta: need("theta", theta)?,
            }
        }
        "isosceles-src" => {
            forbid("rho", rho)?;
            forbid("f", f)?;
            TopologySpec::IsoscelesNearSource {
                phi: need("theta", theta)?,
            }
        }
        "linear" => {
            forbid("theta", theta)?;
            forbid("f", f)?;
            TopologySpec::Linear {
                rho: need("rho", rho)?,
            }
        }
        "scalene" => {
            forbid("theta", theta)?;
            TopologySpec::Scalene {
                f: need("f", f)?,
                rho: need("rho", rho)?,
            }
        }
        other => {
            return Err(Error::config(format!(
                "unknown topology '{other}' (expected equilateral, isosceles-dest, \
isosceles-src, linear, or scalene)"
            )))
        }
    };
    spec.validate().map_err(|e| Error::config(e.to_string()))?;
    Ok(spec)
}

/// One scenario from a config file.
#[derive(Debug, Clone)]
pub struct NamedSweep {
    pub name: String,
    pub config: SweepConfig,
}

#[derive(Default)]
struct SectionValues {
    topology: Option<String>,
    theta: Option<f64>,
    rho: Option<f64>,
    f: Option<f64>,
    alpha: Option<f64>,
    psrc: Option<f64>,
    coded: Option<bool>,
    interuser: Option<String>,
    k: Option<f64>,
    snr: Option<String>,
    frames: Option<u64>,
    max_frames: Option<u64>,
    min_errors: Option<u64>,
    seed: Option<u64>,
    swap_roles: Option<bool>,
    mrc: Option<String>,
}

fn parse_num<T: std::str::FromStr>(section: &str, key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::config(format!("[{section}] {key}: cannot parse '{value}'")))
}

fn parse_bool(section: &str, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::config(format!(
            "[{section}] {key}: expected true or false, got '{value}'"
        ))),
    }
}

impl SectionValues {
    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        match key {
            "topology" => self.topology = Some(value.to_string()),
            "theta" => self.theta = Some(parse_num(section, key, value)?),
            "rho" => self.rho = Some(parse_num(section, key, value)?),
            "f" => self.f = Some(parse_num(section, key, value)?),
            "alpha" => self.alpha = Some(parse_num(section, key, value)?),
            "psrc" => self.psrc = Some(parse_num(section, key, value)?),
            "coded" => self.coded = Some(parse_bool(section, key, value)?),
            "interuser" => self.interuser = Some(value.to_string()),
            "k" => self.k = Some(parse_num(section, key, value)?),
            "snr" => self.snr = Some(value.to_string()),
            "frames" => self.frames = Some(parse_num(section, key, value)?),
            "max-frames" => self.max_frames = Some(parse_num(section, key, value)?),
            "min-errors" => self.min_errors = Some(parse_num(section, key, value)?),
            "seed" => self.seed = Some(parse_num(section, key, value)?),
            "swap-roles" => self.swap_roles = Some(parse_bool(section, key, value)?),
            "mrc" => self.mrc = Some(value.to_string()),
            _ => {
                return Err(Error::config(format!(
                    "[{section}] unknown key '{key}'"
                )))
            }
        }
        Ok(())
    }

    fn into_config(self, section: &str) -> Result<SweepConfig> {
        let mut config = SweepConfig::default();
        let kind = self.topology.as_deref().unwrap_or("equilateral");
        config.topology = build_topology(kind, self.theta, self.rho, self.f)?;
        if let Some(alpha) = self.alpha {
            config.alpha = alpha;
        }
        if let Some(psrc) = self.psrc {
            config.power = PowerAllocation::from_source_fraction(psrc)
                .map_err(|e| Error::config(format!("[{section}] psrc: {e}")))?;
        }
        if let Some(coded) = self.coded {
            config.coded = coded;
        }
        config.fading_sr = Some(interuser_fading(
            self.interuser.as_deref().unwrap_or("rayleigh"),
            self.k,
        )?);
        if let Some(snr) = self.snr {
            config.snr_grid_db = parse_snr_range(&snr)?;
        }
        if let Some(frames) = self.frames {
            config.min_frames = frames;
        }
        if let Some(max_frames) = self.max_frames {
            config.max_frames = max_frames;
        }
        if let Some(min_errors) = self.min_errors {
            config.min_bit_errors = min_errors;
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(swap) = self.swap_roles {
            config.swap_roles = swap;
        }
        if let Some(mrc) = self.mrc.as_deref() {
            config.mrc_mode = match mrc {
                "lasthop" => MrcMode::LastHop,
                "cascade" => MrcMode::Cascade,
                other => {
                    return Err(Error::config(format!(
                        "[{section}] mrc: expected lasthop or cascade, got '{other}'"
                    )))
                }
            };
        }
        config
            .validate()
            .map_err(|e| Error::config(format!("[{section}] {e}")))?;
        Ok(config)
    }
}

/// Fading spec of the inter-user (S-R) hop from model name and K-factor.
pub fn interuser_fading(model: &str, k: Option<f64>) -> Result<FadingSpec> {
    match model {
        "rayleigh" => Ok(FadingSpec::rayleigh()),
        "rician" => FadingSpec::rician(k.unwrap_or(15.0))
            .map_err(|e| Error::config(e.to_string())),
        other => Err(Error::config(format!(
            "interuser channel must be rayleigh or rician, got '{other}'"
        ))),
    }
}

/// Parses a scenario file into named sweep configs, in file order.
pub fn parse_scenario_file(text: &str) -> Result<Vec<NamedSweep>> {
    let mut sections: Vec<(String, SectionValues)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::config(format!("line {}: unterminated section", lineno + 1)))?
                .trim();
            if name.is_empty() {
                return Err(Error::config(format!("line {}: empty section name", lineno + 1)));
            }
            sections.push((name.to_string(), SectionValues::default()));
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("line {}: expected key = value", lineno + 1))
        })?;
        let (section_name, values) = sections.last_mut().ok_or_else(|| {
            Error::config(format!("line {}: key outside any [section]", lineno + 1))
        })?;
        let name = section_name.clone();
        values.set(&name, key.trim(), value.trim())?;
    }
    if sections.is_empty() {
        return Err(Error::config("scenario file defines no [section]"));
    }
    sections
        .into_iter()
        .map(|(name, values)| {
            let config = values.into_config(&name)?;
            Ok(NamedSweep { name, config })
        })
        .collect()
}
