//! Monte-Carlo BER sweep orchestration and CSV emission.
//!
//! SNR convention: `SNR_dB = 10 log10(E_total / N0)` with `E_total = 1`,
//! the total transmit energy per slot pair (source fraction `p_src`, relay
//! fraction `p_rel`), referenced to the unit-gain S-D hop. Coded and
//! uncoded runs use the same per-symbol energy.
//!
//! Frame `f` at SNR grid index `s` draws from the substream keyed by
//! `(master_seed, s, f)`, and per-point aggregation is a sequential scan
//! over frame indices, so sweep output is a pure function of the config:
//! identical for any worker count or scheduling order.

use std::io::Write;

use rayon::prelude::*;

use crate::channel::{FadingModel, FadingSpec};
use crate::coop_link::{simulate_frame, FrameResult, MrcMode, PowerAllocation, Scenario};
use crate::error::{Error, Result};
use crate::fec::ConvCodeSpec;
use crate::rng::frame_rng;
use crate::topology::{TopologySpec, DEFAULT_ALPHA};

/// Full description of one BER-vs-SNR sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// SNR grid in dB, strictly increasing.
    pub snr_grid_db: Vec<f64>,
    /// Information bits per frame.
    pub frame_info_bits: usize,
    /// Minimum frames per point.
    pub min_frames: u64,
    /// Hard cap on frames per point.
    pub max_frames: u64,
    /// Keep simulating (past `min_frames`) until this many bit errors.
    pub min_bit_errors: u64,
    /// Seed for all per-frame substreams.
    pub master_seed: u64,
    pub topology: TopologySpec,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Per-hop fading; `None` means a static unit channel (pure AWGN).
    pub fading_sd: Option<FadingSpec>,
    pub fading_sr: Option<FadingSpec>,
    pub fading_rd: Option<FadingSpec>,
    pub power: PowerAllocation,
    /// Convolutional coding on (default code) or uncoded baseline.
    pub coded: bool,
    pub mrc_mode: MrcMode,
    /// Exchange source and relay positions before computing gains.
    pub swap_roles: bool,
    /// Disable to measure the direct branch alone.
    pub relay_enabled: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            snr_grid_db: Vec::new(),
            frame_info_bits: 1000,
            min_frames: 1000,
            max_frames: 20_000,
            min_bit_errors: 100,
            master_seed: 1,
            topology: TopologySpec::Equilateral,
            alpha: DEFAULT_ALPHA,
            fading_sd: Some(FadingSpec::rayleigh()),
            fading_sr: Some(FadingSpec::rayleigh()),
            fading_rd: Some(FadingSpec::rayleigh()),
            power: PowerAllocation::equal(),
            coded: true,
            mrc_mode: MrcMode::LastHop,
            swap_roles: false,
            relay_enabled: true,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_frames < 1 {
            return Err(Error::config("min_frames must be at least 1"));
        }
        if self.max_frames < self.min_frames {
            return Err(Error::config(format!(
                "max_frames ({}) must be >= min_frames ({})",
                self.max_frames, self.min_frames
            )));
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("SNR grid values must be finite"));
        }
        if self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("SNR grid must be strictly increasing"));
        }
        if self.frame_info_bits == 0 {
            return Err(Error::config("frame_info_bits must be at least 1"));
        }
        if !self.coded && self.frame_info_bits % 2 != 0 {
            return Err(Error::config(
                "uncoded frames need an even bit count for QPSK",
            ));
        }
        self.topology
            .validate()
            .map_err(|e| Error::config(e.to_string()))?;
        Ok(())
    }

    /// Builds the per-frame scenario for one noise level.
    fn scenario(&self, n0: f64) -> Result<Scenario> {
        let mut distances = self.topology.distances()?;
        if self.swap_roles {
            distances = distances.swap_source_relay()?;
        }
        let gains = distances.gains(self.alpha)?;
        Ok(Scenario {
            code: self.coded.then(ConvCodeSpec::default),
            power: self.power,
            gains,
            fading_sd: self.fading_sd,
            fading_sr: self.fading_sr,
            fading_rd: self.fading_rd,
            n0,
            frame_info_bits: self.frame_info_bits,
            mrc_mode: self.mrc_mode,
            relay_enabled: self.relay_enabled,
        })
    }

    fn provenance(&self) -> Provenance {
        let (topology, theta, rho, f) = match self.topology {
            TopologySpec::Equilateral => ("equilateral", None, None, None),
            TopologySpec::IsoscelesNearDest { theta } => {
                ("isosceles-dest", Some(theta), None, None)
            }
            TopologySpec::IsoscelesNearSource { phi } => ("isosceles-src", Some(phi), None, None),
            TopologySpec::Linear { rho } => ("linear", None, Some(rho), None),
            TopologySpec::Scalene { f, rho } => ("scalene", None, Some(rho), Some(f)),
        };
        let (interuser_model, k_factor) = match &self.fading_sr {
            None => ("awgn", 0.0),
            Some(spec) => match spec.model() {
                FadingModel::Rayleigh => ("rayleigh", 0.0),
                FadingModel::Rician => ("rician", spec.k_factor()),
            },
        };
        Provenance {
            topology: topology.to_string(),
            theta,
            rho,
            f,
            alpha: self.alpha,
            psrc: self.power.p_src(),
            prel: self.power.p_rel(),
            coded: self.coded,
            interuser_model: interuser_model.to_string(),
            k_factor,
            mrc_mode: match self.mrc_mode {
                MrcMode::LastHop => "lasthop".to_string(),
                MrcMode::Cascade => "cascade".to_string(),
            },
            swap_roles: self.swap_roles,
            seed: self.master_seed,
        }
    }
}

/// Scenario description attached to every measurement row.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub topology: String,
    pub theta: Option<f64>,
    pub rho: Option<f64>,
    pub f: Option<f64>,
    pub alpha: f64,
    pub psrc: f64,
    pub prel: f64,
    pub coded: bool,
    pub interuser_model: String,
    pub k_factor: f64,
    pub mrc_mode: String,
    pub swap_roles: bool,
    pub seed: u64,
}

/// One (SNR point -> frames, bits, errors, BER) measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub frames: u64,
    pub info_bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub provenance: Provenance,
}

/// Runs one grid point. `snr_db` must be a value of the config's grid.
pub fn run_point(config: &SweepConfig, snr_db: f64) -> Result<BerRecord> {
    config.validate()?;
    let index = config
        .snr_grid_db
        .iter()
        .position(|&s| (s - snr_db).abs() < 1e-9)
        .ok_or_else(|| Error::config(format!("{snr_db} dB is not on the SNR grid")))?;
    run_point_indexed(config, index)
}

fn run_point_indexed(config: &SweepConfig, index: usize) -> Result<BerRecord> {
    let snr_db = config.snr_grid_db[index];
    // E_total = 1, so N0 follows directly from the SNR
    let n0 = 10f64.powf(-snr_db / 10.0);
    let scenario = config.scenario(n0)?;

    let mut frames = 0u64;
    let mut info_bits = 0u64;
    let mut bit_errors = 0u64;
    let stop = |frames: u64, errors: u64| {
        (frames >= config.min_frames && errors >= config.min_bit_errors)
            || frames == config.max_frames
    };

    'points: while !stop(frames, bit_errors) {
        // Batches are sized deterministically from the counts so far; the
        // sequential scan below stops at the exact frame where the rule
        // first holds, so overshoot frames are computed but never counted.
        let batch = if frames < config.min_frames {
            config.min_frames - frames
        } else {
            frames.max(256).min(config.max_frames - frames)
        };
        let results: Vec<FrameResult> = (frames..frames + batch)
            .into_par_iter()
            .map(|f| {
                let mut rng = frame_rng(config.master_seed, index as u64, f);
                simulate_frame(&scenario, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        for r in results {
            frames += 1;
            info_bits += r.info_bits;
            bit_errors += r.bit_errors;
            if stop(frames, bit_errors) {
                break 'points;
            }
        }
    }

    Ok(BerRecord {
        snr_db,
        frames,
        info_bits,
        bit_errors,
        ber: bit_errors as f64 / info_bits as f64,
        provenance: config.provenance(),
    })
}

/// Runs every grid point, in grid order. Points execute concurrently but
/// the output does not depend on scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<BerRecord>> {
    config.validate()?;
    (0..config.snr_grid_db.len())
        .into_par_iter()
        .map(|i| run_point_indexed(config, i))
        .collect()
}

pub const CSV_HEADER: &str = "snr_db,frames,info_bits,bit_errors,ber,topology,theta,rho,f,\
alpha,psrc,prel,coded,interuser_model,k_factor,mrc_mode,swap_roles,seed";

/// Formats with at least six significant digits; values below 0.1 switch
/// to scientific notation so small BERs keep their precision.
fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.1 {
        format!("{v:.6}")
    } else {
        format!("{v:.6e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn csv_line(r: &BerRecord) -> String {
    let p = &r.provenance;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt_float(r.snr_db),
        r.frames,
        r.info_bits,
        r.bit_errors,
        fmt_float(r.ber),
        p.topology,
        fmt_opt(p.theta),
        fmt_opt(p.rho),
        fmt_opt(p.f),
        fmt_float(p.alpha),
        fmt_float(p.psrc),
        fmt_float(p.prel),
        p.coded,
        p.interuser_model,
        fmt_float(p.k_factor),
        p.mrc_mode,
        p.swap_roles,
        p.seed
    )
}

/// Renders records as a UTF-8 CSV document with header row.
pub fn render_csv(records: &[BerRecord]) -> String {
    let mut out = String::with_capacity(128 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&csv_line(r));
        out.push('\n');
    }
    out
}

/// Writes the CSV document to any sink.
pub fn write_csv<W: Write>(mut writer: W, records: &[BerRecord]) -> Result<()> {
    writer.write_all(render_csv(records).as_bytes())?;
    Ok(())
}
