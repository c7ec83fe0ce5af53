//! The two-slot cooperative frame pipeline.
//!
//! Slot 1: the source broadcasts a QPSK frame to the destination and the
//! relay. Slot 2: the relay rescales its noisy copy by the amplification
//! factor and forwards it. The destination combines both copies with
//! maximum-ratio weights, soft-demaps, and decodes.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{apply_link, draw_fading, FadingSpec, LinkState};
use crate::error::{Error, Result};
use crate::fec::{conv_encode, viterbi_decode_soft, BitBlock, ConvCodeSpec};
use crate::modem::{qpsk_demap_hard, qpsk_demap_soft, qpsk_map, IqBlock};
use crate::topology::LinkGains;

/// Split of the total per-slot-pair transmit energy between source and
/// relay. Fractions are in (0, 1) and sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    p_src: f64,
    p_rel: f64,
}

impl PowerAllocation {
    pub fn new(p_src: f64, p_rel: f64) -> Result<Self> {
        for (name, p) in [("p_src", p_src), ("p_rel", p_rel)] {
            if !p.is_finite() || p <= 0.0 || p >= 1.0 {
                return Err(Error::invalid(format!("{name} must lie in (0, 1), got {p}")));
            }
        }
        if (p_src + p_rel - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "power fractions must sum to 1, got {p_src} + {p_rel}"
            )));
        }
        Ok(PowerAllocation { p_src, p_rel })
    }

    /// `p_rel` is the complement of the source fraction.
    pub fn from_source_fraction(p_src: f64) -> Result<Self> {
        Self::new(p_src, 1.0 - p_src)
    }

    /// Equal split (1/2, 1/2).
    pub fn equal() -> Self {
        PowerAllocation {
            p_src: 0.5,
            p_rel: 0.5,
        }
    }

    /// Source-heavy split (2/3, 1/3).
    pub fn two_thirds_source() -> Self {
        PowerAllocation {
            p_src: 2.0 / 3.0,
            p_rel: 1.0 / 3.0,
        }
    }

    pub fn p_src(&self) -> f64 {
        self.p_src
    }

    pub fn p_rel(&self) -> f64 {
        self.p_rel
    }
}

/// How the relayed branch is weighted in the combiner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MrcMode {
    /// Weight by the last hop only: `w_rd = sqrt(g_rd) * h_rd`.
    #[default]
    LastHop,
    /// Weight by the full cascade: `w_rd = beta * sqrt(g_sr * g_rd) * h_sr * h_rd`.
    Cascade,
}

/// Relay amplification factor.
///
/// `beta = sqrt(p_rel / (p_src * g_sr * |h_sr|^2 + n0))` makes the relay's
/// average transmit energy per symbol exactly `p_rel`; with unit gain and
/// equal powers it reduces to the classic `sqrt(E_b / (E_b |h|^2 + N0))`.
pub fn af_gain(p_rel: f64, p_src: f64, g_sr: f64, h_sr: Complex64, n0: f64) -> f64 {
    (p_rel / (p_src * g_sr * h_sr.norm_sqr() + n0)).sqrt()
}

/// Maximum-ratio combining of the direct and relayed copies:
/// `r[i] = conj(w_sd) * u_sd[i] + conj(w_rd) * u_rd[i]`.
pub fn mrc_combine(
    u_sd: &IqBlock,
    u_rd: &IqBlock,
    w_sd: Complex64,
    w_rd: Complex64,
) -> Result<IqBlock> {
    if u_sd.len() != u_rd.len() {
        return Err(Error::invalid(format!(
            "combiner branch lengths differ: {} vs {}",
            u_sd.len(),
            u_rd.len()
        )));
    }
    let ws = w_sd.conj();
    let wr = w_rd.conj();
    let symbols = u_sd
        .symbols
        .iter()
        .zip(&u_rd.symbols)
        .map(|(a, b)| ws * a + wr * b)
        .collect();
    Ok(IqBlock::new(symbols))
}

/// Everything needed to run one frame: code, powers, gains, per-hop fading
/// (None means a static unit channel, i.e. pure AWGN on that hop), noise
/// level, frame length, combiner variant, and whether the relay is active.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub code: Option<ConvCodeSpec>,
    pub power: PowerAllocation,
    pub gains: LinkGains,
    pub fading_sd: Option<FadingSpec>,
    pub fading_sr: Option<FadingSpec>,
    pub fading_rd: Option<FadingSpec>,
    pub n0: f64,
    pub frame_info_bits: usize,
    pub mrc_mode: MrcMode,
    pub relay_enabled: bool,
}

/// Outcome of one simulated frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameResult {
    pub info_bits: u64,
    pub bit_errors: u64,
}

fn draw_hop<R: Rng + ?Sized>(fading: &Option<FadingSpec>, rng: &mut R) -> Complex64 {
    match fading {
        Some(spec) => draw_fading(spec, rng),
        None => Complex64::new(1.0, 0.0),
    }
}

/// Runs one frame through the full transmit/relay/combine/decode chain and
/// counts bit errors against the original information bits.
///
/// All randomness comes from `rng` in a fixed order (fading coefficients,
/// information bits, then per-hop noise), so a given stream reproduces the
/// frame exactly.
pub fn simulate_frame<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Result<FrameResult> {
    if !(scenario.n0.is_finite() && scenario.n0 > 0.0) {
        return Err(Error::invalid(format!(
            "noise level must be > 0, got {}",
            scenario.n0
        )));
    }
    if scenario.frame_info_bits == 0 {
        return Err(Error::invalid("frame must carry at least one info bit"));
    }

    let h_sd = draw_hop(&scenario.fading_sd, rng);
    let (h_sr, h_rd) = if scenario.relay_enabled {
        (
            draw_hop(&scenario.fading_sr, rng),
            draw_hop(&scenario.fading_rd, rng),
        )
    } else {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    };

    let info = BitBlock::info(
        (0..scenario.frame_info_bits)
            .map(|_| rng.random::<bool>() as u8)
            .collect(),
    )?;

    let tx_bits = match &scenario.code {
        Some(spec) => conv_encode(&info, spec)?,
        None => info.clone(),
    };
    let mut x_s = qpsk_map(&tx_bits)?;
    let amp = scenario.power.p_src().sqrt();
    for s in &mut x_s.symbols {
        *s *= amp;
    }

    let gains = &scenario.gains;
    let n0 = scenario.n0;

    // slot 1: broadcast to destination and relay
    let link_sd = LinkState::new(h_sd, gains.g_sd, n0)?;
    let y_sd = apply_link(&x_s, &link_sd, rng);

    let combined = if scenario.relay_enabled {
        let link_sr = LinkState::new(h_sr, gains.g_sr, n0)?;
        let y_sr = apply_link(&x_s, &link_sr, rng);

        // slot 2: amplify and forward
        let beta = af_gain(
            scenario.power.p_rel(),
            scenario.power.p_src(),
            gains.g_sr,
            h_sr,
            n0,
        );
        let x_r = IqBlock::new(y_sr.symbols.iter().map(|s| beta * s).collect());
        let link_rd = LinkState::new(h_rd, gains.g_rd, n0)?;
        let y_rd = apply_link(&x_r, &link_rd, rng);

        let w_sd = h_sd;
        // Relayed-branch weight: the destination knows h_sr, so the
        // inter-user phase is compensated, and the branch is divided by
        // its noise power relative to the direct branch (forwarded noise
        // beta^2 g_rd |h_rd|^2 plus local noise). Last-hop mode puts only
        // the R-D coefficient in the numerator, cascade mode the full
        // effective channel.
        let phase_sr = if h_sr.norm() > 0.0 {
            h_sr / h_sr.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let branch_noise = beta * beta * gains.g_rd * h_rd.norm_sqr() + 1.0;
        let w_rd = match scenario.mrc_mode {
            MrcMode::LastHop => gains.g_rd.sqrt() * h_rd * phase_sr / branch_noise,
            MrcMode::Cascade => {
                beta * (gains.g_sr * gains.g_rd).sqrt() * h_sr * h_rd / branch_noise
            }
        };
        mrc_combine(&y_sd, &y_rd, w_sd, w_rd)?
    } else {
        mrc_combine(&y_sd, &y_sd, h_sd, Complex64::new(0.0, 0.0))?
    };

    let decoded = match &scenario.code {
        Some(spec) => viterbi_decode_soft(&qpsk_demap_soft(&combined), spec)?,
        None => qpsk_demap_hard(&combined),
    };

    let bit_errors = info
        .bits()
        .iter()
        .zip(decoded.bits())
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok(FrameResult {
        info_bits: info.len() as u64,
        bit_errors,
    })
}
