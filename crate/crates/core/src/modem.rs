//! QPSK mapping and hard/soft demapping.
//!
//! Gray mapping, two bits per symbol: the first bit sets the in-phase sign,
//! the second the quadrature sign, with bit 0 -> +1/sqrt(2) and
//! bit 1 -> -1/sqrt(2), so every symbol has unit energy.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fec::BitBlock;

/// An ordered sequence of complex baseband symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct IqBlock {
    pub symbols: Vec<Complex64>,
}

impl IqBlock {
    pub fn new(symbols: Vec<Complex64>) -> Self {
        IqBlock { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

#[inline]
fn axis(bit: u8) -> f64 {
    if bit == 0 {
        FRAC_1_SQRT_2
    } else {
        -FRAC_1_SQRT_2
    }
}

/// Maps a bit sequence onto unit-energy QPSK symbols. Bit count must be even.
pub fn qpsk_map(bits: &BitBlock) -> Result<IqBlock> {
    if bits.len() % 2 != 0 {
        return Err(Error::invalid(format!(
            "QPSK needs an even bit count, got {}",
            bits.len()
        )));
    }
    let symbols = bits
        .bits()
        .chunks_exact(2)
        .map(|pair| Complex64::new(axis(pair[0]), axis(pair[1])))
        .collect();
    Ok(IqBlock::new(symbols))
}

/// Per symbol: first bit = (real part < 0), second bit = (imag part < 0).
/// A zero component resolves to bit 0.
pub fn qpsk_demap_hard(symbols: &IqBlock) -> BitBlock {
    let mut bits = Vec::with_capacity(symbols.len() * 2);
    for s in &symbols.symbols {
        bits.push(u8::from(s.re < 0.0));
        bits.push(u8::from(s.im < 0.0));
    }
    BitBlock::coded(bits).expect("slicer emits binary values")
}

/// Max-log soft metrics, two per symbol: +re for the first bit, +im for the
/// second. Positive means bit 0 is more likely; the common 1/N0 factor is
/// dropped since Viterbi decisions are invariant to positive scaling.
pub fn qpsk_demap_soft(symbols: &IqBlock) -> Vec<f64> {
    let mut metrics = Vec::with_capacity(symbols.len() * 2);
    for s in &symbols.symbols {
        metrics.push(s.re);
        metrics.push(s.im);
    }
    metrics
}
