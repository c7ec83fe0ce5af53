//! Link-level BER simulator for amplify-and-forward cooperative links.
//!
//! A source broadcasts a convolutionally coded QPSK frame to a destination
//! and a single relay; the relay rescales its noisy copy and forwards it in
//! the second slot; the destination combines both copies and decodes. The
//! crate models the relay placement geometry (equilateral, isosceles,
//! linear, scalene), per-hop Rayleigh or Rician quasi-static fading, and
//! drives reproducible Monte-Carlo BER-vs-SNR sweeps with CSV output.
//!
//! The `coopsim` binary exposes `sweep`, `topology`, and `compare`
//! subcommands over the same machinery.

pub mod channel;
pub mod config;
pub mod coop_link;
pub mod engine;
pub mod error;
pub mod fec;
pub mod modem;
pub mod rng;
pub mod topology;

pub use error::{Error, Result};
