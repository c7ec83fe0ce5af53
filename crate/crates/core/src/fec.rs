//! Rate-1/n convolutional encoder and Viterbi decoder.
//!
//! The default code is the rate-1/2, constraint-length-5 code with
//! generators (31, 27) octal. Generator masks are read MSB-first: the most
//! significant of the `constraint_length` bits taps the current (newest)
//! input bit, the least significant taps the oldest register stage, so
//! `0o31 = 0b11001` has impulse response `1,1,0,0,1`.
//!
//! Every frame is terminated with `constraint_length - 1` zero tail bits,
//! which forces the trellis back to the all-zero state and makes
//! exhaustive maximum-likelihood checks on short blocks exact.

use crate::error::{Error, Result};

/// Marks whether a bit sequence carries information or coded bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitRole {
    Info,
    Coded,
}

/// An ordered sequence of binary symbols (each 0 or 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitBlock {
    bits: Vec<u8>,
    role: BitRole,
}

impl BitBlock {
    /// Wraps an information bit sequence. Values must be 0 or 1.
    pub fn info(bits: Vec<u8>) -> Result<Self> {
        Self::new(bits, BitRole::Info)
    }

    /// Wraps a coded bit sequence. Values must be 0 or 1.
    pub fn coded(bits: Vec<u8>) -> Result<Self> {
        Self::new(bits, BitRole::Coded)
    }

    fn new(bits: Vec<u8>, role: BitRole) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid("bit values must be 0 or 1"));
        }
        Ok(BitBlock { bits, role })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn role(&self) -> BitRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Parameters of a rate-1/n convolutional code.
///
/// `constraint_length` counts the register stages including the current
/// input bit; one generator mask per output stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvCodeSpec {
    constraint_length: usize,
    generators: Vec<u32>,
}

impl ConvCodeSpec {
    /// Builds a code spec, checking that each generator fits in
    /// `constraint_length` bits and taps the current input bit.
    pub fn new(constraint_length: usize, generators: &[u32]) -> Result<Self> {
        if !(2..=16).contains(&constraint_length) {
            return Err(Error::invalid(format!(
                "constraint length must be in 2..=16, got {constraint_length}"
            )));
        }
        if generators.is_empty() {
            return Err(Error::invalid("at least one generator is required"));
        }
        for (i, &g) in generators.iter().enumerate() {
            if g >> constraint_length != 0 {
                return Err(Error::invalid(format!(
                    "generator {i} ({g:#o}) does not fit in {constraint_length} bits"
                )));
            }
            if g >> (constraint_length - 1) & 1 == 0 {
                return Err(Error::invalid(format!(
                    "generator {i} ({g:#o}) must tap the current input bit"
                )));
            }
        }
        Ok(ConvCodeSpec {
            constraint_length,
            generators: generators.to_vec(),
        })
    }

    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    /// Outputs per input bit (n of rate 1/n).
    pub fn rate_inverse(&self) -> usize {
        self.generators.len()
    }

    /// Number of zero tail bits appended for trellis termination.
    pub fn tail_len(&self) -> usize {
        self.constraint_length - 1
    }

    /// Coded length for a terminated block of `info_len` information bits.
    pub fn coded_len(&self, info_len: usize) -> usize {
        self.rate_inverse() * (info_len + self.tail_len())
    }

    /// Number of information bits recoverable from `coded_len` coded bits,
    /// if the length is consistent with a terminated block.
    fn info_len_for(&self, coded_len: usize) -> Result<usize> {
        let n = self.rate_inverse();
        if coded_len % n != 0 {
            return Err(Error::invalid(format!(
                "coded length {coded_len} is not a multiple of {n}"
            )));
        }
        let ticks = coded_len / n;
        if ticks < self.constraint_length {
            return Err(Error::invalid(format!(
                "coded length {coded_len} is too short for a terminated block"
            )));
        }
        Ok(ticks - self.tail_len())
    }
}

impl Default for ConvCodeSpec {
    /// The (31, 27) octal rate-1/2 code, constraint length 5.
    fn default() -> Self {
        ConvCodeSpec::new(5, &[0o31, 0o27]).expect("default code spec is valid")
    }
}

#[inline]
fn parity(x: u32) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Encodes an information block, appending `L-1` zero tail bits.
///
/// Per input tick the register shifts right and each generator emits the
/// mod-2 sum of its tapped stages; the n outputs of one tick are emitted
/// consecutively (g1 bit first). Output length is `n * (k + L - 1)`.
pub fn conv_encode(info: &BitBlock, spec: &ConvCodeSpec) -> Result<BitBlock> {
    if info.is_empty() {
        return Err(Error::invalid("cannot encode an empty block"));
    }
    let l = spec.constraint_length;
    let mut out = Vec::with_capacity(spec.coded_len(info.len()));
    let mut reg: u32 = 0;
    let tail = std::iter::repeat_n(0u8, spec.tail_len());
    for bit in info.bits().iter().copied().chain(tail) {
        reg = (reg >> 1) | (u32::from(bit) << (l - 1));
        for &g in &spec.generators {
            out.push(parity(reg & g));
        }
    }
    BitBlock::coded(out)
}

/// Hard-decision Viterbi decoding of a terminated block.
///
/// Minimizes Hamming distance between the observed bits and the codeword.
pub fn viterbi_decode_hard(observations: &[u8], spec: &ConvCodeSpec) -> Result<BitBlock> {
    if observations.iter().any(|&b| b > 1) {
        return Err(Error::invalid("hard observations must be 0 or 1"));
    }
    decode(observations.len(), spec, |t, n| {
        move |j, expected| f64::from(observations[t * n + j] != expected)
    })
}

/// Soft-decision Viterbi decoding of a terminated block.
///
/// One real metric per coded bit: positive means bit 0 is more likely,
/// magnitude is the reliability. The decoder maximizes the correlation of
/// the metrics against the +/-1 symbols of each codeword, so decisions are
/// invariant to any positive scaling of the metrics.
pub fn viterbi_decode_soft(metrics: &[f64], spec: &ConvCodeSpec) -> Result<BitBlock> {
    decode(metrics.len(), spec, |t, n| {
        move |j, expected| {
            // bit 0 maps to +1, bit 1 to -1; cost is negated correlation
            let m = metrics[t * n + j];
            if expected == 0 {
                -m
            } else {
                m
            }
        }
    })
}

/// Shared add-compare-select trellis search with full-block traceback.
///
/// `bit_cost(t, n)` returns a per-tick closure giving the cost of coded bit
/// position `j` under the hypothesis `expected`; total branch cost is the
/// sum over the tick's n coded bits. Ties prefer the lower predecessor
/// state index.
fn decode<F, C>(obs_len: usize, spec: &ConvCodeSpec, bit_cost: F) -> Result<BitBlock>
where
    F: Fn(usize, usize) -> C,
    C: Fn(usize, u8) -> f64,
{
    let info_len = spec.info_len_for(obs_len)?;
    let l = spec.constraint_length;
    let n = spec.rate_inverse();
    let ticks = info_len + spec.tail_len();
    let num_states: usize = 1 << (l - 1);

    // outputs[(s << 1) | b]: coded bits for leaving state s on input b,
    // packed with generator j at bit j.
    let mut outputs = vec![0u32; num_states << 1];
    for s in 0..num_states {
        for b in 0..2u32 {
            let reg = (b << (l - 1)) | s as u32;
            let mut packed = 0u32;
            for (j, &g) in spec.generators.iter().enumerate() {
                packed |= u32::from(parity(reg & g)) << j;
            }
            outputs[(s << 1) | b as usize] = packed;
        }
    }

    let mut metrics = vec![f64::INFINITY; num_states];
    metrics[0] = 0.0; // trellis starts in the all-zero state
    let mut next = vec![0.0f64; num_states];
    let mut survivors = vec![0u16; ticks * num_states];

    let num_patterns = 1usize << n;
    let mut pattern_costs = vec![0.0f64; num_patterns];
    let low_mask = (num_states >> 1).wrapping_sub(1); // lower L-2 bits of a state

    for t in 0..ticks {
        let cost = bit_cost(t, n);
        for (p, pc) in pattern_costs.iter_mut().enumerate() {
            *pc = (0..n).map(|j| cost(j, (p >> j & 1) as u8)).sum();
        }
        let surv = &mut survivors[t * num_states..(t + 1) * num_states];
        for (ns, slot) in next.iter_mut().enumerate() {
            let b = ns >> (l - 2);
            let base = (ns & low_mask) << 1;
            let mut best_cost = f64::INFINITY;
            let mut best_pred = 0u16;
            for pred in [base, base | 1] {
                let c = metrics[pred] + pattern_costs[outputs[(pred << 1) | b] as usize];
                if c < best_cost {
                    best_cost = c;
                    best_pred = pred as u16;
                }
            }
            *slot = best_cost;
            surv[ns] = best_pred;
        }
        std::mem::swap(&mut metrics, &mut next);
    }

    // Terminated block: trace back from the all-zero state.
    let mut state = 0usize;
    let mut decoded = vec![0u8; ticks];
    for t in (0..ticks).rev() {
        decoded[t] = (state >> (l - 2)) as u8;
        state = usize::from(survivors[t * num_states + state]);
    }
    debug_assert_eq!(state, 0, "surviving path must start in the zero state");
    debug_assert!(
        decoded[info_len..].iter().all(|&b| b == 0),
        "tail of the surviving path must be zero"
    );

    decoded.truncate(info_len);
    BitBlock::info(decoded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn default_spec() -> ConvCodeSpec {
        ConvCodeSpec::default()
    }

    fn random_bits(rng: &mut StdRng, len: usize) -> Vec<u8> {
        (0..len).map(|_| rng.random_range(0..=1) as u8).collect()
    }

    /// Independent oracle: mod-2 convolution of the padded input with each
    /// generator's impulse response, MSB of the mask first.
    fn encode_oracle(info: &[u8], spec: &ConvCodeSpec) -> Vec<u8> {
        let l = spec.constraint_length();
        let taps: Vec<Vec<u8>> = spec
            .generators()
            .iter()
            .map(|&g| (0..l).rev().map(|i| (g >> i & 1) as u8).collect())
            .collect();
        let mut padded = info.to_vec();
        padded.extend(std::iter::repeat_n(0, l - 1));
        let mut out = Vec::new();
        for t in 0..padded.len() {
            for g in &taps {
                let mut acc = 0u8;
                for (i, &tap) in g.iter().enumerate() {
                    if tap == 1 && t >= i {
                        acc ^= padded[t - i];
                    }
                }
                out.push(acc);
            }
        }
        out
    }

    fn hamming(a: &[u8], b: &[u8]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    fn correlation(codeword: &[u8], metrics: &[f64]) -> f64 {
        codeword
            .iter()
            .zip(metrics)
            .map(|(&b, &m)| if b == 0 { m } else { -m })
            .sum()
    }

    /// Exhaustive ML search over all terminated codewords of k info bits.
    /// Returns (best info bits, best metric, whether the optimum is unique).
    fn brute_force_ml<M: Fn(&[u8]) -> f64>(
        k: usize,
        spec: &ConvCodeSpec,
        score: M,
    ) -> (Vec<u8>, f64, bool) {
        let mut best_bits = Vec::new();
        let mut best = f64::NEG_INFINITY;
        let mut unique = true;
        for word in 0..(1u32 << k) {
            let bits: Vec<u8> = (0..k).map(|i| (word >> i & 1) as u8).collect();
            let cw = conv_encode(&BitBlock::info(bits.clone()).unwrap(), spec).unwrap();
            let s = score(cw.bits());
            if s > best {
                best = s;
                best_bits = bits;
                unique = true;
            } else if s == best {
                unique = false;
            }
        }
        (best_bits, best, unique)
    }

    #[test]
    fn default_code_matches_octal_generators() {
        let spec = default_spec();
        assert_eq!(spec.constraint_length(), 5);
        assert_eq!(spec.generators(), &[0b11001, 0b10111]);
        assert_eq!(spec.rate_inverse(), 2);
        assert_eq!(spec.coded_len(1000), 2008);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ConvCodeSpec::new(1, &[0b1]).is_err());
        assert!(ConvCodeSpec::new(5, &[]).is_err());
        assert!(ConvCodeSpec::new(5, &[0b100001, 0b10111]).is_err()); // too wide
        assert!(ConvCodeSpec::new(5, &[0b01001, 0b10111]).is_err()); // current tap unset
    }

    #[test]
    fn encode_zeros_gives_zeros() {
        let spec = default_spec();
        let out = conv_encode(&BitBlock::info(vec![0, 0, 0, 0]).unwrap(), &spec).unwrap();
        assert_eq!(out.bits(), &[0u8; 16]);
    }

    #[test]
    fn encode_impulse_response() {
        // Single 1 followed by the 4 tail bits: interleaved impulse responses
        // of g1 = 1,1,0,0,1 and g2 = 1,0,1,1,1.
        let spec = default_spec();
        let out = conv_encode(&BitBlock::info(vec![1]).unwrap(), &spec).unwrap();
        assert_eq!(out.bits(), &[1, 1, 1, 0, 0, 1, 0, 1, 1, 1]);
    }

    #[test]
    fn encode_matches_polynomial_convolution_oracle() {
        let spec = default_spec();
        let mut rng = StdRng::seed_from_u64(11);
        for len in [1, 2, 7, 33, 250] {
            let info = random_bits(&mut rng, len);
            let out = conv_encode(&BitBlock::info(info.clone()).unwrap(), &spec).unwrap();
            assert_eq!(out.bits(), encode_oracle(&info, &spec).as_slice());
            assert_eq!(out.len(), spec.coded_len(len));
            assert_eq!(out.role(), BitRole::Coded);
        }
    }

    #[test]
    fn encoder_is_linear_over_gf2() {
        let spec = default_spec();
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..50 {
            let len = rng.random_range(1..=64);
            let a = random_bits(&mut rng, len);
            let b = random_bits(&mut rng, len);
            let x: Vec<u8> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
            let ea = conv_encode(&BitBlock::info(a).unwrap(), &spec).unwrap();
            let eb = conv_encode(&BitBlock::info(b).unwrap(), &spec).unwrap();
            let ex = conv_encode(&BitBlock::info(x).unwrap(), &spec).unwrap();
            let sum: Vec<u8> = ea.bits().iter().zip(eb.bits()).map(|(p, q)| p ^ q).collect();
            assert_eq!(ex.bits(), sum.as_slice());
        }
    }

    #[test]
    fn encode_rejects_empty_input() {
        let spec = default_spec();
        assert!(conv_encode(&BitBlock::info(vec![]).unwrap(), &spec).is_err());
    }

    #[test]
    fn decode_rejects_bad_lengths() {
        let spec = default_spec();
        assert!(viterbi_decode_hard(&[0; 15], &spec).is_err()); // not a multiple of 2
        assert!(viterbi_decode_hard(&[0; 8], &spec).is_err()); // shorter than termination
        assert!(viterbi_decode_soft(&[0.0; 9], &spec).is_err());
        assert!(viterbi_decode_hard(&[0, 2, 0, 0, 0, 0, 0, 0, 0, 0], &spec).is_err());
    }

    #[test]
    fn noiseless_round_trip_both_modes() {
        let spec = default_spec();
        let mut rng = StdRng::seed_from_u64(13);
        for len in [1, 5, 40, 333] {
            let info = random_bits(&mut rng, len);
            let coded = conv_encode(&BitBlock::info(info.clone()).unwrap(), &spec).unwrap();
            let hard = viterbi_decode_hard(coded.bits(), &spec).unwrap();
            assert_eq!(hard.bits(), info.as_slice());
            assert_eq!(hard.role(), BitRole::Info);
            let metrics: Vec<f64> = coded.bits().iter().map(|&b| 1.0 - 2.0 * f64::from(b)).collect();
            let soft = viterbi_decode_soft(&metrics, &spec).unwrap();
            assert_eq!(soft.bits(), info.as_slice());
        }
    }

    #[test]
    fn corrects_any_single_flip_k8() {
        let spec = default_spec();
        let mut rng = StdRng::seed_from_u64(14);
        for _ in 0..10 {
            let info = random_bits(&mut rng, 8);
            let coded = conv_encode(&BitBlock::info(info.clone()).unwrap(), &spec).unwrap();
            for pos in 0..coded.len() {
                let mut corrupted = coded.bits().to_vec();
                corrupted[pos] ^= 1;
                let decoded = viterbi_decode_hard(&corrupted, &spec).unwrap();
                assert_eq!(decoded.bits(), info.as_slice(), "flip at {pos} not corrected");
            }
        }
    }

    #[test]
    fn soft_viterbi_equals_exhaustive_ml() {
        // 200 random observation vectors per k; continuous metrics make the
        // optimum unique with probability one.
        let spec = default_spec();
        let mut rng = StdRng::seed_from_u64(15);
        for k in 1..=10 {
            for _ in 0..200 {
                let metrics: Vec<f64> = (0..spec.coded_len(k))
                    .map(|_| rng.random::<f64>() * 2.0 - 1.0)
                    .collect();
                let decoded = viterbi_decode_soft(&metrics, &spec).unwrap();
                let (ml_bits, ml_score, unique) =
                    brute_force_ml(k, &spec, |cw| correlation(cw, &metrics));
                assert!(unique, "random continuous metrics should not tie");
                assert_eq!(decoded.bits(), ml_bits.as_slice(), "k={k}");
                let cw = conv_encode(&BitBlock::info(decoded.bits().to_vec()).unwrap(), &spec)
                    .unwrap();
                assert_eq!(correlation(cw.bits(), &metrics), ml_score);
            }
        }
    }

    #[test]
    fn hard_viterbi_achieves_exhaustive_ml_distance() {
        // Hard metrics can tie; the decoded word must attain the brute-force
        // minimum distance, and must match bit-for-bit when the optimum is
        // unique.
        let spec = default_spec();
        let mut rng = StdRng::seed_from_u64(16);
        for k in 1..=10 {
            for _ in 0..200 {
                let obs = random_bits(&mut rng, spec.coded_len(k));
                let decoded = viterbi_decode_hard(&obs, &spec).unwrap();
                let (ml_bits, ml_score, unique) =
                    brute_force_ml(k, &spec, |cw| -(hamming(cw, &obs) as f64));
                let cw = conv_encode(&BitBlock::info(decoded.bits().to_vec()).unwrap(), &spec)
                    .unwrap();
                assert_eq!(-(hamming(cw.bits(), &obs) as f64), ml_score, "k={k}");
                if unique {
                    assert_eq!(decoded.bits(), ml_bits.as_slice(), "k={k}");
                }
            }
        }
    }

    #[test]
    fn soft_decisions_are_scale_invariant() {
        let spec = default_spec();
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..20 {
            let metrics: Vec<f64> = (0..spec.coded_len(24))
                .map(|_| rng.random::<f64>() * 2.0 - 1.0)
                .collect();
            let baseline = viterbi_decode_soft(&metrics, &spec).unwrap();
            for scale in [1e-6, 0.37, 42.0, 1e9] {
                let scaled: Vec<f64> = metrics.iter().map(|m| m * scale).collect();
                assert_eq!(viterbi_decode_soft(&scaled, &spec).unwrap(), baseline);
            }
        }
    }

    #[test]
    fn tie_break_prefers_lower_predecessor_state() {
        // All-zero metrics tie every branch; preferring the lower
        // predecessor state keeps the survivor on the all-zero path.
        let spec = default_spec();
        let decoded = viterbi_decode_soft(&vec![0.0; spec.coded_len(16)], &spec).unwrap();
        assert_eq!(decoded.bits(), &[0u8; 16]);
    }

    #[test]
    fn hard_soft_consistency_on_binary_metrics() {
        let spec = default_spec();
        let mut rng = StdRng::seed_from_u64(18);
        for _ in 0..50 {
            let obs = random_bits(&mut rng, spec.coded_len(32));
            let metrics: Vec<f64> = obs.iter().map(|&b| 1.0 - 2.0 * f64::from(b)).collect();
            let hard = viterbi_decode_hard(&obs, &spec).unwrap();
            let soft = viterbi_decode_soft(&metrics, &spec).unwrap();
            assert_eq!(hard, soft);
        }
    }
}
