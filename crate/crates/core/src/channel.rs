//! Binary symmetric channel model and deterministic randomness plumbing.
//!
//! Every random quantity in the workspace is drawn from a stream identified
//! by `(master_seed, stream_id)`. Streams are realized as ChaCha12 with the
//! master seed as key and the stream id as the ChaCha stream counter, so the
//! sequence for a given pair is a pure function of the pair: trials can be
//! scheduled across threads in any order and still reproduce bit-identically.

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Crossover probability of a binary symmetric channel, restricted to
/// `[0, 0.5]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BscParam {
    p: f64,
}

impl BscParam {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) || p.is_nan() {
            return Err(Error::DomainError(format!(
                "crossover probability {p} outside [0, 0.5]"
            )));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Channel log-likelihood ratio magnitude `ln((1-p)/p)`, infinite at p = 0.
    pub fn llr_magnitude(&self) -> f64 {
        ((1.0 - self.p) / self.p).ln()
    }
}

/// Identifies one deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Stream id composed from a purpose tag and a trial index, so campaign
    /// code never reuses a stream across stages.
    pub fn derived(master_seed: u64, purpose: u64, index: u64) -> Self {
        debug_assert!(purpose < (1 << 16));
        Self::new(master_seed, (purpose << 48) ^ index)
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Transmits `x` over a BSC: returns `x ⊕ z` with `z` i.i.d. Bernoulli(p)
/// drawn from the stream for `seed`.
pub fn sample_bsc(x: &BitVector, ch: BscParam, seed: &SeedSpec) -> BitVector {
    let mut rng = seed.rng();
    let mut out = x.clone();
    if ch.p == 0.0 {
        return out;
    }
    for i in 0..x.len() {
        if rng.gen_bool(ch.p) {
            out.set(i, !out.get(i));
        }
    }
    out
}

/// Samples an i.i.d. Bernoulli(p) vector from the stream.
pub fn sample_bernoulli(len: usize, p: f64, seed: &SeedSpec) -> BitVector {
    let mut rng = seed.rng();
    let mut out = BitVector::zeros(len);
    if p == 0.0 {
        return out;
    }
    for i in 0..len {
        if rng.gen_bool(p) {
            out.set(i, true);
        }
    }
    out
}
