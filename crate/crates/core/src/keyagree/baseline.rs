//! Baseline helper-data schemes: the fuzzy commitment scheme over a
//! generic block code, its dithered variant, the code-offset fuzzy
//! extractor, and the concatenation of an inner (4,1) repetition code with
//! an outer (32,16) Reed-Muller code decoded by exact minimum distance.

use crate::channel::{sample_bernoulli, BscParam, SeedSpec};
use crate::error::{Error, Result};
use crate::gf2::{xor, BitVector};

/// A binary block code with hard-decision encode/decode.
pub trait BlockCode: Send + Sync {
    fn n(&self) -> usize;
    fn k(&self) -> usize;
    fn encode(&self, msg: &BitVector) -> Result<BitVector>;
    fn decode(&self, word: &BitVector) -> Result<BitVector>;
}

/// Inner (4,1) repetition + outer (32,16) Reed-Muller concatenation.
///
/// The outer code is the second-order Reed-Muller code of length 32;
/// encoding evaluates the 16 monomials of degree at most two in five
/// variables. Decoding takes a majority vote over each repetition group
/// (2-2 ties resolve to 0, the sign convention of a zero LLR sum) and then
/// exact minimum-distance decoding per 32-bit block against the full
/// 65536-entry codeword table, ties to the smallest message.
pub struct RepetitionRmCode {
    blocks: usize,
    repeat: usize,
    generator: [u32; 16],
    table: Vec<u32>,
}

impl RepetitionRmCode {
    /// The 128-bit-key configuration: 8 outer blocks, n = 1024.
    pub fn standard() -> Self {
        Self::new(8, 4)
    }

    pub fn new(blocks: usize, repeat: usize) -> Self {
        let mut generator = [0u32; 16];
        let monomials: [(usize, usize); 16] = [
            (0, 0), // constant; encoded as the pair (0,0)
            (1, 0),
            (2, 0),
            (3, 0),
            (4, 0),
            (5, 0),
            (1, 2),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 3),
            (2, 4),
            (2, 5),
            (3, 4),
            (3, 5),
            (4, 5),
        ];
        for (row, &(a, b)) in monomials.iter().enumerate() {
            let mut bits = 0u32;
            for t in 0u32..32 {
                let var = |i: usize| (t >> (i - 1)) & 1;
                let val = match (a, b) {
                    (0, 0) => 1,
                    (i, 0) => var(i),
                    (i, j) => var(i) & var(j),
                };
                if val == 1 {
                    bits |= 1 << t;
                }
            }
            generator[row] = bits;
        }
        let mut table = vec![0u32; 1 << 16];
        for (msg, slot) in table.iter_mut().enumerate() {
            let mut cw = 0u32;
            let mut m = msg as u32;
            while m != 0 {
                let r = m.trailing_zeros() as usize;
                cw ^= generator[r];
                m &= m - 1;
            }
            *slot = cw;
        }
        Self {
            blocks,
            repeat,
            generator,
            table,
        }
    }

    pub fn rm_generator(&self) -> &[u32; 16] {
        &self.generator
    }

    fn rm_encode_block(&self, msg: u32) -> u32 {
        self.table[msg as usize]
    }

    fn rm_decode_block(&self, received: u32) -> u32 {
        let mut best_msg = 0u32;
        let mut best_dist = u32::MAX;
        for (msg, &cw) in self.table.iter().enumerate() {
            let d = (cw ^ received).count_ones();
            if d < best_dist {
                best_dist = d;
                best_msg = msg as u32;
            }
        }
        best_msg
    }
}

impl BlockCode for RepetitionRmCode {
    fn n(&self) -> usize {
        self.blocks * 32 * self.repeat
    }

    fn k(&self) -> usize {
        self.blocks * 16
    }

    fn encode(&self, msg: &BitVector) -> Result<BitVector> {
        if msg.len() != self.k() {
            return Err(Error::LengthMismatch(msg.len(), self.k()));
        }
        let mut out = BitVector::zeros(self.n());
        for b in 0..self.blocks {
            let mut m = 0u32;
            for j in 0..16 {
                if msg.get(16 * b + j) {
                    m |= 1 << j;
                }
            }
            let cw = self.rm_encode_block(m);
            for j in 0..32 {
                if (cw >> j) & 1 == 1 {
                    for r in 0..self.repeat {
                        out.set(self.repeat * (32 * b + j) + r, true);
                    }
                }
            }
        }
        Ok(out)
    }

    fn decode(&self, word: &BitVector) -> Result<BitVector> {
        if word.len() != self.n() {
            return Err(Error::LengthMismatch(word.len(), self.n()));
        }
        let mut out = BitVector::zeros(self.k());
        for b in 0..self.blocks {
            let mut received = 0u32;
            for j in 0..32 {
                let mut ones = 0usize;
                for r in 0..self.repeat {
                    if word.get(self.repeat * (32 * b + j) + r) {
                        ones += 1;
                    }
                }
                // majority; an even split has a zero LLR sum and resolves
                // to 0
                if 2 * ones > self.repeat {
                    received |= 1 << j;
                }
            }
            let m = self.rm_decode_block(received);
            for j in 0..16 {
                if (m >> j) & 1 == 1 {
                    out.set(16 * b + j, true);
                }
            }
        }
        Ok(out)
    }
}

/// Decodes a received word of the standard repetition+RM concatenation.
pub fn rm_concat_decode(received: &BitVector) -> Result<BitVector> {
    RepetitionRmCode::standard().decode(received)
}

/// Fuzzy commitment enrollment: `W' = enc(S') ⊕ x`.
pub fn fcs_enroll(x: &BitVector, code: &dyn BlockCode, s_prime: &BitVector) -> Result<BitVector> {
    let cw = code.encode(s_prime)?;
    xor(&cw, x)
}

/// Fuzzy commitment reconstruction: decode `W' ⊕ y`.
pub fn fcs_reconstruct(
    y: &BitVector,
    w_prime: &BitVector,
    code: &dyn BlockCode,
) -> Result<BitVector> {
    code.decode(&xor(w_prime, y)?)
}

/// Dithered fuzzy commitment: `W'' = x ⊕ enc(S') ⊕ J` with
/// `J ~ Bern(q)`; the reconstruction is unchanged but the effective
/// channel between codeword and decoder input becomes BSC(q * p_A).
pub fn dithered_fcs_enroll(
    x: &BitVector,
    code: &dyn BlockCode,
    s_prime: &BitVector,
    q: BscParam,
    seed: &SeedSpec,
) -> Result<BitVector> {
    let w = fcs_enroll(x, code, s_prime)?;
    let dither = sample_bernoulli(w.len(), q.p(), seed);
    xor(&w, &dither)
}

/// Code-offset fuzzy extractor enrollment: the offset uses a random seed
/// word, and the key is a hash of the identifier itself (SHA-256
/// truncated to the code dimension).
pub fn cofe_enroll(
    x: &BitVector,
    code: &dyn BlockCode,
    seed: &SeedSpec,
) -> Result<(BitVector, BitVector)> {
    let s = BitVector::random(code.k(), seed);
    let w = fcs_enroll(x, code, &s)?;
    Ok((w, cofe_key(x, code.k())))
}

/// Code-offset reconstruction: recover the identifier estimate
/// `x̂ = W' ⊕ enc(dec(W' ⊕ y))` and hash it.
pub fn cofe_reconstruct(
    y: &BitVector,
    w_prime: &BitVector,
    code: &dyn BlockCode,
) -> Result<BitVector> {
    let s_hat = fcs_reconstruct(y, w_prime, code)?;
    let x_hat = xor(w_prime, &code.encode(&s_hat)?)?;
    Ok(cofe_key(&x_hat, code.k()))
}

fn cofe_key(x: &BitVector, bits: usize) -> BitVector {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(x.to_bytes_lsb());
    BitVector::from_bytes_lsb(&digest[..bits.div_ceil(8)], bits)
        .expect("digest is long enough for any code dimension here")
}
