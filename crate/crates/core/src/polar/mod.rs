//! Polar transform, reliability-ordered nested code construction, successive
//! cancellation list decoding, and the list-decoder vector quantizer.
//!
//! Bit ordering is the natural (non-bit-reversed) Kronecker order
//! everywhere: `x = u F^{⊗m}` with `F = [[1,0],[1,1]]`, realized by the
//! in-place butterfly. The transform is its own inverse over GF(2).

mod scl;

pub use scl::{scl_decode, scl_decode_list, SclOutput, SclPath};

use crate::channel::{BscParam, SeedSpec};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Per-symbol log-likelihood ratios in the natural-log domain; positive
/// values favor bit 0.
#[derive(Debug, Clone)]
pub struct LlrVector(pub Vec<f64>);

impl LlrVector {
    /// Channel LLRs for a hard word observed through a BSC(p):
    /// `±ln((1-p)/p)` with sign given by each received bit.
    pub fn from_hard_bsc(word: &BitVector, ch: BscParam) -> Self {
        let c = ch.llr_magnitude();
        Self(word.iter().map(|b| if b { -c } else { c }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A nested pair of polar codes sharing one reliability ordering.
///
/// `C(n, F, [V, W])` is the error-correction code with frozen set `F`;
/// `C1(n, F1, V)` with `F1 ⊆ F` is the quantizer code. The helper positions
/// are `Fw = F \ F1`, the key positions are the complement of `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCodePair {
    n: usize,
    reliability_order: Vec<u32>,
    frozen: Vec<u32>,
    frozen_inner: Vec<u32>,
    helper: Vec<u32>,
    key: Vec<u32>,
    v: BitVector,
}

impl PolarCodePair {
    pub fn new(
        n: usize,
        reliability_order: Vec<u32>,
        mut frozen: Vec<u32>,
        mut frozen_inner: Vec<u32>,
        v: BitVector,
    ) -> Result<Self> {
        if !n.is_power_of_two() || n == 0 {
            return Err(Error::NotPowerOfTwo(n));
        }
        if reliability_order.len() != n {
            return Err(Error::LengthMismatch(reliability_order.len(), n));
        }
        let mut seen = vec![false; n];
        for &i in &reliability_order {
            if (i as usize) >= n || seen[i as usize] {
                return Err(Error::InvalidShape(format!(
                    "reliability order is not a permutation of 0..{n}"
                )));
            }
            seen[i as usize] = true;
        }
        frozen.sort_unstable();
        frozen.dedup();
        frozen_inner.sort_unstable();
        frozen_inner.dedup();
        if frozen.last().is_some_and(|&i| i as usize >= n) {
            return Err(Error::InvalidShape("frozen index out of range".into()));
        }
        let frozen_set: std::collections::HashSet<u32> = frozen.iter().copied().collect();
        if !frozen_inner.iter().all(|i| frozen_set.contains(i)) {
            return Err(Error::InvalidShape("F1 is not a subset of F".into()));
        }
        if v.len() != frozen_inner.len() {
            return Err(Error::FrozenLengthMismatch {
                got: v.len(),
                expected: frozen_inner.len(),
            });
        }
        let inner_set: std::collections::HashSet<u32> = frozen_inner.iter().copied().collect();
        let helper: Vec<u32> = frozen.iter().copied().filter(|i| !inner_set.contains(i)).collect();
        let key: Vec<u32> = (0..n as u32).filter(|i| !frozen_set.contains(i)).collect();
        Ok(Self {
            n,
            reliability_order,
            frozen,
            frozen_inner,
            helper,
            key,
            v,
        })
    }

    /// Code with the `n - key_bits` least reliable indices frozen and
    /// `F1 = F` (fully frozen quantizer, all-zero `V`).
    pub fn from_ordering(n: usize, reliability_order: Vec<u32>, key_bits: usize) -> Result<Self> {
        if key_bits > n {
            return Err(Error::InvalidShape(format!("key_bits {key_bits} exceeds n {n}")));
        }
        let frozen: Vec<u32> = reliability_order[..n - key_bits].to_vec();
        let f1 = frozen.clone();
        let v = BitVector::zeros(f1.len());
        Self::new(n, reliability_order, frozen, f1, v)
    }

    /// Same outer code with a different inner frozen set (all-zero `V`).
    pub fn with_inner(&self, frozen_inner: Vec<u32>) -> Result<Self> {
        let v = BitVector::zeros(frozen_inner.len());
        Self::new(
            self.n,
            self.reliability_order.clone(),
            self.frozen.clone(),
            frozen_inner,
            v,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stages(&self) -> usize {
        self.n.trailing_zeros() as usize
    }

    /// Indices ordered least to most reliable.
    pub fn reliability_order(&self) -> &[u32] {
        &self.reliability_order
    }

    /// Frozen set of the error-correction code `C`, ascending.
    pub fn frozen(&self) -> &[u32] {
        &self.frozen
    }

    /// Frozen set of the quantizer code `C1`, ascending.
    pub fn frozen_inner(&self) -> &[u32] {
        &self.frozen_inner
    }

    /// Helper positions `Fw = F \ F1`, ascending.
    pub fn helper_indices(&self) -> &[u32] {
        &self.helper
    }

    /// Key positions (complement of `F`), ascending.
    pub fn key_indices(&self) -> &[u32] {
        &self.key
    }

    pub fn message_len(&self) -> usize {
        self.key.len()
    }

    pub fn m1(&self) -> usize {
        self.frozen_inner.len()
    }

    pub fn m2(&self) -> usize {
        self.helper.len()
    }

    /// Frozen values at `F1`.
    pub fn v(&self) -> &BitVector {
        &self.v
    }
}

/// Applies the Kronecker power of the 2x2 kernel in place.
pub(crate) fn butterfly(bits: &mut [u8]) {
    let n = bits.len();
    let mut half = 1;
    while half < n {
        let mut i = 0;
        while i < n {
            for j in i..i + half {
                bits[j] ^= bits[j + half];
            }
            i += 2 * half;
        }
        half <<= 1;
    }
}

/// Polar transform `x = u F^{⊗m}` in natural order; an involution.
pub fn polar_transform(u: &BitVector) -> Result<BitVector> {
    if !u.len().is_power_of_two() || u.is_empty() {
        return Err(Error::NotPowerOfTwo(u.len()));
    }
    let mut bits: Vec<u8> = u.iter().map(u8::from).collect();
    butterfly(&mut bits);
    Ok(BitVector::from_bits(bits.iter().map(|&b| b == 1)))
}

/// Bhattacharyya parameters of the `n` polarized bit channels for a design
/// BSC, in natural index order. Root `Z0 = 2 sqrt(p(1-p))`; the recursion is
/// `Z⁻ = 2Z - Z²` (applied on a 0 bit of the index, most significant bit
/// first) and `Z⁺ = Z²` (on a 1 bit).
pub fn bhattacharyya_parameters(n: usize, design_p: BscParam) -> Result<Vec<f64>> {
    if !n.is_power_of_two() || n == 0 {
        return Err(Error::NotPowerOfTwo(n));
    }
    let p = design_p.p();
    if p <= 0.0 {
        return Err(Error::DomainError("design crossover must be positive".into()));
    }
    let mut z = vec![2.0 * (p * (1.0 - p)).sqrt()];
    while z.len() < n {
        let mut next = vec![0.0; z.len() * 2];
        for (j, &zv) in z.iter().enumerate() {
            next[2 * j] = 2.0 * zv - zv * zv;
            next[2 * j + 1] = zv * zv;
        }
        z = next;
    }
    Ok(z)
}

/// Indices sorted least to most reliable by the Bhattacharyya recursion
/// (descending Z), ties broken by ascending index.
pub fn construct_reliabilities(n: usize, design_p: BscParam) -> Result<Vec<u32>> {
    let z = bhattacharyya_parameters(n, design_p)?;
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        z[b as usize]
            .partial_cmp(&z[a as usize])
            .expect("Bhattacharyya parameters are finite")
            .then(a.cmp(&b))
    });
    Ok(order)
}

/// Genie-aided successive cancellation pass: counts per-position decision
/// errors against known true bits (exact zero LLRs charged one half) and
/// returns the true codeword of each subtree for the partial sums.
fn genie_pass(llr: &[f64], truth: &[u8], errors: &mut [f64], base: usize) -> Vec<u8> {
    let n = llr.len();
    if n == 1 {
        if llr[0] == 0.0 {
            errors[base] += 0.5;
        } else if u8::from(llr[0] < 0.0) != truth[0] {
            errors[base] += 1.0;
        }
        return vec![truth[0]];
    }
    let half = n / 2;
    let fl: Vec<f64> = (0..half)
        .map(|j| scl::check_node_llr(llr[j], llr[j + half]))
        .collect();
    let left = genie_pass(&fl, &truth[..half], errors, base);
    let gl: Vec<f64> = (0..half)
        .map(|j| {
            if left[j] == 1 {
                llr[j + half] - llr[j]
            } else {
                llr[j + half] + llr[j]
            }
        })
        .collect();
    let right = genie_pass(&gl, &truth[half..], errors, base + half);
    let mut cw: Vec<u8> = (0..half).map(|j| left[j] ^ right[j]).collect();
    cw.extend(right);
    cw
}

/// Monte-Carlo reliability ordering: runs `trials` genie-aided SC passes
/// with uniform inputs over a BSC(`design_p`) and sorts indices by their
/// measured decision-error counts (descending; least reliable first),
/// breaking ties by descending Bhattacharyya parameter and then ascending
/// index. Deterministic given the seed.
pub fn monte_carlo_reliabilities(
    n: usize,
    design_p: BscParam,
    trials: u64,
    seed: &SeedSpec,
) -> Result<Vec<u32>> {
    if !n.is_power_of_two() || n == 0 {
        return Err(Error::NotPowerOfTwo(n));
    }
    let z = bhattacharyya_parameters(n, design_p)?;
    let errors = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0.0f64; n],
            |mut acc, t| {
                let u = BitVector::random(
                    n,
                    &SeedSpec::new(seed.master_seed, seed.stream_id ^ (2 * t)),
                );
                let truth: Vec<u8> = u.iter().map(u8::from).collect();
                let x = polar_transform(&u).expect("power of two");
                let y = crate::channel::sample_bsc(
                    &x,
                    design_p,
                    &SeedSpec::new(seed.master_seed, seed.stream_id ^ (2 * t + 1)),
                );
                let llr = LlrVector::from_hard_bsc(&y, design_p);
                genie_pass(&llr.0, &truth, &mut acc, 0);
                acc
            },
        )
        .reduce(
            || vec![0.0f64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        errors[b as usize]
            .partial_cmp(&errors[a as usize])
            .expect("error counts are finite")
            .then(
                z[b as usize]
                    .partial_cmp(&z[a as usize])
                    .expect("Bhattacharyya parameters are finite"),
            )
            .then(a.cmp(&b))
    });
    Ok(order)
}

/// Result of quantizing a source word with the inner code.
#[derive(Debug, Clone)]
pub struct Quantized {
    /// Full decoder input vector (frozen and free positions).
    pub u: BitVector,
    /// Re-encoded codeword `x_q = transform(u)`.
    pub x_q: BitVector,
    /// Normalized Hamming distortion `d_H(x, x_q) / n`.
    pub distortion: f64,
}

/// Quantizes `x` by list-decoding the inner code `C1` on LLRs for a
/// BSC(`q_design`), selecting among surviving paths the codeword closest to
/// `x` in Hamming distance (ties to the smaller path index).
pub fn quantize(
    x: &BitVector,
    code: &PolarCodePair,
    v: &BitVector,
    q_design: BscParam,
    list_size: usize,
) -> Result<Quantized> {
    if x.len() != code.n() {
        return Err(Error::LengthMismatch(x.len(), code.n()));
    }
    let llr = LlrVector::from_hard_bsc(x, q_design);
    let paths = scl_decode_list(&llr, code, v, list_size)?;
    let mut best: Option<(usize, BitVector, BitVector)> = None;
    for path in paths {
        let cw = polar_transform(&path.u)?;
        let d = x.distance(&cw);
        if best.as_ref().is_none_or(|(bd, _, _)| d < *bd) {
            best = Some((d, path.u, cw));
        }
    }
    let (d, u, x_q) = best.expect("decoder returns at least one path");
    Ok(Quantized {
        u,
        x_q,
        distortion: d as f64 / x.len() as f64,
    })
}

/// Splits a decoder output vector into helper data `W` (bits at `Fw`) and
/// secret key `S` (bits at the unfrozen positions), both in ascending index
/// order.
pub fn extract_helper_and_key(u: &BitVector, code: &PolarCodePair) -> Result<(BitVector, BitVector)> {
    if u.len() != code.n() {
        return Err(Error::LengthMismatch(u.len(), code.n()));
    }
    Ok((u.select(code.helper_indices()), u.select(code.key_indices())))
}

/// Scatters `(V, W, S)` back into a full-length input vector; inverse of
/// [`extract_helper_and_key`] given the code's `V`.
pub fn assemble_u(
    code: &PolarCodePair,
    v: &BitVector,
    w: &BitVector,
    s: &BitVector,
) -> Result<BitVector> {
    if v.len() != code.m1() {
        return Err(Error::FrozenLengthMismatch {
            got: v.len(),
            expected: code.m1(),
        });
    }
    if w.len() != code.m2() {
        return Err(Error::FrozenLengthMismatch {
            got: w.len(),
            expected: code.m2(),
        });
    }
    if s.len() != code.message_len() {
        return Err(Error::LengthMismatch(s.len(), code.message_len()));
    }
    let mut u = BitVector::zeros(code.n());
    for (j, &i) in code.frozen_inner().iter().enumerate() {
        u.set(i as usize, v.get(j));
    }
    for (j, &i) in code.helper_indices().iter().enumerate() {
        u.set(i as usize, w.get(j));
    }
    for (j, &i) in code.key_indices().iter().enumerate() {
        u.set(i as usize, s.get(j));
    }
    Ok(u)
}

/// On-disk description of a nested polar code pair (versioned JSON; index
/// sets are 1-based sorted arrays, bit sequences are hex with bits packed
/// LSB-first within bytes).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeFile {
    pub version: u32,
    pub n: usize,
    pub design_p: f64,
    pub reliability_order: Vec<u32>,
    pub f: Vec<u32>,
    pub f1: Vec<u32>,
    pub v: String,
}

impl CodeFile {
    pub fn from_pair(code: &PolarCodePair, design_p: f64) -> Self {
        let up = |v: &[u32]| v.iter().map(|i| i + 1).collect::<Vec<u32>>();
        Self {
            version: 1,
            n: code.n(),
            design_p,
            reliability_order: up(code.reliability_order()),
            f: up(code.frozen()),
            f1: up(code.frozen_inner()),
            v: code.v().to_hex(),
        }
    }

    pub fn to_pair(&self) -> Result<PolarCodePair> {
        if self.version != 1 {
            return Err(Error::InvalidShape(format!(
                "unsupported code file version {}",
                self.version
            )));
        }
        let down = |v: &[u32]| -> Result<Vec<u32>> {
            v.iter()
                .map(|&i| {
                    i.checked_sub(1)
                        .ok_or_else(|| Error::InvalidShape("indices are 1-based".into()))
                })
                .collect()
        };
        let v = BitVector::from_hex(&self.v, self.f1.len())?;
        PolarCodePair::new(
            self.n,
            down(&self.reliability_order)?,
            down(&self.f)?,
            down(&self.f1)?,
            v,
        )
    }

    /// Canonical serialized bytes; the digest of a code file is the SHA-256
    /// of exactly these bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("code file serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn digest(&self) -> [u8; 32] {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.canonical_bytes());
        h.finalize().into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SeedSpec;

    fn p(x: f64) -> BscParam {
        BscParam::new(x).unwrap()
    }

    #[test]
    fn transform_of_zero_is_zero() {
        let u = BitVector::zeros(16);
        assert!(polar_transform(&u).unwrap().is_zero());
    }

    #[test]
    fn transform_two_bit_kernel() {
        let u = BitVector::from_bit_str("01").unwrap();
        assert_eq!(polar_transform(&u).unwrap(), BitVector::from_bit_str("11").unwrap());
        let u = BitVector::from_bit_str("10").unwrap();
        assert_eq!(polar_transform(&u).unwrap(), BitVector::from_bit_str("10").unwrap());
    }

    #[test]
    fn transform_rejects_non_power_of_two() {
        assert!(matches!(
            polar_transform(&BitVector::zeros(12)),
            Err(Error::NotPowerOfTwo(12))
        ));
    }

    #[test]
    fn transform_is_involution() {
        for trial in 0..50 {
            let u = BitVector::random(256, &SeedSpec::new(17, trial));
            let x = polar_transform(&u).unwrap();
            assert_eq!(polar_transform(&x).unwrap(), u);
        }
    }

    #[test]
    fn bhattacharyya_root_value() {
        let z = bhattacharyya_parameters(1, p(0.15)).unwrap();
        assert!((z[0] - 0.7141428428542851).abs() < 1e-12);
    }

    #[test]
    fn bhattacharyya_recursion_sandwich() {
        // Z+ <= Z <= Z- at every node of the recursion tree.
        let mut z = vec![2.0 * (0.15f64 * 0.85).sqrt()];
        for _ in 0..8 {
            let mut next = vec![0.0; z.len() * 2];
            for (j, &zv) in z.iter().enumerate() {
                let minus = 2.0 * zv - zv * zv;
                let plus = zv * zv;
                assert!(plus <= zv && zv <= minus, "sandwich violated at z={zv}");
                next[2 * j] = minus;
                next[2 * j + 1] = plus;
            }
            z = next;
        }
    }

    #[test]
    fn degenerate_channel_ties_break_by_ascending_index() {
        // Near the p -> 0 limit most Z values underflow to exactly 0; those
        // tied indices must come out in ascending order, after every index
        // with a positive Z (which is less reliable).
        let z = bhattacharyya_parameters(64, p(1e-300)).unwrap();
        let order = construct_reliabilities(64, p(1e-300)).unwrap();
        let zero_start = order
            .iter()
            .position(|&i| z[i as usize] == 0.0)
            .expect("some channels underflow at p = 1e-300");
        let tail = &order[zero_start..];
        assert!(!tail.is_empty());
        assert!(tail.windows(2).all(|w| w[0] < w[1]));
        assert!(order[..zero_start].iter().all(|&i| z[i as usize] > 0.0));
    }

    #[test]
    fn known_extreme_channels() {
        let order = construct_reliabilities(256, p(0.15)).unwrap();
        // All-minus indexduplicates worst, all-plus best.
        assert_eq!(order[0], 0);
        assert_eq!(order[255], 255);
    }

    #[test]
    fn code_pair_validation() {
        let order = construct_reliabilities(8, p(0.2)).unwrap();
        let code = PolarCodePair::from_ordering(8, order.clone(), 3).unwrap();
        assert_eq!(code.message_len(), 3);
        assert_eq!(code.m1(), 5);
        assert_eq!(code.m2(), 0);
        // F1 not a subset of F is rejected.
        let f = code.frozen().to_vec();
        let mut f1_bad = f.clone();
        f1_bad[0] = code.key_indices()[0];
        assert!(PolarCodePair::new(8, order, f, f1_bad, BitVector::zeros(5)).is_err());
    }

    #[test]
    fn extract_and_assemble_round_trip() {
        // n=8 with F={0,1,2}, F1={0,1}: W = bit at index 2, S = bits 3..8.
        let order: Vec<u32> = vec![0, 1, 2, 3, 4, 5, 6, 7];
        let code =
            PolarCodePair::new(8, order, vec![0, 1, 2], vec![0, 1], BitVector::zeros(2)).unwrap();
        let u = BitVector::from_bit_str("10110100").unwrap();
        let (w, s) = extract_helper_and_key(&u, &code).unwrap();
        assert_eq!(w, BitVector::from_bit_str("1").unwrap());
        assert_eq!(s, BitVector::from_bit_str("10100").unwrap());
        let v = u.select(code.frozen_inner());
        let back = assemble_u(&code, &v, &w, &s).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn code_file_round_trip_and_digest() {
        let order = construct_reliabilities(64, p(0.18)).unwrap();
        let code = PolarCodePair::from_ordering(64, order, 16).unwrap();
        let file = CodeFile::from_pair(&code, 0.18);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: CodeFile = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.to_pair().unwrap(), code);
        assert_eq!(parsed.digest(), file.digest());
    }
}
