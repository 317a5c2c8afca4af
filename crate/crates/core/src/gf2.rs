//! Bit-exact GF(2) linear algebra: packed bit vectors, dense binary matrices,
//! Gaussian elimination, and uniformly random full-rank parity-check matrices.
//!
//! Vectors are packed into `u64` words with the logical length carried
//! separately; bit `i` lives in word `i / 64` at position `i % 64`. Trailing
//! bits of the last word are kept zero so whole-word operations stay exact.

use crate::channel::SeedSpec;
use crate::error::{Error, Result};
use rand::RngCore;
use std::fmt;

/// A fixed-length binary vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    /// All-zero vector of length `len`.
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0u64; len.div_ceil(64)],
            len,
        }
    }

    /// Builds a vector from `0`/`1` entries.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.iter().enumerate() {
            if *b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0` and `1` characters, index 0 first.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Error::DomainError(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(v)
    }

    /// Uniformly random vector drawn from the seeded stream.
    pub fn random(len: usize, seed: &SeedSpec) -> Self {
        let mut rng = seed.rng();
        let mut words = vec![0u64; len.div_ceil(64)];
        for w in words.iter_mut() {
            *w = rng.next_u64();
        }
        let mut v = Self { words, len };
        v.mask_tail();
        v
    }

    /// Bits packed LSB-first within each byte (bit `i` at byte `i / 8`,
    /// position `i % 8`). This is the packing used by every on-disk format.
    pub fn to_bytes_lsb(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (i, byte) in out.iter_mut().enumerate() {
            let shift = (i % 8) * 8;
            *byte = ((self.words[i / 8] >> shift) & 0xff) as u8;
        }
        out
    }

    /// Inverse of [`to_bytes_lsb`](Self::to_bytes_lsb); `len` is the bit count.
    pub fn from_bytes_lsb(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::LengthMismatch(bytes.len(), len.div_ceil(8)));
        }
        let mut v = Self::zeros(len);
        for (i, &b) in bytes.iter().enumerate() {
            let shift = (i % 8) * 8;
            v.words[i / 8] |= (b as u64) << shift;
        }
        v.mask_tail();
        Ok(v)
    }

    /// Hex encoding of the LSB-first byte packing.
    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes_lsb())
    }

    pub fn from_hex(s: &str, len: usize) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::DomainError(format!("bad hex: {e}")))?;
        Self::from_bytes_lsb(&bytes, len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming distance to `other`; lengths must agree.
    pub fn distance(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len, "distance: length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor_assign: length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the AND with `other` (inner product over GF(2)).
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "dot: length mismatch");
        let acc: u64 = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u64, |acc, (a, b)| acc ^ (a & b));
        acc.count_ones() % 2 == 1
    }

    /// Extracts the bits at `indices` in the given order.
    pub fn select(&self, indices: &[u32]) -> Self {
        let mut out = Self::zeros(indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if self.get(i as usize) {
                out.set(j, true);
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Value as a `u64` with bit `i` of the vector at bit `i` of the word.
    /// Only valid for `len <= 64`.
    pub fn as_u64(&self) -> u64 {
        assert!(self.len <= 64, "as_u64 needs len <= 64");
        if self.words.is_empty() {
            0
        } else {
            self.words[0]
        }
    }

    /// Builds a vector of length `len` from the low `len` bits of `word`.
    pub fn from_u64(word: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = if len == 64 { word } else { word & ((1u64 << len) - 1) };
        }
        v
    }

    /// Packed words, bit `i` at word `i / 64`, position `i % 64`.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn mask_tail(&mut self) {
        let used = self.len % 64;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
        if self.len == 0 {
            self.words.clear();
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            for b in self.iter() {
                write!(f, "{}", if b { '1' } else { '0' })?;
            }
            Ok(())
        } else {
            write!(f, "BitVector(len={}, hex={})", self.len, self.to_hex())
        }
    }
}

/// Element-wise modulo-2 sum of two equal-length vectors.
pub fn xor(a: &BitVector, b: &BitVector) -> Result<BitVector> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let mut out = a.clone();
    out.xor_assign(b);
    Ok(out)
}

/// A dense binary matrix stored row-major, one packed row per [`BitVector`].
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitVector::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Result<Self> {
        for r in &rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch(r.len(), cols));
            }
        }
        Ok(Self { rows, cols })
    }

    /// Uniformly random matrix from the seeded stream.
    pub fn random(rows: usize, cols: usize, seed: &SeedSpec) -> Self {
        let mut rng = seed.rng();
        let words_per_row = cols.div_ceil(64);
        let rows = (0..rows)
            .map(|_| {
                let mut words = vec![0u64; words_per_row];
                for w in words.iter_mut() {
                    *w = rng.next_u64();
                }
                let mut v = BitVector { words, len: cols };
                v.mask_tail();
                v
            })
            .collect();
        Self { rows, cols }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.rows[r].set(c, v);
    }

    /// Vertical stack `[self; other]`.
    pub fn stack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::LengthMismatch(self.cols, other.cols));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self { rows, cols: self.cols })
    }

    /// Sub-matrix of the given row range.
    pub fn row_slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            rows: self.rows[range].to_vec(),
            cols: self.cols,
        }
    }

    /// Rank over GF(2) by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut work: Vec<BitVector> = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..work.len()).find(|&r| work[r].get(col)) else {
                continue;
            };
            work.swap(rank, pivot);
            let pivot_row = work[rank].clone();
            for (r, row) in work.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
        rank
    }

    /// Reduced row-echelon form; returns the reduced matrix (zero rows
    /// dropped) together with the pivot column of each remaining row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut work: Vec<BitVector> = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..work.len()).find(|&r| work[r].get(col)) else {
                continue;
            };
            work.swap(rank, pivot);
            let pivot_row = work[rank].clone();
            for (r, row) in work.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
        work.truncate(rank);
        (Self { rows: work, cols: self.cols }, pivots)
    }

    /// Basis of the right null space `{ v : M vᵀ = 0 }`, one vector per free
    /// column of the RREF. Deterministic: free columns in ascending order.
    pub fn null_space(&self) -> Vec<BitVector> {
        let (rr, pivots) = self.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = BitVector::zeros(self.cols);
            v.set(f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if rr.rows[r].get(f) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows.len(), self.cols)?;
        if self.cols <= 64 && self.rows.len() <= 32 {
            for r in &self.rows {
                writeln!(f, "  {r:?}")?;
            }
        }
        Ok(())
    }
}

/// GF(2) vector-matrix product.
///
/// With `transpose` set, computes `v Mᵀ` (a length-`rows` syndrome for a
/// parity-check matrix); otherwise computes `v M` (length-`cols`, e.g. a
/// message times a generator).
pub fn mat_vec(v: &BitVector, m: &Gf2Matrix, transpose: bool) -> Result<BitVector> {
    if transpose {
        if v.len() != m.n_cols() {
            return Err(Error::DimensionMismatch {
                vec_len: v.len(),
                rows: m.n_rows(),
                cols: m.n_cols(),
            });
        }
        let mut out = BitVector::zeros(m.n_rows());
        for (j, row) in m.rows.iter().enumerate() {
            if v.dot(row) {
                out.set(j, true);
            }
        }
        Ok(out)
    } else {
        if v.len() != m.n_rows() {
            return Err(Error::DimensionMismatch {
                vec_len: v.len(),
                rows: m.n_rows(),
                cols: m.n_cols(),
            });
        }
        let mut out = BitVector::zeros(m.n_cols());
        for (i, row) in m.rows.iter().enumerate() {
            if v.get(i) {
                out.xor_assign(row);
            }
        }
        Ok(out)
    }
}

/// Draws a uniformly random `m x n` matrix of full GF(2) rank `m`,
/// resampling on rank deficiency.
pub fn random_full_rank_parity(n: usize, m: usize, seed: &SeedSpec) -> Result<Gf2Matrix> {
    if m > n {
        return Err(Error::InvalidShape(format!(
            "cannot have full rank with m={m} rows and n={n} columns"
        )));
    }
    for attempt in 0..1024u64 {
        let sub = SeedSpec::new(seed.master_seed, seed.stream_id.wrapping_add(attempt << 32));
        let cand = Gf2Matrix::random(m, n, &sub);
        if cand.rank() == m {
            return Ok(cand);
        }
    }
    // Full rank has probability > 0.288 per draw; 1024 misses means a broken RNG.
    unreachable!("full-rank sampling failed 1024 consecutive times")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        BitVector::from_bit_str(s).unwrap()
    }

    #[test]
    fn xor_identity_and_self_inverse() {
        assert_eq!(xor(&bv("0101"), &bv("0000")).unwrap(), bv("0101"));
        assert_eq!(xor(&bv("0101"), &bv("0101")).unwrap(), bv("0000"));
        assert_eq!(xor(&bv("1110"), &bv("0111")).unwrap(), bv("1001"));
    }

    #[test]
    fn xor_length_mismatch() {
        assert!(matches!(
            xor(&bv("01"), &bv("011")),
            Err(Error::LengthMismatch(2, 3))
        ));
    }

    /// Parity-check matrix of the (7,4) Hamming code; columns 1..7 are the
    /// binary expansions of 1..7 with row j holding bit j.
    fn hamming_h() -> Gf2Matrix {
        let rows = vec![bv("1010101"), bv("0110011"), bv("0001111")];
        Gf2Matrix::from_rows(rows, 7).unwrap()
    }

    #[test]
    fn mat_vec_zero_and_codeword() {
        let h = hamming_h();
        let zero = BitVector::zeros(7);
        assert!(mat_vec(&zero, &h, true).unwrap().is_zero());
        // 1110000 has syndrome 0 for this H (cols 1+2+3 = 0).
        let cw = bv("1110000");
        assert!(mat_vec(&cw, &h, true).unwrap().is_zero());
    }

    #[test]
    fn mat_vec_single_error_gives_column() {
        let h = hamming_h();
        let e1 = bv("1000000");
        let syn = mat_vec(&e1, &h, true).unwrap();
        let col1: Vec<bool> = (0..3).map(|j| h.get(j, 0)).collect();
        assert_eq!(syn.iter().collect::<Vec<_>>(), col1);
    }

    #[test]
    fn mat_vec_dimension_mismatch() {
        let h = hamming_h();
        let v = bv("10100");
        assert!(matches!(
            mat_vec(&v, &h, true),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rank_of_hamming_is_three() {
        assert_eq!(hamming_h().rank(), 3);
    }

    #[test]
    fn null_space_is_orthogonal_and_full() {
        let h = hamming_h();
        let ns = h.null_space();
        assert_eq!(ns.len(), 4);
        for v in &ns {
            assert!(mat_vec(v, &h, true).unwrap().is_zero());
        }
        let g = Gf2Matrix::from_rows(ns, 7).unwrap();
        assert_eq!(g.rank(), 4);
    }

    #[test]
    fn full_rank_parity_has_requested_rank() {
        let seed = SeedSpec::new(7, 0);
        let m = random_full_rank_parity(7, 3, &seed).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (3, 7));
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn full_rank_square_is_invertible() {
        let seed = SeedSpec::new(11, 4);
        let m = random_full_rank_parity(4, 4, &seed).unwrap();
        assert_eq!(m.rank(), 4);
    }

    #[test]
    fn full_rank_rejects_wide_m() {
        assert!(matches!(
            random_full_rank_parity(3, 5, &SeedSpec::new(0, 0)),
            Err(Error::InvalidShape(_))
        ));
    }

    #[test]
    fn distinct_streams_give_distinct_matrices() {
        let mut seen = std::collections::HashSet::new();
        for id in 0..100 {
            let m = random_full_rank_parity(32, 16, &SeedSpec::new(99, id)).unwrap();
            let key: Vec<u64> = (0..16).flat_map(|r| m.row(r).words().to_vec()).collect();
            seen.insert(key);
        }
        assert_eq!(seen.len(), 100);
    }

    #[test]
    fn bytes_and_hex_round_trip() {
        let v = bv("10110011101");
        let b = v.to_bytes_lsb();
        assert_eq!(BitVector::from_bytes_lsb(&b, v.len()).unwrap(), v);
        assert_eq!(BitVector::from_hex(&v.to_hex(), v.len()).unwrap(), v);
    }

    #[test]
    fn select_orders_bits() {
        let v = bv("10110100");
        assert_eq!(v.select(&[2]), bv("1"));
        assert_eq!(v.select(&[3, 4, 5, 6, 7]), bv("10100"));
    }

    proptest! {
        /// (a ⊕ b) Mᵀ = a Mᵀ ⊕ b Mᵀ over random instances.
        #[test]
        fn syndrome_is_linear(seed in 0u64..1000, n in 1usize..40, m in 0usize..12) {
            let m = m.min(n);
            let mat = Gf2Matrix::random(m, n, &SeedSpec::new(seed, 1));
            let a = BitVector::random(n, &SeedSpec::new(seed, 2));
            let b = BitVector::random(n, &SeedSpec::new(seed, 3));
            let lhs = mat_vec(&xor(&a, &b).unwrap(), &mat, true).unwrap();
            let rhs = xor(
                &mat_vec(&a, &mat, true).unwrap(),
                &mat_vec(&b, &mat, true).unwrap(),
            ).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn xor_self_is_zero(seed in 0u64..1000, n in 0usize..200) {
            let a = BitVector::random(n, &SeedSpec::new(seed, 0));
            prop_assert!(xor(&a, &a).unwrap().is_zero());
        }

        #[test]
        fn random_parity_is_always_full_rank(seed in 0u64..200) {
            let m = random_full_rank_parity(12, 6, &SeedSpec::new(seed, 0)).unwrap();
            prop_assert_eq!(m.rank(), 6);
        }
    }
}
