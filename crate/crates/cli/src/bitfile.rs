//! Raw bit files: an 8-byte little-endian bit count followed by the bits
//! packed LSB-first within bytes.

use std::path::Path;
use wzkey_core::{BitVector, Error, Result};

pub fn read_bits(path: &Path) -> Result<BitVector> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 {
        return Err(Error::InvalidShape(format!(
            "{}: missing bit-count header",
            path.display()
        )));
    }
    let len = u64::from_le_bytes(bytes[0..8].try_into().unwrap()) as usize;
    let payload = &bytes[8..];
    if payload.len() != len.div_ceil(8) {
        return Err(Error::InvalidShape(format!(
            "{}: payload holds {} bytes, expected {} for {len} bits",
            path.display(),
            payload.len(),
            len.div_ceil(8)
        )));
    }
    BitVector::from_bytes_lsb(payload, len)
}

pub fn write_bits(path: &Path, bits: &BitVector) -> Result<()> {
    let mut out = Vec::with_capacity(8 + bits.len().div_ceil(8));
    out.extend_from_slice(&(bits.len() as u64).to_le_bytes());
    out.extend_from_slice(&bits.to_bytes_lsb());
    std::fs::write(path, out)?;
    Ok(())
}
