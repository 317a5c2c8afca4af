//! End-to-end enrollment and reconstruction pipelines over both
//! constructions, the baseline schemes, helper-data serialization, and
//! seeded metric campaigns.

pub mod baseline;

pub use baseline::{
    cofe_enroll, cofe_reconstruct, dithered_fcs_enroll, fcs_enroll, fcs_reconstruct,
    rm_concat_decode, BlockCode, RepetitionRmCode,
};

use crate::channel::{sample_bsc, BscParam, SeedSpec};
use crate::design::DesignResult;
use crate::error::{Error, Result};
use crate::gf2::{xor, BitVector};
use crate::linear::{cs_pad, cs_unpad, enroll_gs, reconstruct_gs, NestedLinearCode};
use crate::polar::{extract_helper_and_key, quantize, scl_decode, CodeFile, LlrVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Identifies the scheme a helper bundle belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum SchemeId {
    PolarGs = 0,
    PolarCs = 1,
    LinearGs = 2,
    LinearCs = 3,
    Fcs = 4,
    Cofe = 5,
}

impl TryFrom<u8> for SchemeId {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        Ok(match v {
            0 => SchemeId::PolarGs,
            1 => SchemeId::PolarCs,
            2 => SchemeId::LinearGs,
            3 => SchemeId::LinearCs,
            4 => SchemeId::Fcs,
            5 => SchemeId::Cofe,
            _ => return Err(Error::InvalidShape(format!("unknown scheme id {v}"))),
        })
    }
}

const BUNDLE_MAGIC: &[u8; 4] = b"WZKB";
const BUNDLE_VERSION: u8 = 1;

/// Public helper data plus the digest of the code it was enrolled with.
///
/// Binary layout (all integers little-endian): magic `WZKB`, u8 version,
/// u8 scheme id, u32 block length, u32 helper bit count, helper bits
/// packed LSB-first within bytes, u32 pad bit count, pad bits, 32-byte
/// code digest.
#[derive(Debug, Clone, PartialEq)]
pub struct HelperBundle {
    pub scheme: SchemeId,
    pub n: u32,
    pub helper: BitVector,
    pub pad: Option<BitVector>,
    pub code_digest: [u8; 32],
}

impl HelperBundle {
    pub fn to_bytes(&self) -> Vec<u8> {
        let helper_bytes = self.helper.to_bytes_lsb();
        let pad_bits = self.pad.as_ref().map_or(0, BitVector::len);
        let pad_bytes = self.pad.as_ref().map(BitVector::to_bytes_lsb).unwrap_or_default();
        let mut out = Vec::with_capacity(14 + helper_bytes.len() + pad_bytes.len() + 36);
        out.extend_from_slice(BUNDLE_MAGIC);
        out.push(BUNDLE_VERSION);
        out.push(self.scheme as u8);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&(self.helper.len() as u32).to_le_bytes());
        out.extend_from_slice(&helper_bytes);
        out.extend_from_slice(&(pad_bits as u32).to_le_bytes());
        out.extend_from_slice(&pad_bytes);
        out.extend_from_slice(&self.code_digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let err = |msg: &str| Error::InvalidShape(format!("helper bundle: {msg}"));
        if bytes.len() < 14 {
            return Err(err("truncated header"));
        }
        if &bytes[0..4] != BUNDLE_MAGIC {
            return Err(err("bad magic"));
        }
        if bytes[4] != BUNDLE_VERSION {
            return Err(err("unsupported version"));
        }
        let scheme = SchemeId::try_from(bytes[5])?;
        let n = u32::from_le_bytes(bytes[6..10].try_into().unwrap());
        let helper_bits = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
        let helper_len = helper_bits.div_ceil(8);
        let mut at = 14;
        if bytes.len() < at + helper_len + 4 {
            return Err(err("truncated helper payload"));
        }
        let helper = BitVector::from_bytes_lsb(&bytes[at..at + helper_len], helper_bits)?;
        at += helper_len;
        let pad_bits = u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
        at += 4;
        let pad_len = pad_bits.div_ceil(8);
        if bytes.len() != at + pad_len + 32 {
            return Err(err("length mismatch"));
        }
        let pad = if pad_bits == 0 {
            None
        } else {
            Some(BitVector::from_bytes_lsb(&bytes[at..at + pad_len], pad_bits)?)
        };
        at += pad_len;
        let mut code_digest = [0u8; 32];
        code_digest.copy_from_slice(&bytes[at..at + 32]);
        Ok(Self {
            scheme,
            n,
            helper,
            pad,
            code_digest,
        })
    }
}

/// Digest binding bundles to the code description they were made with.
pub fn design_code_digest(design: &DesignResult) -> [u8; 32] {
    CodeFile::from_pair(&design.code, design.design_p).digest()
}

/// Frozen values `[V, W]` in ascending frozen-index order.
fn frozen_values(design: &DesignResult, w: &BitVector) -> Result<BitVector> {
    let code = &design.code;
    if w.len() != code.m2() {
        return Err(Error::LengthMismatch(w.len(), code.m2()));
    }
    let v = code.v();
    let inner: std::collections::HashMap<u32, usize> = code
        .frozen_inner()
        .iter()
        .enumerate()
        .map(|(j, &i)| (i, j))
        .collect();
    let helper: std::collections::HashMap<u32, usize> = code
        .helper_indices()
        .iter()
        .enumerate()
        .map(|(j, &i)| (i, j))
        .collect();
    let mut vals = BitVector::zeros(code.frozen().len());
    for (slot, &i) in code.frozen().iter().enumerate() {
        let bit = if let Some(&j) = inner.get(&i) {
            v.get(j)
        } else {
            w.get(helper[&i])
        };
        vals.set(slot, bit);
    }
    Ok(vals)
}

/// Generated-secret enrollment over the nested polar pair: quantize the
/// identifier with the inner code (all-zero `V`), store the bits at the
/// helper positions, keep the bits at the unfrozen positions as the key.
pub fn polar_enroll(x: &BitVector, design: &DesignResult) -> Result<(HelperBundle, BitVector)> {
    let code = &design.code;
    let q_design = BscParam::new(design.eq)?;
    let quantized = quantize(x, code, code.v(), q_design, design.spec.list_size)?;
    let (w, s) = extract_helper_and_key(&quantized.u, code)?;
    Ok((
        HelperBundle {
            scheme: SchemeId::PolarGs,
            n: code.n() as u32,
            helper: w,
            pad: None,
            code_digest: design_code_digest(design),
        },
        s,
    ))
}

/// Reconstruction for the generated-secret polar scheme: list-decode the
/// noisy measurement with frozen values `[V, W]` and return the bits at
/// the unfrozen positions.
pub fn polar_reconstruct(
    y: &BitVector,
    bundle: &HelperBundle,
    design: &DesignResult,
) -> Result<BitVector> {
    if bundle.code_digest != design_code_digest(design) {
        return Err(Error::DigestMismatch);
    }
    if !matches!(bundle.scheme, SchemeId::PolarGs | SchemeId::PolarCs) {
        return Err(Error::InvalidShape("bundle is not a polar scheme".into()));
    }
    let code = &design.code;
    let p_eff = BscParam::new(design.eq * (1.0 - design.spec.p_a.p())
        + (1.0 - design.eq) * design.spec.p_a.p())?;
    let frozen = frozen_values(design, &bundle.helper)?;
    let llr = LlrVector::from_hard_bsc(y, p_eff);
    let out = scl_decode(&llr, code, &frozen, design.spec.list_size)?;
    Ok(out.u_hat.select(code.key_indices()))
}

/// Chosen-secret enrollment: pads the generated key with the chosen one
/// and stores the pad with the helper data.
pub fn polar_enroll_cs(
    x: &BitVector,
    design: &DesignResult,
    s_prime: &BitVector,
) -> Result<HelperBundle> {
    let (mut bundle, s) = polar_enroll(x, design)?;
    if s_prime.len() != s.len() {
        return Err(Error::LengthMismatch(s_prime.len(), s.len()));
    }
    bundle.scheme = SchemeId::PolarCs;
    bundle.pad = Some(xor(&s, s_prime)?);
    Ok(bundle)
}

/// Chosen-secret reconstruction: unpads the generated-key estimate.
pub fn polar_reconstruct_cs(
    y: &BitVector,
    bundle: &HelperBundle,
    design: &DesignResult,
) -> Result<BitVector> {
    let pad = bundle
        .pad
        .as_ref()
        .ok_or_else(|| Error::InvalidShape("chosen-secret bundle lacks a pad".into()))?;
    let s_hat = polar_reconstruct(y, bundle, design)?;
    xor(&s_hat, pad)
}

/// Per-trial outcome of a campaign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub error: bool,
    pub distortion: Option<f64>,
    pub helper_bits: usize,
}

/// A scheme under test.
pub enum Scheme<'a> {
    PolarGs(&'a DesignResult),
    PolarCs(&'a DesignResult),
    LinearGs(&'a NestedLinearCode),
    LinearCs(&'a NestedLinearCode),
    Fcs(&'a dyn BlockCode),
    DitheredFcs { code: &'a dyn BlockCode, q: BscParam },
    Cofe(&'a dyn BlockCode),
}

impl Scheme<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::PolarGs(_) => "polar_gs",
            Scheme::PolarCs(_) => "polar_cs",
            Scheme::LinearGs(_) => "linear_gs",
            Scheme::LinearCs(_) => "linear_cs",
            Scheme::Fcs(_) => "fcs",
            Scheme::DitheredFcs { .. } => "dithered_fcs",
            Scheme::Cofe(_) => "cofe",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Scheme::PolarGs(d) | Scheme::PolarCs(d) => d.code.n(),
            Scheme::LinearGs(c) | Scheme::LinearCs(c) => c.n(),
            Scheme::Fcs(c) | Scheme::Cofe(c) => c.n(),
            Scheme::DitheredFcs { code, .. } => code.n(),
        }
    }

    pub fn key_bits(&self) -> usize {
        match self {
            Scheme::PolarGs(d) | Scheme::PolarCs(d) => d.code.message_len(),
            Scheme::LinearGs(c) | Scheme::LinearCs(c) => c.key_bits(),
            Scheme::Fcs(c) | Scheme::Cofe(c) => c.k(),
            Scheme::DitheredFcs { code, .. } => code.k(),
        }
    }

    pub fn helper_bits(&self) -> usize {
        match self {
            Scheme::PolarGs(d) => d.code.m2(),
            Scheme::PolarCs(d) => d.code.m2() + d.code.message_len(),
            Scheme::LinearGs(c) => c.m2(),
            Scheme::LinearCs(c) => c.m2() + c.key_bits(),
            Scheme::Fcs(c) | Scheme::Cofe(c) => c.n(),
            Scheme::DitheredFcs { code, .. } => code.n(),
        }
    }

    /// Structural (designed) rate tuple: storage from the helper payload,
    /// leakage from the helper content (the pad of a chosen-secret scheme
    /// is independent of the identifier), key from the key length.
    pub fn structural_rates(&self) -> (f64, f64, f64) {
        let n = self.n() as f64;
        let r_s = self.key_bits() as f64 / n;
        match self {
            Scheme::PolarGs(d) => {
                let rw = d.code.m2() as f64 / n;
                (r_s, rw, rw)
            }
            Scheme::PolarCs(d) => {
                let rl = d.code.m2() as f64 / n;
                (r_s, rl, self.helper_bits() as f64 / n)
            }
            Scheme::LinearGs(c) => {
                let rw = c.m2() as f64 / n;
                (r_s, rw, rw)
            }
            Scheme::LinearCs(c) => {
                let rl = c.m2() as f64 / n;
                (r_s, rl, self.helper_bits() as f64 / n)
            }
            // Offset schemes store a full n-bit word and leak H(X) - R_s.
            Scheme::Fcs(_) | Scheme::DitheredFcs { .. } | Scheme::Cofe(_) => {
                (r_s, 1.0 - r_s, 1.0)
            }
        }
    }
}

/// Aggregated campaign result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scheme: String,
    pub n: usize,
    pub trials: u64,
    pub errors: u64,
    pub p_b: f64,
    /// 95% Wilson interval for the block-error probability.
    pub ci95: (f64, f64),
    pub r_s: f64,
    pub r_l: f64,
    pub r_w: f64,
    pub key_bits: usize,
    pub helper_bits: usize,
    pub mean_distortion: Option<f64>,
}

/// Wilson score interval at 95%.
pub fn wilson_ci(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054_f64;
    let n = trials as f64;
    let p = errors as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

const PURPOSE_METRICS: u64 = 11;

fn mseed(master: u64, trial: u64, role: u64) -> SeedSpec {
    SeedSpec::new(master, (PURPOSE_METRICS << 56) ^ (trial << 3) ^ role)
}

/// Runs a seeded enroll-measure-reconstruct campaign and reports the
/// empirical block-error rate together with the structural rates.
pub fn evaluate_metrics(
    scheme: &Scheme<'_>,
    p_a: BscParam,
    trials: u64,
    master_seed: u64,
) -> Result<MetricsReport> {
    let n = scheme.n();
    let outcomes: Vec<(bool, u32)> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(scheme, p_a, master_seed, t))
        .collect::<Result<Vec<_>>>()?;
    let errors = outcomes.iter().filter(|(e, _)| *e).count() as u64;
    let has_distortion = matches!(
        scheme,
        Scheme::PolarGs(_) | Scheme::PolarCs(_) | Scheme::LinearGs(_) | Scheme::LinearCs(_)
    );
    let mean_distortion = if has_distortion && trials > 0 {
        let total: u64 = outcomes.iter().map(|(_, d)| *d as u64).sum();
        Some(total as f64 / (trials as f64 * n as f64))
    } else {
        None
    };
    let (r_s, r_l, r_w) = scheme.structural_rates();
    Ok(MetricsReport {
        scheme: scheme.name().into(),
        n,
        trials,
        errors,
        p_b: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
        ci95: wilson_ci(errors, trials),
        r_s,
        r_l,
        r_w,
        key_bits: scheme.key_bits(),
        helper_bits: scheme.helper_bits(),
        mean_distortion,
    })
}

fn run_trial(scheme: &Scheme<'_>, p_a: BscParam, master: u64, t: u64) -> Result<(bool, u32)> {
    let n = scheme.n();
    let x = BitVector::random(n, &mseed(master, t, 0));
    let y = sample_bsc(&x, p_a, &mseed(master, t, 1));
    match scheme {
        Scheme::PolarGs(design) => {
            let (bundle, s) = polar_enroll(&x, design)?;
            let s_hat = polar_reconstruct(&y, &bundle, design)?;
            let x_q = crate::polar::polar_transform(&crate::polar::assemble_u(
                &design.code,
                design.code.v(),
                &bundle.helper,
                &s,
            )?)?;
            Ok((s_hat != s, x.distance(&x_q) as u32))
        }
        Scheme::PolarCs(design) => {
            let s_prime = BitVector::random(design.code.message_len(), &mseed(master, t, 2));
            let bundle = polar_enroll_cs(&x, design, &s_prime)?;
            let s_prime_hat = polar_reconstruct_cs(&y, &bundle, design)?;
            Ok((s_prime_hat != s_prime, 0))
        }
        Scheme::LinearGs(code) => {
            let (km, trace) = enroll_gs(&x, code)?;
            let s_hat = reconstruct_gs(&y, &km.w, code)?;
            Ok((s_hat != km.s, trace.e_q.weight() as u32))
        }
        Scheme::LinearCs(code) => {
            let (km, trace) = enroll_gs(&x, code)?;
            let s_prime = BitVector::random(code.key_bits(), &mseed(master, t, 2));
            let padded = cs_pad(&km, &s_prime)?;
            let s_hat = reconstruct_gs(&y, &km.w, code)?;
            let s_prime_hat = cs_unpad(&s_hat, padded.pad.as_ref().unwrap())?;
            Ok((s_prime_hat != s_prime, trace.e_q.weight() as u32))
        }
        Scheme::Fcs(code) => {
            let s_prime = BitVector::random(code.k(), &mseed(master, t, 2));
            let w = fcs_enroll(&x, *code, &s_prime)?;
            let s_hat = fcs_reconstruct(&y, &w, *code)?;
            Ok((s_hat != s_prime, 0))
        }
        Scheme::DitheredFcs { code, q } => {
            let s_prime = BitVector::random(code.k(), &mseed(master, t, 2));
            let w = dithered_fcs_enroll(&x, *code, &s_prime, *q, &mseed(master, t, 3))?;
            let s_hat = fcs_reconstruct(&y, &w, *code)?;
            Ok((s_hat != s_prime, 0))
        }
        Scheme::Cofe(code) => {
            let (w, key) = cofe_enroll(&x, *code, &mseed(master, t, 2))?;
            let key_hat = cofe_reconstruct(&y, &w, *code)?;
            Ok((key_hat != key, 0))
        }
    }
}
