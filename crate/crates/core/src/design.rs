//! The nested-code design procedure: fix the outer code, locate the
//! operating crossover by Monte-Carlo, convert it to a distortion target,
//! shrink the inner frozen set to meet that target with minimal helper
//! data, and augment the helper set until a distortion quantile is covered.
//!
//! Every Monte-Carlo stage draws per-trial randomness from streams derived
//! from `(master_seed, purpose, stage, trial)`, so results are independent
//! of scheduling and identical across runs. Distortion estimates reuse the
//! same trial streams for every candidate frozen set, which keeps the
//! bisection along the removal path consistent.

use crate::bounds::RateTuple;
use crate::channel::{sample_bsc, BscParam, SeedSpec};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::polar::{
    assemble_u, construct_reliabilities, polar_transform, quantize, scl_decode, CodeFile,
    LlrVector, PolarCodePair,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const PURPOSE_PC_PILOT: u64 = 1;
const PURPOSE_PC: u64 = 2;
const PURPOSE_DISTORTION: u64 = 3;
const PURPOSE_QUANTILE: u64 = 4;

fn trial_seed(master: u64, purpose: u64, stage: u64, trial: u64, role: u64) -> SeedSpec {
    SeedSpec::new(
        master,
        (purpose << 56) ^ (stage << 40) ^ (trial << 1) ^ role,
    )
}

/// Trial counts and grid resolution for the Monte-Carlo stages.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrialBudget {
    /// Trials per grid point while bracketing the operating crossover.
    pub pc_pilot_trials: u64,
    /// Trials per grid point for the final block-error measurements.
    pub pc_trials_per_point: u64,
    /// Trial ceiling for the deep points below the fit window; the
    /// block-error curve bends downward below ~1e-3, so the extrapolation
    /// anchors on the lowest points the budget can still resolve.
    pub pc_deep_trials: u64,
    /// Crossover grid step.
    pub pc_grid_step: f64,
    /// Inputs per mean-distortion estimate.
    pub distortion_trials: u64,
    /// Inputs per distortion-distribution estimate in the quantile stage.
    pub quantile_trials: u64,
}

impl Default for TrialBudget {
    fn default() -> Self {
        Self {
            pc_pilot_trials: 2_000,
            pc_trials_per_point: 100_000,
            pc_deep_trials: 1_000_000,
            pc_grid_step: 0.005,
            distortion_trials: 10_000,
            quantile_trials: 50_000,
        }
    }
}

/// Which channel's reliability ordering drives the inner-code shrink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerOrdering {
    /// Order the frozen candidates by reliability at the quantizer design
    /// channel BSC(q). Default; reproduces the published distortion curve.
    AtQuantizerChannel,
    /// Order by the outer code's construction channel BSC(q*p_A).
    AtOperatingChannel,
}

/// Inputs of the design procedure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignSpec {
    pub n: usize,
    pub key_bits: usize,
    pub p_a: BscParam,
    pub target_pb: f64,
    pub list_size: usize,
    pub quantile: f64,
    pub budget: TrialBudget,
    pub master_seed: u64,
    pub inner_ordering: InnerOrdering,
}

impl DesignSpec {
    pub fn new(n: usize, key_bits: usize, p_a: BscParam, target_pb: f64) -> Self {
        Self {
            n,
            key_bits,
            p_a,
            target_pb,
            list_size: 8,
            quantile: 0.9999,
            budget: TrialBudget::default(),
            master_seed: 0,
            inner_ordering: InnerOrdering::AtQuantizerChannel,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n == 0 {
            return Err(Error::NotPowerOfTwo(self.n));
        }
        if self.key_bits == 0 || self.key_bits >= self.n {
            return Err(Error::InvalidShape(format!(
                "key_bits {} must lie in 1..{}",
                self.key_bits, self.n
            )));
        }
        if !(0.0..1.0).contains(&self.target_pb) || self.target_pb <= 0.0 {
            return Err(Error::DomainError(format!(
                "target block-error probability {} outside (0, 1)",
                self.target_pb
            )));
        }
        if !(0.5..1.0).contains(&self.quantile) || self.quantile <= 0.5 {
            return Err(Error::DomainError(format!(
                "quantile {} outside (0.5, 1)",
                self.quantile
            )));
        }
        if self.list_size == 0 {
            return Err(Error::DomainError("list size must be at least 1".into()));
        }
        Ok(())
    }
}

/// One measured point of the block-error curve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PcPoint {
    pub p: f64,
    pub trials: u64,
    pub errors: u64,
}

impl PcPoint {
    pub fn rate(&self) -> f64 {
        self.errors as f64 / self.trials as f64
    }
}

/// Least-squares fit of `log10(P_B)` against the crossover, with the
/// crossing point for the target block-error probability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PcFit {
    /// Every measured point, including those outside the fit window.
    pub points: Vec<PcPoint>,
    /// Points actually used by the fit (indices into `points`).
    pub fit_indices: Vec<usize>,
    pub slope: f64,
    pub intercept: f64,
    /// Per-fit-point residuals of log10(P_B).
    pub residuals: Vec<f64>,
    /// Extrapolated crossover at the target block-error probability.
    pub p_c: f64,
}

/// Block-error count of the outer code over a BSC with all-zero frozen
/// values and uniformly random message bits; an error is any mismatch in
/// the reconstructed message bits.
pub fn measure_block_errors(
    code: &PolarCodePair,
    p: BscParam,
    list_size: usize,
    trials: u64,
    master_seed: u64,
    purpose: u64,
    stage: u64,
) -> u64 {
    let frozen = BitVector::zeros(code.m1() + code.m2());
    let v = BitVector::zeros(code.m1());
    let w = BitVector::zeros(code.m2());
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = BitVector::random(
                code.message_len(),
                &trial_seed(master_seed, purpose, stage, t, 0),
            );
            let u = assemble_u(code, &v, &w, &s).expect("dimensions fixed");
            let x = polar_transform(&u).expect("power of two");
            let y = sample_bsc(&x, p, &trial_seed(master_seed, purpose, stage, t, 1));
            let llr = LlrVector::from_hard_bsc(&y, p);
            let out = scl_decode(&llr, code, &frozen, list_size).expect("dimensions fixed");
            u64::from(out.u_hat.select(code.key_indices()) != s)
        })
        .sum()
}

/// Hamming distances `d(x, x_q)` for `trials` uniform inputs, in trial
/// order (deterministic given the seed).
pub fn distortion_samples(
    code: &PolarCodePair,
    q_design: BscParam,
    list_size: usize,
    trials: u64,
    master_seed: u64,
    purpose: u64,
) -> Vec<u32> {
    let v = BitVector::zeros(code.m1());
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let x = BitVector::random(code.n(), &trial_seed(master_seed, purpose, 0, t, 0));
            let out = quantize(&x, code, &v, q_design, list_size).expect("dimensions fixed");
            (out.distortion * code.n() as f64).round() as u32
        })
        .collect()
}

fn mean_distortion(samples: &[u32], n: usize) -> f64 {
    let total: u64 = samples.iter().map(|&d| d as u64).sum();
    total as f64 / (samples.len() as f64 * n as f64)
}

/// Smallest distortion value covering at least `quantile` of the samples.
fn quantile_distortion(samples: &[u32], n: usize, quantile: f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let rank = ((quantile * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1] as f64 / n as f64
}

/// Least-squares fit of `log10(P_B)` vs crossover over the given points;
/// returns `(slope, intercept, crossing at target)`.
pub fn fit_crossing(points: &[(f64, f64)], target_pb: f64) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::NoSolution(
            "need at least two points to fit the block-error curve".into(),
        ));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1.log10()).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1.log10()).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Err(Error::NoSolution("degenerate crossover grid".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    if slope <= 0.0 {
        return Err(Error::NoSolution(
            "block-error curve is not increasing over the measured window".into(),
        ));
    }
    Ok((slope, intercept, (target_pb.log10() - intercept) / slope))
}

/// Sweeps a crossover grid, measures block-error rates, fits the
/// log-linear curve in the `P_B ∈ [1e-4, 1e-2]` window, and extrapolates
/// the crossover at which the fit reaches `target_pb`.
pub fn find_pc(
    code: &PolarCodePair,
    target_pb: f64,
    list_size: usize,
    budget: &TrialBudget,
    master_seed: u64,
) -> Result<(BscParam, PcFit)> {
    let step = budget.pc_grid_step;
    let max_idx = ((0.495 / step).floor() as u64).max(2);
    let pilot = |idx: u64| -> f64 {
        let p = BscParam::new(idx as f64 * step).expect("grid stays in range");
        let errs = measure_block_errors(
            code,
            p,
            list_size,
            budget.pc_pilot_trials,
            master_seed,
            PURPOSE_PC_PILOT,
            idx,
        );
        errs as f64 / budget.pc_pilot_trials as f64
    };
    // Bracket the window: find the smallest grid index with pilot P_B
    // noticeably above the window center.
    let (mut lo, mut hi) = (1u64, max_idx);
    if pilot(hi) < 1e-3 {
        return Err(Error::NoSolution(
            "block-error rate stays below the fit window on the whole grid".into(),
        ));
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pilot(mid) >= 1e-3 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    // Full-budget measurements walking the grid across the window.
    let mut measured: Vec<PcPoint> = Vec::new();
    let measure = |idx: u64, trials: u64, measured: &mut Vec<PcPoint>| -> f64 {
        let p = idx as f64 * step;
        let errors = measure_block_errors(
            code,
            BscParam::new(p).expect("grid stays in range"),
            list_size,
            trials,
            master_seed,
            PURPOSE_PC,
            idx,
        );
        measured.push(PcPoint { p, trials, errors });
        errors as f64 / trials as f64
    };
    let anchor = lo;
    let mut rate = measure(anchor, budget.pc_trials_per_point, &mut measured);
    // Walk down until below the window floor (or zero errors), up until
    // above the ceiling, collecting everything in between.
    let mut idx_down = anchor;
    let mut r = rate;
    while idx_down > 1 && r > 1e-4 {
        idx_down -= 1;
        r = measure(idx_down, budget.pc_trials_per_point, &mut measured);
    }
    let mut idx_up = anchor;
    while idx_up < max_idx && rate < 1e-2 {
        idx_up += 1;
        rate = measure(idx_up, budget.pc_trials_per_point, &mut measured);
    }
    // The curve steepens below the window, so a fit anchored inside it
    // overshoots the extrapolation. Extend downward with escalating trial
    // counts while points still resolve and the target lies below the
    // lowest measurement.
    let mut deep_trials = budget
        .pc_trials_per_point
        .saturating_mul(4)
        .min(budget.pc_deep_trials.max(budget.pc_trials_per_point));
    while idx_down > 1
        && r > target_pb
        && deep_trials > budget.pc_trials_per_point
        && measured.last().map(|pt| pt.errors >= 8).unwrap_or(false)
    {
        idx_down -= 1;
        r = measure(idx_down, deep_trials, &mut measured);
        if deep_trials == budget.pc_deep_trials {
            break;
        }
        deep_trials = deep_trials.saturating_mul(4).min(budget.pc_deep_trials);
    }
    measured.sort_by(|a, b| a.p.partial_cmp(&b.p).expect("grid points are finite"));

    // Fit over the lowest well-resolved points: on a convex curve the
    // local slope adjacent to the target extrapolates best.
    let mut fit_indices: Vec<usize> = Vec::new();
    for floor in [8u64, 3, 1] {
        let mut candidates: Vec<usize> = (0..measured.len())
            .filter(|&i| measured[i].errors >= floor)
            .collect();
        candidates.sort_by(|&a, &b| {
            measured[a]
                .rate()
                .partial_cmp(&measured[b].rate())
                .expect("rates are finite")
                .then(a.cmp(&b))
        });
        candidates.truncate(3);
        if candidates.len() >= 3 || (floor == 1 && candidates.len() >= 2) {
            fit_indices = candidates;
            break;
        }
    }
    fit_indices.sort_unstable();
    let pts: Vec<(f64, f64)> = fit_indices
        .iter()
        .map(|&i| (measured[i].p, measured[i].rate()))
        .collect();
    let (slope, intercept, p_c) = fit_crossing(&pts, target_pb)?;
    let residuals: Vec<f64> = pts
        .iter()
        .map(|(p, r)| r.log10() - (intercept + slope * p))
        .collect();
    let p_c_param = BscParam::new(p_c.clamp(0.0, 0.5)).expect("clamped crossover is in range");
    Ok((
        p_c_param,
        PcFit {
            points: measured,
            fit_indices,
            slope,
            intercept,
            residuals,
            p_c,
        },
    ))
}

/// Inverts `p_c = q * p_A`: the distortion a quantizer must introduce so
/// that the cascade of quantization noise and measurement noise has the
/// operating crossover.
pub fn pc_to_distortion(p_c: BscParam, p_a: BscParam) -> Result<f64> {
    if p_a.p() >= 0.5 {
        return Err(Error::DomainError("p_A must be below 0.5".into()));
    }
    if p_c.p() < p_a.p() {
        return Err(Error::Infeasible(format!(
            "operating crossover {} is below the measurement crossover {}; \
             no nonnegative distortion reaches it",
            p_c.p(),
            p_a.p()
        )));
    }
    Ok((p_c.p() - p_a.p()) / (1.0 - 2.0 * p_a.p()))
}

/// Frozen indices eligible for removal from `F1`, most reliable first
/// under the chosen ordering.
fn removal_sequence(
    code: &PolarCodePair,
    ordering: InnerOrdering,
    q_design: BscParam,
    design_p: BscParam,
) -> Result<Vec<u32>> {
    let order = match ordering {
        InnerOrdering::AtQuantizerChannel => construct_reliabilities(code.n(), q_design)?,
        InnerOrdering::AtOperatingChannel => construct_reliabilities(code.n(), design_p)?,
    };
    let frozen: std::collections::HashSet<u32> = code.frozen().iter().copied().collect();
    Ok(order
        .into_iter()
        .rev() // most reliable first
        .filter(|i| frozen.contains(i))
        .collect())
}

fn pair_after_removals(
    code: &PolarCodePair,
    removal: &[u32],
    removed: usize,
) -> Result<PolarCodePair> {
    let removed_set: std::collections::HashSet<u32> = removal[..removed].iter().copied().collect();
    let f1: Vec<u32> = code
        .frozen()
        .iter()
        .copied()
        .filter(|i| !removed_set.contains(i))
        .collect();
    code.with_inner(f1)
}

/// Starting from `F1 = F`, removes frozen indices (most reliable first
/// under the shrink ordering) until the Monte-Carlo mean distortion of the
/// quantizer meets `target_eq`, keeping `F1` as large as possible. The
/// stopping index is found by bisection along the removal path; distortion
/// estimates share trial streams so the path stays consistent.
pub fn shrink_f1(
    code: &PolarCodePair,
    target_eq: f64,
    list_size: usize,
    ordering: InnerOrdering,
    design_p: BscParam,
    budget: &TrialBudget,
    master_seed: u64,
) -> Result<(PolarCodePair, f64)> {
    if !(0.0..0.5).contains(&target_eq) || target_eq <= 0.0 {
        return Err(Error::DomainError(format!(
            "target distortion {target_eq} outside (0, 0.5)"
        )));
    }
    let q_design = BscParam::new(target_eq)?;
    let removal = removal_sequence(code, ordering, q_design, design_p)?;
    let mut evals: Vec<(usize, f64)> = Vec::new();
    let measure = |removed: usize, evals: &mut Vec<(usize, f64)>| -> Result<f64> {
        let pair = pair_after_removals(code, &removal, removed)?;
        let samples = distortion_samples(
            &pair,
            q_design,
            list_size,
            budget.distortion_trials,
            master_seed,
            PURPOSE_DISTORTION,
        );
        let d = mean_distortion(&samples, code.n());
        evals.push((removed, d));
        Ok(d)
    };
    if measure(0, &mut evals)? <= target_eq {
        let pair = pair_after_removals(code, &removal, 0)?;
        return Ok((pair, evals[0].1));
    }
    // Exponential bracket, then bisect for the minimal removal count.
    let mut hi = 1usize;
    loop {
        if hi >= removal.len() {
            hi = removal.len();
            let d = measure(hi, &mut evals)?;
            if d > target_eq {
                return Err(Error::Unreachable(format!(
                    "distortion {d} above target {target_eq} even with an empty F1"
                )));
            }
            break;
        }
        if measure(hi, &mut evals)? <= target_eq {
            break;
        }
        hi *= 2;
    }
    let mut lo = hi / 2; // last candidate known to miss the target
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if measure(mid, &mut evals)? <= target_eq {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let final_d = evals
        .iter()
        .rev()
        .find(|(k, _)| *k == hi)
        .map(|(_, d)| *d)
        .expect("hi was measured");
    Ok((pair_after_removals(code, &removal, hi)?, final_d))
}

/// Moves further indices from `F1` into the helper set until the
/// `quantile`-quantile of the per-realization distortion meets the target
/// distortion (equivalently: maps through `q * p_A` to a crossover within
/// the code's operating point). Returns the augmented pair, the number of
/// helper bits added, and the final quantile distortion.
pub fn quantile_augment(
    code: &PolarCodePair,
    quantile: f64,
    target_eq: f64,
    list_size: usize,
    ordering: InnerOrdering,
    design_p: BscParam,
    budget: &TrialBudget,
    master_seed: u64,
) -> Result<(PolarCodePair, usize, f64)> {
    if !(0.5..1.0).contains(&quantile) || quantile <= 0.5 {
        return Err(Error::DomainError(format!(
            "quantile {quantile} outside (0.5, 1)"
        )));
    }
    let q_design = BscParam::new(target_eq)?;
    let removal = removal_sequence(code, ordering, q_design, design_p)?;
    // `code` already has some indices removed from F1; the augmentation
    // continues along the same sequence.
    let inner: std::collections::HashSet<u32> = code.frozen_inner().iter().copied().collect();
    let already = removal.iter().take_while(|i| !inner.contains(i)).count();
    let room = removal.len() - already;

    let mut evals: Vec<(usize, f64)> = Vec::new();
    let measure = |extra: usize, evals: &mut Vec<(usize, f64)>| -> Result<f64> {
        let pair = pair_after_removals(code, &removal, already + extra)?;
        let samples = distortion_samples(
            &pair,
            q_design,
            list_size,
            budget.quantile_trials,
            master_seed,
            PURPOSE_QUANTILE,
        );
        let d = quantile_distortion(&samples, code.n(), quantile);
        evals.push((extra, d));
        Ok(d)
    };
    if measure(0, &mut evals)? <= target_eq {
        return Ok((code.clone(), 0, evals[0].1));
    }
    let mut hi = 1usize;
    loop {
        if hi >= room {
            hi = room;
            let d = measure(hi, &mut evals)?;
            if d > target_eq {
                return Err(Error::Unreachable(format!(
                    "quantile distortion {d} above target {target_eq} with an empty F1"
                )));
            }
            break;
        }
        if measure(hi, &mut evals)? <= target_eq {
            break;
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if measure(mid, &mut evals)? <= target_eq {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let final_d = evals
        .iter()
        .rev()
        .find(|(k, _)| *k == hi)
        .map(|(_, d)| *d)
        .expect("hi was measured");
    Ok((
        pair_after_removals(code, &removal, already + hi)?,
        hi,
        final_d,
    ))
}

/// Output of the full design procedure.
#[derive(Debug, Clone)]
pub struct DesignResult {
    pub spec: DesignSpec,
    /// Final nested pair, helper set already augmented.
    pub code: PolarCodePair,
    /// Crossover the reliability ordering was constructed at.
    pub design_p: f64,
    /// Measured operating crossover for the target block-error probability.
    pub p_c: BscParam,
    /// Target mean distortion `(p_c - p_A) / (1 - 2 p_A)`.
    pub eq: f64,
    /// Measured mean distortion of the final quantizer.
    pub eq_measured: f64,
    /// Helper bits before augmentation.
    pub m2: usize,
    /// Helper bits after quantile augmentation.
    pub m2_aug: usize,
    pub added_helper: usize,
    /// Measured distortion quantile after augmentation.
    pub quantile_distortion: f64,
    pub rate: RateTuple,
    pub fit: PcFit,
}

/// Runs the three-step procedure plus quantile augmentation.
///
/// The reliability ordering is constructed at the operating crossover: a
/// pilot pass measures it on a code built at `p_A`, the ordering is rebuilt
/// at that estimate, and the final crossover is measured on the rebuilt
/// code at full budget.
pub fn design_nested(spec: &DesignSpec) -> Result<DesignResult> {
    spec.validate()?;
    let pilot_budget = TrialBudget {
        pc_trials_per_point: (spec.budget.pc_trials_per_point / 10)
            .max(spec.budget.pc_pilot_trials),
        ..spec.budget
    };
    // Stage 1: ordering at p_A, pilot crossover estimate.
    let ord0 = construct_reliabilities(spec.n, spec.p_a)?;
    let code0 = PolarCodePair::from_ordering(spec.n, ord0, spec.key_bits)?;
    let (pc0, _) = find_pc(
        &code0,
        spec.target_pb,
        spec.list_size,
        &pilot_budget,
        spec.master_seed ^ 0x70696c6f74,
    )?;
    if pc0.p() <= spec.p_a.p() {
        return Err(Error::Infeasible(format!(
            "pilot operating crossover {:.4} does not exceed p_A = {}; the \
             code cannot absorb any quantization distortion at this block \
             length",
            pc0.p(),
            spec.p_a.p()
        )));
    }
    // Stage 2: rebuild the ordering at the pilot estimate, measure at full
    // budget.
    let ord1 = construct_reliabilities(spec.n, pc0)?;
    let code1 = PolarCodePair::from_ordering(spec.n, ord1, spec.key_bits)?;
    let (p_c, fit) = find_pc(
        &code1,
        spec.target_pb,
        spec.list_size,
        &spec.budget,
        spec.master_seed,
    )?;
    let eq = pc_to_distortion(p_c, spec.p_a)?;
    if eq == 0.0 {
        return Err(Error::Infeasible(
            "operating crossover equals p_A exactly; zero distortion budget".into(),
        ));
    }
    // Stage 3: shrink F1 to the mean-distortion target.
    let (pair, eq_measured) = shrink_f1(
        &code1,
        eq,
        spec.list_size,
        spec.inner_ordering,
        pc0,
        &spec.budget,
        spec.master_seed,
    )?;
    let m2 = pair.m2();
    let (pair_aug, added, quantile_d) = quantile_augment(
        &pair,
        spec.quantile,
        eq,
        spec.list_size,
        spec.inner_ordering,
        pc0,
        &spec.budget,
        spec.master_seed,
    )?;
    let m2_aug = pair_aug.m2();
    let rate = RateTuple {
        r_s: spec.key_bits as f64 / spec.n as f64,
        r_l: m2_aug as f64 / spec.n as f64,
        r_w: m2_aug as f64 / spec.n as f64,
    };
    Ok(DesignResult {
        spec: spec.clone(),
        code: pair_aug,
        design_p: pc0.p(),
        p_c,
        eq,
        eq_measured,
        m2,
        m2_aug,
        added_helper: added,
        quantile_distortion: quantile_d,
        rate,
        fit,
    })
}

/// Serialized form of a [`DesignResult`]: embeds the code description file
/// plus the design outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignFile {
    pub version: u32,
    pub spec: DesignSpec,
    pub code: CodeFile,
    /// SHA-256 of the code file's canonical bytes, hex.
    pub code_digest: String,
    pub p_c: f64,
    pub eq: f64,
    pub eq_measured: f64,
    pub m2: usize,
    pub m2_aug: usize,
    pub added_helper: usize,
    pub quantile_distortion: f64,
    pub rate_tuple: RateTuple,
    pub fit_points: Vec<PcPoint>,
    pub fit_slope: f64,
    pub fit_intercept: f64,
}

impl DesignFile {
    pub fn from_result(result: &DesignResult) -> Self {
        let code = CodeFile::from_pair(&result.code, result.design_p);
        let code_digest = hex::encode(code.digest());
        Self {
            version: 1,
            spec: result.spec.clone(),
            code,
            code_digest,
            p_c: result.p_c.p(),
            eq: result.eq,
            eq_measured: result.eq_measured,
            m2: result.m2,
            m2_aug: result.m2_aug,
            added_helper: result.added_helper,
            quantile_distortion: result.quantile_distortion,
            rate_tuple: result.rate,
            fit_points: result.fit.points.clone(),
            fit_slope: result.fit.slope,
            fit_intercept: result.fit.intercept,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pa(p: f64) -> BscParam {
        BscParam::new(p).unwrap()
    }

    #[test]
    fn pc_to_distortion_anchors() {
        assert_eq!(pc_to_distortion(pa(0.15), pa(0.15)).unwrap(), 0.0);
        // Operating points star(0.0456, 0.15) = 0.18192 and
        // star(0.1689, 0.15) = 0.26823 invert to the design distortions.
        let q = pc_to_distortion(pa(0.18192), pa(0.15)).unwrap();
        assert!((q - 0.0456).abs() < 1e-12);
        let q = pc_to_distortion(pa(0.26823), pa(0.15)).unwrap();
        assert!((q - 0.1689).abs() < 1e-12);
        assert!(matches!(
            pc_to_distortion(pa(0.10), pa(0.15)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn fit_crossing_recovers_exact_log_linear_data() {
        // Synthetic exactly log-linear curve: log10(pb) = -8 + 30 p.
        let pts: Vec<(f64, f64)> = [0.18, 0.19, 0.20, 0.21]
            .iter()
            .map(|&p| (p, 10f64.powf(-8.0 + 30.0 * p)))
            .collect();
        let (slope, intercept, p_c) = fit_crossing(&pts, 1e-6).unwrap();
        assert!((slope - 30.0).abs() < 1e-9);
        assert!((intercept + 8.0).abs() < 1e-9);
        assert!((p_c - (2.0 / 30.0)).abs() < 1e-9);
        // A grid point whose measured rate equals the target exactly is
        // returned as the crossover.
        let pts: Vec<(f64, f64)> = vec![(0.10, 1e-2), (0.08, 1e-4)];
        let (_, _, p_c) = fit_crossing(&pts, 1e-2).unwrap();
        assert!((p_c - 0.10).abs() < 1e-12);
    }

    #[test]
    fn fit_crossing_rejects_flat_or_decreasing() {
        let pts = vec![(0.1, 1e-3), (0.2, 1e-3)];
        assert!(fit_crossing(&pts, 1e-6).is_err());
        let pts = vec![(0.1, 1e-2), (0.2, 1e-4)];
        assert!(fit_crossing(&pts, 1e-6).is_err());
    }

    #[test]
    fn quantile_of_samples() {
        let samples: Vec<u32> = (1..=100).collect();
        assert_eq!(quantile_distortion(&samples, 100, 0.90), 0.90);
        assert_eq!(quantile_distortion(&samples, 100, 0.999), 1.00);
    }

    fn small_spec() -> DesignSpec {
        let mut spec = DesignSpec::new(64, 8, pa(0.05), 1e-2);
        spec.budget = TrialBudget {
            pc_pilot_trials: 400,
            pc_trials_per_point: 3_000,
            pc_deep_trials: 3_000,
            pc_grid_step: 0.01,
            distortion_trials: 800,
            quantile_trials: 2_000,
        };
        spec.quantile = 0.99;
        spec.master_seed = 9;
        spec
    }

    #[test]
    fn small_design_runs_and_is_deterministic() {
        let spec = small_spec();
        let a = design_nested(&spec).unwrap();
        let b = design_nested(&spec).unwrap();
        assert_eq!(a.code, b.code);
        assert_eq!(a.p_c.p(), b.p_c.p());
        assert_eq!(a.m2, b.m2);
        assert_eq!(a.m2_aug, b.m2_aug);
        assert!(a.p_c.p() > 0.05);
        assert!(a.eq > 0.0);
        assert!(a.m2_aug >= a.m2);
        assert_eq!(a.rate.r_s, 8.0 / 64.0);
        assert_eq!(a.rate.r_w, a.m2_aug as f64 / 64.0);
        // Serialization round trip.
        let file = DesignFile::from_result(&a);
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back: DesignFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.code.to_pair().unwrap(), a.code);
        assert_eq!(back.m2_aug, a.m2_aug);
    }

    #[test]
    fn infeasible_when_rate_exceeds_channel() {
        // Rate 1/2 at p_A = 0.2 is beyond the channel: the crossover for
        // any block-error target sits below p_A.
        let mut spec = DesignSpec::new(64, 32, pa(0.2), 1e-2);
        spec.budget = TrialBudget {
            pc_pilot_trials: 300,
            pc_trials_per_point: 1_000,
            pc_deep_trials: 1_000,
            pc_grid_step: 0.01,
            distortion_trials: 500,
            quantile_trials: 1_000,
        };
        assert!(matches!(design_nested(&spec), Err(Error::Infeasible(_))));
    }

    #[test]
    fn shrink_with_loose_target_keeps_f1_equal_to_f() {
        let order = construct_reliabilities(64, pa(0.1)).unwrap();
        let code = PolarCodePair::from_ordering(64, order, 8).unwrap();
        let budget = TrialBudget {
            distortion_trials: 300,
            ..TrialBudget::default()
        };
        let (pair, d) = shrink_f1(
            &code,
            0.499,
            4,
            InnerOrdering::AtQuantizerChannel,
            pa(0.1),
            &budget,
            5,
        )
        .unwrap();
        assert_eq!(pair.frozen_inner(), pair.frozen());
        assert_eq!(pair.m2(), 0);
        assert!(d <= 0.52);
    }

    #[test]
    fn quantile_augment_trivial_when_target_loose() {
        let order = construct_reliabilities(64, pa(0.1)).unwrap();
        let code = PolarCodePair::from_ordering(64, order, 8).unwrap();
        let budget = TrialBudget {
            quantile_trials: 500,
            ..TrialBudget::default()
        };
        // A fully frozen quantizer concentrates around distortion 1/2; with
        // a quantile target above that whole range nothing is added.
        let (pair, added, qd) = quantile_augment(
            &code,
            0.99,
            0.499,
            4,
            InnerOrdering::AtQuantizerChannel,
            pa(0.1),
            &budget,
            5,
        )
        .unwrap_or_else(|_| panic!("augmentation must succeed"));
        assert_eq!(pair.m2(), added);
        assert!(qd <= 0.60);
    }

    #[test]
    fn distortion_monotone_in_unfrozen_count() {
        // Monotonicity of the distortion curve along the removal path.
        let order = construct_reliabilities(256, pa(0.1)).unwrap();
        let code = PolarCodePair::from_ordering(256, order, 32).unwrap();
        let q = BscParam::new(0.11).unwrap();
        let removal =
            removal_sequence(&code, InnerOrdering::AtQuantizerChannel, q, pa(0.1)).unwrap();
        let mut last = f64::INFINITY;
        for removed in [0usize, 40, 80, 120, 160, 200] {
            let pair = pair_after_removals(&code, &removal, removed).unwrap();
            let samples = distortion_samples(&pair, q, 8, 10_000, 123, PURPOSE_DISTORTION);
            let d = mean_distortion(&samples, 256);
            assert!(
                d <= last + 0.01,
                "distortion rose from {last:.4} to {d:.4} at {removed} removals"
            );
            last = d;
        }
    }
}
