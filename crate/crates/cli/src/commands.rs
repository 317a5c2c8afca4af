//! Subcommand implementations. Output artifacts embed the tool version,
//! the effective configuration, and the master seed; re-running a command
//! with the same inputs writes byte-identical files.

use crate::bitfile;
use clap::Args;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;
use wzkey_core::bounds::{
    cs_bin_boundary, figure5_table, gs_bin_boundary, hidden_bin_boundary, rcu_bound_bsc,
    sphere_packing_ratio, SecretModel,
};
use wzkey_core::channel::SeedSpec;
use wzkey_core::design::{
    design_nested, distortion_samples, measure_block_errors, DesignFile, DesignResult, DesignSpec,
    InnerOrdering, TrialBudget,
};
use wzkey_core::keyagree::{
    polar_enroll, polar_enroll_cs, polar_reconstruct, polar_reconstruct_cs, wilson_ci,
    HelperBundle,
};
use wzkey_core::linear::{audit_leakage, AuditMode, NestedLinearCode};
use wzkey_core::polar::CodeFile;
use wzkey_core::{BitVector, BscParam, Error, Result};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `WZKEY_SEED` overrides the configured master seed.
fn effective_seed(flag: u64) -> u64 {
    match std::env::var("WZKEY_SEED") {
        Ok(v) => v.parse().unwrap_or(flag),
        Err(_) => flag,
    }
}

fn set_workers(workers: Option<usize>) {
    if let Some(w) = workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
}

/// Leading comment lines embedding the run configuration into a CSV.
fn csv_preamble(command: &str, config: &[(&str, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# tool=wzkey {TOOL_VERSION}");
    let _ = writeln!(out, "# command={command}");
    for (k, v) in config {
        let _ = writeln!(out, "# {k}={v}");
    }
    out
}

#[derive(Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub key_bits: usize,
    /// Measurement channel crossover probability.
    #[arg(long)]
    pub pa: f64,
    /// Target block-error probability.
    #[arg(long)]
    pub pb: f64,
    #[arg(long, default_value_t = 8)]
    pub list_size: usize,
    #[arg(long, default_value_t = 0.9999)]
    pub quantile: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for code.json and design.json.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 2_000)]
    pub pc_pilot_trials: u64,
    #[arg(long, default_value_t = 100_000)]
    pub pc_trials: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub pc_deep_trials: u64,
    #[arg(long, default_value_t = 0.005)]
    pub pc_grid_step: f64,
    #[arg(long, default_value_t = 10_000)]
    pub distortion_trials: u64,
    #[arg(long, default_value_t = 50_000)]
    pub quantile_trials: u64,
    /// Reliability channel for the inner-code shrink: "q" or "operating".
    #[arg(long, default_value = "q")]
    pub inner_ordering: String,
    #[arg(long)]
    pub workers: Option<usize>,
}

pub fn design(args: DesignArgs) -> Result<()> {
    set_workers(args.workers);
    let spec = DesignSpec {
        n: args.n,
        key_bits: args.key_bits,
        p_a: BscParam::new(args.pa)?,
        target_pb: args.pb,
        list_size: args.list_size,
        quantile: args.quantile,
        budget: TrialBudget {
            pc_pilot_trials: args.pc_pilot_trials,
            pc_trials_per_point: args.pc_trials,
            pc_deep_trials: args.pc_deep_trials,
            pc_grid_step: args.pc_grid_step,
            distortion_trials: args.distortion_trials,
            quantile_trials: args.quantile_trials,
        },
        master_seed: effective_seed(args.seed),
        inner_ordering: match args.inner_ordering.as_str() {
            "q" => InnerOrdering::AtQuantizerChannel,
            "operating" => InnerOrdering::AtOperatingChannel,
            other => {
                return Err(Error::DomainError(format!(
                    "inner ordering must be 'q' or 'operating', got {other:?}"
                )))
            }
        },
    };
    let result = design_nested(&spec)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let code_file = CodeFile::from_pair(&result.code, result.design_p);
    std::fs::write(args.out_dir.join("code.json"), code_file.canonical_bytes())?;
    let design_file = DesignFile::from_result(&result);
    let mut design_json = serde_json::to_vec_pretty(&serde_json::json!({
        "tool_version": TOOL_VERSION,
        "design": design_file,
    }))?;
    design_json.push(b'\n');
    std::fs::write(args.out_dir.join("design.json"), design_json)?;
    println!(
        "designed n={} key_bits={}: p_c={:.4} E[q]={:.4} m2={} m2_aug={} (+{}) rates=({:.3}, {:.3}, {:.3})",
        spec.n,
        spec.key_bits,
        result.p_c.p(),
        result.eq,
        result.m2,
        result.m2_aug,
        result.added_helper,
        result.rate.r_s,
        result.rate.r_l,
        result.rate.r_w
    );
    println!("wrote {}", args.out_dir.join("code.json").display());
    println!("wrote {}", args.out_dir.join("design.json").display());
    Ok(())
}

fn load_design(path: &PathBuf) -> Result<(DesignResult, DesignFile)> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let design_value = value.get("design").cloned().unwrap_or(value);
    let file: DesignFile = serde_json::from_value(design_value)?;
    let code = file.code.to_pair()?;
    let fit = wzkey_core::design::PcFit {
        points: file.fit_points.clone(),
        fit_indices: Vec::new(),
        slope: file.fit_slope,
        intercept: file.fit_intercept,
        residuals: Vec::new(),
        p_c: file.p_c,
    };
    let result = DesignResult {
        spec: file.spec.clone(),
        code,
        design_p: file.code.design_p,
        p_c: BscParam::new(file.p_c)?,
        eq: file.eq,
        eq_measured: file.eq_measured,
        m2: file.m2,
        m2_aug: file.m2_aug,
        added_helper: file.added_helper,
        quantile_distortion: file.quantile_distortion,
        rate: file.rate_tuple,
        fit,
    };
    Ok((result, file))
}

#[derive(Args)]
pub struct SimulateArgs {
    /// "fig3" sweeps the block-error curve over crossovers; "fig4" sweeps
    /// mean distortion over the unfrozen count of the quantizer.
    #[arg(long)]
    pub mode: String,
    #[arg(long)]
    pub design: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated crossovers (fig3); defaults to the design's fit grid.
    #[arg(long)]
    pub grid: Option<String>,
    /// Comma-separated n-m1 values (fig4).
    #[arg(long)]
    pub nm1: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    set_workers(args.workers);
    let (design, _) = load_design(&args.design)?;
    let seed = effective_seed(args.seed);
    let code = &design.code;
    let mut csv = csv_preamble(
        "simulate",
        &[
            ("mode", args.mode.clone()),
            ("design", args.design.display().to_string()),
            ("n", code.n().to_string()),
            ("trials", args.trials.to_string()),
            ("master_seed", seed.to_string()),
        ],
    );
    match args.mode.as_str() {
        "fig3" => {
            let grid: Vec<f64> = match &args.grid {
                Some(list) => parse_f64_list(list)?,
                None => design.fit.points.iter().map(|pt| pt.p).collect(),
            };
            csv.push_str("grid_value,trials,errors,rate,ci95_lo,ci95_hi\n");
            for p in grid {
                let (errors, rate, ci) = if args.trials == 0 {
                    continue;
                } else {
                    let errors = measure_block_errors(
                        code,
                        BscParam::new(p)?,
                        design.spec.list_size,
                        args.trials,
                        seed,
                        21,
                        (p * 1e6) as u64,
                    );
                    let rate = errors as f64 / args.trials as f64;
                    (errors, rate, wilson_ci(errors, args.trials))
                };
                let _ = writeln!(
                    csv,
                    "{p:.6},{},{errors},{rate:.6},{:.6},{:.6}",
                    args.trials, ci.0, ci.1
                );
            }
        }
        "fig4" => {
            let nm1_list: Vec<usize> = match &args.nm1 {
                Some(list) => parse_f64_list(list)?
                    .into_iter()
                    .map(|v| v as usize)
                    .collect(),
                None => vec![code.n() - code.m1()],
            };
            csv.push_str("grid_value,trials,errors,mean_distortion,ci95_lo,ci95_hi\n");
            let q = BscParam::new(design.eq)?;
            // Removal path: most reliable frozen indices first, at the
            // quantizer channel.
            let order = wzkey_core::polar::construct_reliabilities(code.n(), q)?;
            let frozen: std::collections::HashSet<u32> =
                code.frozen().iter().copied().collect();
            let removal: Vec<u32> = order
                .into_iter()
                .rev()
                .filter(|i| frozen.contains(i))
                .collect();
            for nm1 in nm1_list {
                if args.trials == 0 {
                    continue;
                }
                let f1_size = code
                    .n()
                    .checked_sub(nm1)
                    .ok_or_else(|| Error::InvalidShape(format!("n-m1 {nm1} exceeds n")))?;
                let removed = code.frozen().len().saturating_sub(f1_size);
                let removed_set: std::collections::HashSet<u32> =
                    removal[..removed.min(removal.len())].iter().copied().collect();
                let f1: Vec<u32> = code
                    .frozen()
                    .iter()
                    .copied()
                    .filter(|i| !removed_set.contains(i))
                    .collect();
                let pair = code.with_inner(f1)?;
                let samples = distortion_samples(
                    &pair,
                    q,
                    design.spec.list_size,
                    args.trials,
                    seed,
                    22,
                );
                let total: u64 = samples.iter().map(|&d| d as u64).sum();
                let mean = total as f64 / (args.trials as f64 * code.n() as f64);
                // 95% normal interval on the mean distortion
                let var: f64 = samples
                    .iter()
                    .map(|&d| {
                        let x = d as f64 / code.n() as f64 - mean;
                        x * x
                    })
                    .sum::<f64>()
                    / (args.trials.max(2) - 1) as f64;
                let half = 1.96 * (var / args.trials as f64).sqrt();
                let _ = writeln!(
                    csv,
                    "{nm1},{},0,{mean:.6},{:.6},{:.6}",
                    args.trials,
                    mean - half,
                    mean + half
                );
            }
        }
        other => {
            return Err(Error::DomainError(format!(
                "mode must be fig3 or fig4, got {other:?}"
            )))
        }
    }
    std::fs::write(&args.out, csv)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn parse_f64_list(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::DomainError(format!("bad number {s:?}: {e}")))
        })
        .collect()
}

#[derive(Args)]
pub struct EnrollArgs {
    #[arg(long)]
    pub design: PathBuf,
    /// Identifier bit file of length n.
    #[arg(long)]
    pub input: PathBuf,
    /// Output helper bundle path.
    #[arg(long)]
    pub bundle: PathBuf,
    /// Write the key (hex) here as well as printing it.
    #[arg(long)]
    pub key_out: Option<PathBuf>,
    /// Chosen-secret mode: embed this key bit file via a one-time pad.
    #[arg(long)]
    pub key_in: Option<PathBuf>,
}

pub fn enroll(args: EnrollArgs) -> Result<()> {
    let (design, _) = load_design(&args.design)?;
    let x = bitfile::read_bits(&args.input)?;
    if x.len() != design.code.n() {
        return Err(Error::LengthMismatch(x.len(), design.code.n()));
    }
    let (bundle, key) = match &args.key_in {
        None => polar_enroll(&x, &design)?,
        Some(path) => {
            let s_prime = bitfile::read_bits(path)?;
            let bundle = polar_enroll_cs(&x, &design, &s_prime)?;
            (bundle, s_prime)
        }
    };
    std::fs::write(&args.bundle, bundle.to_bytes())?;
    let key_hex = key.to_hex();
    println!("key {key_hex}");
    println!("wrote {}", args.bundle.display());
    if let Some(path) = args.key_out {
        std::fs::write(&path, format!("{key_hex}\n"))?;
    }
    Ok(())
}

#[derive(Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub design: PathBuf,
    #[arg(long)]
    pub bundle: PathBuf,
    /// Noisy measurement bit file of length n.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub key_out: Option<PathBuf>,
}

pub fn reconstruct(args: ReconstructArgs) -> Result<()> {
    let (design, _) = load_design(&args.design)?;
    let y = bitfile::read_bits(&args.input)?;
    let bundle = HelperBundle::from_bytes(&std::fs::read(&args.bundle)?)?;
    let key = if bundle.pad.is_some() {
        polar_reconstruct_cs(&y, &bundle, &design)?
    } else {
        polar_reconstruct(&y, &bundle, &design)?
    };
    let key_hex = key.to_hex();
    println!("key {key_hex}");
    if let Some(path) = args.key_out {
        std::fs::write(&path, format!("{key_hex}\n"))?;
    }
    Ok(())
}

#[derive(Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub pa: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub pb: f64,
    #[arg(long, default_value_t = 128)]
    pub key_bits: usize,
    /// Comma-separated block lengths.
    #[arg(long, default_value = "1024,2048")]
    pub n: String,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn bounds(args: BoundsArgs) -> Result<()> {
    let p_a = BscParam::new(args.pa)?;
    let ns: Vec<usize> = parse_f64_list(&args.n)?.into_iter().map(|v| v as usize).collect();
    let mut csv = csv_preamble(
        "bounds",
        &[
            ("pa", format!("{}", args.pa)),
            ("pb", format!("{}", args.pb)),
            ("key_bits", args.key_bits.to_string()),
        ],
    );
    csv.push_str("n,rc_max,ratio_max,rcu_bound\n");
    for n in ns {
        let (rc, ratio) = sphere_packing_ratio(n, args.pb, p_a)?;
        let rcu = rcu_bound_bsc(n, args.key_bits, p_a)?;
        let _ = writeln!(csv, "{n},{rc:.6},{ratio:.6},{rcu:e}");
    }
    std::fs::write(&args.out, csv)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

#[derive(Args)]
pub struct RegionArgs {
    /// gs, cs, or hidden.
    #[arg(long, default_value = "gs")]
    pub model: String,
    #[arg(long)]
    pub pa: f64,
    /// Encoder measurement crossover (hidden model only).
    #[arg(long, default_value_t = 0.0)]
    pub pe: f64,
    #[arg(long, default_value_t = 0.001)]
    pub step: f64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn region(args: RegionArgs) -> Result<()> {
    let p_a = BscParam::new(args.pa)?;
    let p_e = BscParam::new(args.pe)?;
    if args.step <= 0.0 || args.step > 0.5 {
        return Err(Error::DomainError(format!("bad grid step {}", args.step)));
    }
    let mut csv = csv_preamble(
        "region",
        &[
            ("model", args.model.clone()),
            ("pa", format!("{}", args.pa)),
            ("pe", format!("{}", args.pe)),
            ("step", format!("{}", args.step)),
        ],
    );
    csv.push_str("q,R_s,R_l,R_w\n");
    // Exact endpoint inclusion at q = 0 and q = 0.5.
    let steps = (0.5 / args.step).round() as usize;
    for i in 0..=steps {
        let q = if i == steps { 0.5 } else { i as f64 * args.step };
        let t = match args.model.as_str() {
            "gs" => gs_bin_boundary(q, p_a)?,
            "cs" => cs_bin_boundary(q, p_a)?,
            "hidden" => hidden_bin_boundary(q, p_e, p_a, SecretModel::Gs)?,
            "hidden-cs" => hidden_bin_boundary(q, p_e, p_a, SecretModel::Cs)?,
            other => {
                return Err(Error::DomainError(format!(
                    "model must be gs, cs, hidden, or hidden-cs, got {other:?}"
                )))
            }
        };
        let _ = writeln!(csv, "{q:.6},{:.6},{:.6},{:.6}", t.r_s, t.r_l, t.r_w);
    }
    std::fs::write(&args.out, csv)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

#[derive(Args)]
pub struct Fig5Args {
    #[arg(long, default_value_t = 0.15)]
    pub pa: f64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn fig5(args: Fig5Args) -> Result<()> {
    let rows = figure5_table(BscParam::new(args.pa)?)?;
    let mut csv = csv_preamble("fig5", &[("pa", format!("{}", args.pa))]);
    csv.push_str("family,q,R_s,R_l,R_w\n");
    for row in rows {
        let q = row.q.map_or(String::new(), |q| format!("{q:.6}"));
        let _ = writeln!(
            csv,
            "{},{q},{:.6},{:.6},{:.6}",
            row.family, row.r_s, row.r_l, row.r_w
        );
    }
    std::fs::write(&args.out, csv)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

#[derive(Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m1: usize,
    #[arg(long)]
    pub m2: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// gs, cs, or hidden.
    #[arg(long, default_value = "gs")]
    pub mode: String,
    /// Encoder measurement crossover (hidden mode).
    #[arg(long, default_value_t = 0.0)]
    pub pe: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct AuditArtifact<'a> {
    tool_version: &'a str,
    n: usize,
    m1: usize,
    m2: usize,
    master_seed: u64,
    mode: String,
    pe: f64,
    report: wzkey_core::linear::LeakageReport,
}

pub fn audit(args: AuditArgs) -> Result<()> {
    let seed = effective_seed(args.seed);
    let code = NestedLinearCode::build(args.n, args.m1, args.m2, &SeedSpec::new(seed, 0))?;
    let mode = match args.mode.as_str() {
        "gs" => AuditMode::Gs,
        "cs" => AuditMode::Cs,
        "hidden" => AuditMode::Hidden,
        other => {
            return Err(Error::DomainError(format!(
                "mode must be gs, cs, or hidden, got {other:?}"
            )))
        }
    };
    let report = audit_leakage(&code, BscParam::new(args.pe)?, mode)?;
    let artifact = AuditArtifact {
        tool_version: TOOL_VERSION,
        n: args.n,
        m1: args.m1,
        m2: args.m2,
        master_seed: seed,
        mode: args.mode.clone(),
        pe: args.pe,
        report,
    };
    let mut json = serde_json::to_vec_pretty(&artifact)?;
    json.push(b'\n');
    std::fs::write(&args.out, json)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

