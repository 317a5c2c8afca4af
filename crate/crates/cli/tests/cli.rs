//! End-to-end tests driving the `wzkey` binary: design outputs, byte-level
//! determinism, bit-file enrollment round trips, digest checks, table
//! emission, and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn wzkey() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wzkey"))
}

fn run(args: &[&str]) -> Output {
    wzkey().args(args).output().expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_bit_file(path: &Path, bits: &[u8]) {
    let mut data = Vec::new();
    data.extend_from_slice(&(bits.len() as u64).to_le_bytes());
    let mut packed = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b == 1 {
            packed[i / 8] |= 1 << (i % 8);
        }
    }
    data.extend_from_slice(&packed);
    std::fs::write(path, data).unwrap();
}

/// Small feasible design shared by the tests; built once.
fn design_dir() -> PathBuf {
    use std::sync::OnceLock;
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = std::env::temp_dir().join(format!("wzkey-cli-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let out = run(&[
            "design",
            "--n", "64",
            "--key-bits", "8",
            "--pa", "0.05",
            "--pb", "1e-2",
            "--seed", "9",
            "--quantile", "0.99",
            "--pc-pilot-trials", "400",
            "--pc-trials", "3000",
            "--pc-grid-step", "0.01",
            "--distortion-trials", "800",
            "--quantile-trials", "2000",
            "--out-dir", dir.to_str().unwrap(),
        ]);
        assert_ok(&out);
        dir
    })
    .clone()
}

#[test]
fn design_writes_code_and_result() {
    let dir = design_dir();
    let code: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("code.json")).unwrap()).unwrap();
    assert_eq!(code["version"], 1);
    assert_eq!(code["n"], 64);
    // 1-based sorted index arrays
    let f: Vec<u64> = code["f"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert!(f.windows(2).all(|w| w[0] < w[1]));
    assert!(*f.iter().min().unwrap() >= 1);
    let design: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("design.json")).unwrap()).unwrap();
    assert!(design["design"]["m2_aug"].as_u64().unwrap() >= design["design"]["m2"].as_u64().unwrap());
    assert_eq!(design["design"]["spec"]["master_seed"], 9);
    assert!(design["tool_version"].is_string());
}

#[test]
fn design_is_byte_identical_across_runs() {
    let dir = design_dir();
    let dir2 = std::env::temp_dir().join(format!("wzkey-cli-test2-{}", std::process::id()));
    std::fs::create_dir_all(&dir2).unwrap();
    let out = run(&[
        "design",
        "--n", "64",
        "--key-bits", "8",
        "--pa", "0.05",
        "--pb", "1e-2",
        "--seed", "9",
        "--quantile", "0.99",
        "--pc-pilot-trials", "400",
        "--pc-trials", "3000",
        "--pc-grid-step", "0.01",
        "--distortion-trials", "800",
        "--quantile-trials", "2000",
        "--out-dir", dir2.to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert_eq!(
        std::fs::read(dir.join("code.json")).unwrap(),
        std::fs::read(dir2.join("code.json")).unwrap()
    );
    assert_eq!(
        std::fs::read(dir.join("design.json")).unwrap(),
        std::fs::read(dir2.join("design.json")).unwrap()
    );
}

#[test]
fn infeasible_design_exits_with_code_two() {
    let out = run(&[
        "design",
        "--n", "64",
        "--key-bits", "32",
        "--pa", "0.2",
        "--pb", "1e-2",
        "--pc-pilot-trials", "300",
        "--pc-trials", "1000",
        "--pc-grid-step", "0.01",
        "--distortion-trials", "300",
        "--quantile-trials", "500",
        "--out-dir", std::env::temp_dir().join("wzkey-infeasible").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn enroll_reconstruct_round_trip_and_digest_check() {
    let dir = design_dir();
    let design = dir.join("design.json");
    let x_path = dir.join("x.bits");
    let bits: Vec<u8> = (0..64).map(|i| ((i * 7 + 3) % 5 == 0) as u8).collect();
    write_bit_file(&x_path, &bits);
    let bundle = dir.join("x.wzkb");
    let key_path = dir.join("key.hex");
    let out = run(&[
        "enroll",
        "--design", design.to_str().unwrap(),
        "--input", x_path.to_str().unwrap(),
        "--bundle", bundle.to_str().unwrap(),
        "--key-out", key_path.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let key_enrolled = std::fs::read_to_string(&key_path).unwrap();

    // Noiseless reconstruction returns the same key.
    let out = run(&[
        "reconstruct",
        "--design", design.to_str().unwrap(),
        "--bundle", bundle.to_str().unwrap(),
        "--input", x_path.to_str().unwrap(),
        "--key-out", dir.join("key2.hex").to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert_eq!(
        key_enrolled,
        std::fs::read_to_string(dir.join("key2.hex")).unwrap()
    );

    // Corrupting the digest refuses to decode with exit code 3.
    let mut corrupted = std::fs::read(&bundle).unwrap();
    let len = corrupted.len();
    corrupted[len - 1] ^= 0xff;
    let bad = dir.join("bad.wzkb");
    std::fs::write(&bad, corrupted).unwrap();
    let out = run(&[
        "reconstruct",
        "--design", design.to_str().unwrap(),
        "--bundle", bad.to_str().unwrap(),
        "--input", x_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn chosen_secret_round_trip() {
    let dir = design_dir();
    let design = dir.join("design.json");
    let x_path = dir.join("xc.bits");
    write_bit_file(&x_path, &vec![1u8; 64]);
    let sprime_path = dir.join("sprime.bits");
    write_bit_file(&sprime_path, &[1, 0, 1, 1, 0, 0, 1, 0]);
    let bundle = dir.join("xc.wzkb");
    let out = run(&[
        "enroll",
        "--design", design.to_str().unwrap(),
        "--input", x_path.to_str().unwrap(),
        "--bundle", bundle.to_str().unwrap(),
        "--key-in", sprime_path.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let out = run(&[
        "reconstruct",
        "--design", design.to_str().unwrap(),
        "--bundle", bundle.to_str().unwrap(),
        "--input", x_path.to_str().unwrap(),
    ]);
    assert_ok(&out);
    // hex of 01011001 (LSB-first byte 0b0100_1101 = 0x4d)
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("key 4d"), "stdout: {stdout}");
}

#[test]
fn simulate_zero_trials_writes_header_only() {
    let dir = design_dir();
    let out_path = dir.join("empty.csv");
    let out = run(&[
        "simulate",
        "--mode", "fig3",
        "--design", dir.join("design.json").to_str().unwrap(),
        "--out", out_path.to_str().unwrap(),
        "--trials", "0",
    ]);
    assert_ok(&out);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let data_lines: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .collect();
    assert_eq!(data_lines, vec!["grid_value,trials,errors,rate,ci95_lo,ci95_hi"]);
}

#[test]
fn simulate_fig4_emits_distortion_rows() {
    let dir = design_dir();
    let out_path = dir.join("fig4.csv");
    let out = run(&[
        "simulate",
        "--mode", "fig4",
        "--design", dir.join("design.json").to_str().unwrap(),
        "--out", out_path.to_str().unwrap(),
        "--trials", "200",
        "--nm1", "20,30",
    ]);
    assert_ok(&out);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("20,200,"));
    assert!(rows[2].starts_with("30,200,"));
}

#[test]
fn region_endpoints_match_closed_form() {
    let dir = design_dir();
    let out_path = dir.join("region.csv");
    let out = run(&[
        "region",
        "--model", "gs",
        "--pa", "0.15",
        "--step", "0.01",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    // q = 0 row: R_s = 0.390160, R_l = R_w = 0.609840
    assert_eq!(rows[1], "0.000000,0.390160,0.609840,0.609840");
    // last row q = 0.5: all rates zero
    assert_eq!(*rows.last().unwrap(), "0.500000,0.000000,0.000000,0.000000");
}

#[test]
fn fig5_contains_labeled_families() {
    let dir = design_dir();
    let out_path = dir.join("fig5.csv");
    let out = run(&["fig5", "--pa", "0.15", "--out", out_path.to_str().unwrap()]);
    assert_ok(&out);
    let text = std::fs::read_to_string(&out_path).unwrap();
    for family in ["sw_optimum", "fcs_cofe", "rm_concat", "prior_polar", "code1", "code2"] {
        assert!(text.contains(&format!("\n{family},")), "missing {family}");
    }
}

#[test]
fn bounds_table_has_sphere_packing_rows() {
    let dir = design_dir();
    let out_path = dir.join("bounds.csv");
    let out = run(&[
        "bounds",
        "--pa", "0.15",
        "--pb", "1e-6",
        "--key-bits", "128",
        "--n", "1024,2048",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("1024,0.27"));
    assert!(rows[2].starts_with("2048,0.30"));
}

#[test]
fn audit_emits_exact_report() {
    let dir = design_dir();
    let out_path = dir.join("audit.json");
    let out = run(&[
        "audit",
        "--n", "7",
        "--m1", "3",
        "--m2", "3",
        "--seed", "455",
        "--mode", "cs",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(v["report"]["secrecy_leakage_rate"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(v["master_seed"], 455);
}

#[test]
fn env_seed_overrides_flag() {
    let dir = design_dir();
    let out_path = dir.join("audit-env.json");
    let out = wzkey()
        .args([
            "audit",
            "--n", "7",
            "--m1", "3",
            "--m2", "3",
            "--seed", "455",
            "--mode", "gs",
            "--out", out_path.to_str().unwrap(),
        ])
        .env("WZKEY_SEED", "7")
        .output()
        .unwrap();
    assert_ok(&out);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["master_seed"], 7);
}

#[test]
fn domain_error_exits_with_code_four() {
    let out = run(&[
        "region",
        "--model", "nonsense",
        "--pa", "0.15",
        "--out", std::env::temp_dir().join("never.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}
