// Temporary probe: per-index genie statistics at n=1024 around index 511,
// comparing the cutoff-f against a no-cutoff exact f.

use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{bhattacharyya_parameters, polar_transform, LlrVector};

fn f_cutoff(a: f64, b: f64) -> f64 {
    let (aa, ab) = (a.abs(), b.abs());
    let base = if (a < 0.0) != (b < 0.0) { -aa.min(ab) } else { aa.min(ab) };
    let sum = aa + ab;
    let diff = (aa - ab).abs();
    let mut c = base;
    if sum < 30.0 {
        c += (-sum).exp().ln_1p();
    }
    if diff < 30.0 {
        c -= (-diff).exp().ln_1p();
    }
    c
}

fn f_full(a: f64, b: f64) -> f64 {
    let (aa, ab) = (a.abs(), b.abs());
    let base = if (a < 0.0) != (b < 0.0) { -aa.min(ab) } else { aa.min(ab) };
    base + (-(aa + ab)).exp().ln_1p() - (-(aa - ab).abs()).exp().ln_1p()
}

struct Stats {
    err: Vec<f64>,
    tie: Vec<u32>,
    min_abs: Vec<f64>,
}

fn genie_rec(
    llr: &[f64],
    u_true: &[u8],
    st: &mut Stats,
    base: usize,
    f: &dyn Fn(f64, f64) -> f64,
) -> Vec<u8> {
    let n = llr.len();
    if n == 1 {
        if llr[0] == 0.0 {
            st.tie[base] += 1;
            st.err[base] += 0.5;
        } else {
            let dec = u8::from(llr[0] < 0.0);
            if dec != u_true[0] {
                st.err[base] += 1.0;
            }
        }
        if llr[0].abs() < st.min_abs[base] {
            st.min_abs[base] = llr[0].abs();
        }
        return vec![u_true[0]];
    }
    let half = n / 2;
    let fl: Vec<f64> = (0..half).map(|j| f(llr[j], llr[j + half])).collect();
    let ca = genie_rec(&fl, &u_true[..half], st, base, f);
    let gl: Vec<f64> = (0..half)
        .map(|j| if ca[j] == 1 { llr[j + half] - llr[j] } else { llr[j + half] + llr[j] })
        .collect();
    let cb = genie_rec(&gl, &u_true[half..], st, base + half, f);
    let mut cw: Vec<u8> = (0..half).map(|j| ca[j] ^ cb[j]).collect();
    cw.extend(cb);
    cw
}

fn main() {
    let n = 1024usize;
    let p = 0.17;
    let ch = BscParam::new(p).unwrap();
    let z = bhattacharyya_parameters(n, ch).unwrap();
    let trials = 20_000u64;

    for (name, f) in [
        ("cutoff", &f_cutoff as &dyn Fn(f64, f64) -> f64),
        ("full  ", &f_full as &dyn Fn(f64, f64) -> f64),
    ] {
        let mut st = Stats {
            err: vec![0.0; n],
            tie: vec![0u32; n],
            min_abs: vec![f64::INFINITY; n],
        };
        for t in 0..trials {
            let u = BitVector::random(n, &SeedSpec::new(71, 2 * t));
            let ub: Vec<u8> = u.iter().map(u8::from).collect();
            let x = polar_transform(&u).unwrap();
            let y = sample_bsc(&x, ch, &SeedSpec::new(71, 2 * t + 1));
            let llr = LlrVector::from_hard_bsc(&y, ch);
            genie_rec(&llr.0, &ub, &mut st, 0, f);
        }
        println!("== {name} f ==");
        for &i in &[495usize, 503, 507, 509, 510, 511, 512, 640, 768, 1023] {
            println!(
                "  i={i:4} err={:.4} ties={:5} min|llr|={:.3e}  Z={:.3e}",
                st.err[i] / trials as f64,
                st.tie[i],
                st.min_abs[i],
                z[i]
            );
        }
    }
}
