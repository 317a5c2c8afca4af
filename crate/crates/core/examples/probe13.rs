// Temporary probe: find the first leaf whose LLR differs between the
// recursive oracle and an inline reimplementation of the decoder's
// stage-array scheduling, on trial 862.

use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{
    assemble_u, construct_reliabilities, polar_transform, LlrVector, PolarCodePair,
};

fn f_exact(a: f64, b: f64) -> f64 {
    let (aa, ab) = (a.abs(), b.abs());
    let base = if (a < 0.0) != (b < 0.0) { -aa.min(ab) } else { aa.min(ab) };
    if aa == f64::INFINITY || ab == f64::INFINITY {
        return base;
    }
    let sum = (a + b).abs();
    let diff = (a - b).abs();
    let mut c = base;
    if sum < 30.0 {
        c += (-sum).exp().ln_1p();
    }
    if diff < 30.0 {
        c -= (-diff).exp().ln_1p();
    }
    c
}

fn g_exact(a: f64, b: f64, bit: u8) -> f64 {
    if bit == 1 {
        b - a
    } else {
        b + a
    }
}

fn sc_trace(
    llr: &[f64],
    truth: &[u8],
    base: usize,
    leaf: &mut [f64],
) -> Vec<u8> {
    // follows TRUE bits (genie) so both sides stay on the same path
    let n = llr.len();
    if n == 1 {
        leaf[base] = llr[0];
        return vec![truth[0]];
    }
    let half = n / 2;
    let fl: Vec<f64> = (0..half).map(|j| f_exact(llr[j], llr[j + half])).collect();
    let ca = sc_trace(&fl, &truth[..half], base, leaf);
    let gl: Vec<f64> = (0..half)
        .map(|j| g_exact(llr[j], llr[j + half], ca[j]))
        .collect();
    let cb = sc_trace(&gl, &truth[half..], base + half, leaf);
    let mut cw: Vec<u8> = (0..half).map(|j| ca[j] ^ cb[j]).collect();
    cw.extend(cb);
    cw
}

/// Inline copy of the decoder's stage-array scheduling, single path,
/// following TRUE bits, recording leaf llrs.
struct StageDecoder {
    n: usize,
    m: usize,
    stage_off: Vec<usize>,
    out_off: Vec<usize>,
    llr: Vec<f64>,
    bl: Vec<u8>,
    out: Vec<u8>,
    leaf: Vec<f64>,
}

impl StageDecoder {
    fn run(channel: &[f64], truth: &[u8]) -> Vec<f64> {
        let n = channel.len();
        let m = n.trailing_zeros() as usize;
        let mut stage_off = vec![0usize; m + 2];
        for s in 1..=m {
            stage_off[s + 1] = stage_off[s] + (n >> s);
        }
        let mut out_off = vec![0usize; m + 2];
        for d in 0..=m {
            out_off[d + 1] = out_off[d] + (n >> d);
        }
        let mut dec = StageDecoder {
            n,
            m,
            stage_off,
            out_off,
            llr: vec![0.0; n - 1],
            bl: vec![0; n - 1],
            out: vec![0; 2 * n - 1],
            leaf: vec![0.0; n],
        };
        dec.process(0, 0, channel, truth);
        dec.leaf
    }

    fn process(&mut self, depth: usize, start: usize, channel: &[f64], truth: &[u8]) {
        let block = self.n >> depth;
        if block == 1 {
            let l = if self.m == 0 {
                channel[0]
            } else {
                self.llr[self.stage_off[self.m]]
            };
            self.leaf[start] = l;
            self.out[self.out_off[self.m]] = truth[start];
            return;
        }
        let half = block / 2;
        let dst = self.stage_off[depth + 1];
        if depth == 0 {
            for j in 0..half {
                self.llr[dst + j] = f_exact(channel[j], channel[j + half]);
            }
        } else {
            let src = self.stage_off[depth];
            for j in 0..half {
                self.llr[dst + j] = f_exact(self.llr[src + j], self.llr[src + j + half]);
            }
        }
        self.process(depth + 1, start, channel, truth);
        let child_out = self.out_off[depth + 1];
        let bl_off = self.stage_off[depth + 1];
        for j in 0..half {
            self.bl[bl_off + j] = self.out[child_out + j];
        }
        if depth == 0 {
            for j in 0..half {
                self.llr[dst + j] = g_exact(channel[j], channel[j + half], self.bl[bl_off + j]);
            }
        } else {
            let src = self.stage_off[depth];
            for j in 0..half {
                self.llr[dst + j] =
                    g_exact(self.llr[src + j], self.llr[src + j + half], self.bl[bl_off + j]);
            }
        }
        self.process(depth + 1, start + half, channel, truth);
        let parent = self.out_off[depth];
        for j in 0..half {
            let right = self.out[child_out + j];
            self.out[parent + j] = self.bl[bl_off + j] ^ right;
            self.out[parent + half + j] = right;
        }
    }
}

fn main() {
    let n = 128;
    let order = construct_reliabilities(n, BscParam::new(0.12).unwrap()).unwrap();
    let code = PolarCodePair::from_ordering(n, order, 40).unwrap();
    let ch = BscParam::new(0.12).unwrap();
    let trial = 862u64;
    let s = BitVector::random(40, &SeedSpec::new(7, 2 * trial));
    let u = assemble_u(&code, &BitVector::zeros(code.m1()), &BitVector::zeros(code.m2()), &s)
        .unwrap();
    let truth: Vec<u8> = u.iter().map(u8::from).collect();
    let x = polar_transform(&u).unwrap();
    let y = sample_bsc(&x, ch, &SeedSpec::new(7, 2 * trial + 1));
    let llr = LlrVector::from_hard_bsc(&y, ch);

    let mut leaf_oracle = vec![0.0; n];
    sc_trace(&llr.0, &truth, 0, &mut leaf_oracle);
    let leaf_stage = StageDecoder::run(&llr.0, &truth);

    let mut diffs = 0;
    for i in 0..n {
        if leaf_oracle[i].to_bits() != leaf_stage[i].to_bits() {
            if diffs < 6 {
                println!(
                    "leaf {i}: oracle={:+.17e} stage={:+.17e}",
                    leaf_oracle[i], leaf_stage[i]
                );
            }
            diffs += 1;
        }
    }
    println!("total differing leaf llrs: {diffs}/{n}");
}
