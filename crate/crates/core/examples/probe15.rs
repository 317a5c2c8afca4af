// Temporary probe: deep block-error measurements below the fit window to
// characterize curvature, n=1024 and n=2048 Z-construction codes.

use wzkey_core::channel::BscParam;
use wzkey_core::design::measure_block_errors;
use wzkey_core::polar::{construct_reliabilities, PolarCodePair};

fn main() {
    let cases: [(usize, f64, &[(f64, u64)]); 2] = [
        (
            1024,
            0.1819,
            &[
                (0.175, 2_000_000),
                (0.180, 1_000_000),
                (0.185, 600_000),
                (0.190, 300_000),
                (0.195, 150_000),
                (0.200, 100_000),
            ],
        ),
        (
            2048,
            0.2682,
            &[
                (0.260, 600_000),
                (0.265, 400_000),
                (0.270, 250_000),
                (0.275, 150_000),
                (0.280, 100_000),
                (0.285, 100_000),
            ],
        ),
    ];
    for (n, design_p, pts) in cases {
        let order = construct_reliabilities(n, BscParam::new(design_p).unwrap()).unwrap();
        let code = PolarCodePair::from_ordering(n, order, 128).unwrap();
        println!("== n={n}, ordering at {design_p} ==");
        for &(p, trials) in pts {
            let t0 = std::time::Instant::now();
            let errs = measure_block_errors(
                &code,
                BscParam::new(p).unwrap(),
                8,
                trials,
                777,
                9,
                (p * 1e4) as u64,
            );
            println!(
                "p={p:.3} trials={trials} errors={errs} P_B={:.3e}  ({:.0}s)",
                errs as f64 / trials as f64,
                t0.elapsed().as_secs_f64()
            );
        }
    }
}
