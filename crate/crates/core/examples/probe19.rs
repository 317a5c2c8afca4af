// Temporary probe: block-error rate of the repetition+RM fuzzy commitment
// at p_A = 0.15.

use wzkey_core::channel::BscParam;
use wzkey_core::keyagree::{evaluate_metrics, RepetitionRmCode, Scheme};

fn main() {
    let code = RepetitionRmCode::standard();
    for trials in [2_000u64, 20_000] {
        let report = evaluate_metrics(
            &Scheme::Fcs(&code),
            BscParam::new(0.15).unwrap(),
            trials,
            606,
        )
        .unwrap();
        println!(
            "trials={trials}: errors={} P_B={:.4e} storage={}",
            report.errors, report.p_b, report.r_w
        );
    }
}
