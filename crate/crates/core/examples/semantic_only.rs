// The distance-free variant: alternate closed-form updates of the proxy M and
// the binary centers H, tracking the relaxed and the binary semantic loss.
//
//     cargo run --example semantic_only

use shc::optimizer::{ablation_optimize, quality_metrics, AlmHyperParams};
use shc::SimilarityMatrix;

fn main() {
    // Two tight groups of three classes each.
    let c = 6;
    let values = (0..c * c)
        .map(|n| {
            let (i, j) = (n / c, n % c);
            if i == j {
                1.0
            } else if i / 3 == j / 3 {
                0.6
            } else {
                -0.3
            }
        })
        .collect();
    let sim = SimilarityMatrix::new(c, values).unwrap();

    let out = ablation_optimize(&sim, 16, &AlmHyperParams::default(), 3).unwrap();
    for (t, (relaxed, binary)) in out.relaxed_trace.iter().zip(&out.s_loss_trace).enumerate().take(6) {
        println!("cycle {t:>2}: relaxed {relaxed:>8.4}  binary s_loss {binary:>8.4}");
    }
    let before = quality_metrics(&out.initial, &sim).unwrap();
    let after = quality_metrics(&out.centers, &sim).unwrap();
    println!("s_loss {:.4} -> {:.4}, d_min {:?} -> {:?}", before.s_loss, after.s_loss, before.d_min, after.d_min);
}
