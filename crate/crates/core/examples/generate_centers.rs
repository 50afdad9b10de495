// Generate semantic hash centers with the augmented Lagrangian optimizer and
// compare the result with its initialization.
//
//     cargo run --release --example generate_centers

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shc::gv::compute_min_distance;
use shc::optimizer::{optimize, quality_metrics, to_matrix, AlmHyperParams, InitMethod};
use shc::{BinaryCode, CenterSet, SimilarityMatrix};

/// A similarity matrix that some hidden set of centers fits exactly.
fn planted(q: usize, classes: usize, seed: u64) -> SimilarityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden = CenterSet::new((0..classes).map(|_| BinaryCode::random(q, &mut rng).unwrap()).collect()).unwrap();
    let h = to_matrix(&hidden);
    let gram = h.transpose() * &h / q as f64;
    let values = (0..classes * classes)
        .map(|n| if n / classes == n % classes { 1.0 } else { gram[(n / classes, n % classes)] })
        .collect();
    SimilarityMatrix::new(classes, values).unwrap()
}

fn main() {
    let (q, classes) = (32, 16);
    let sim = planted(q, classes, 11);
    let d = compute_min_distance(q, classes).unwrap();
    println!("q={q} C={classes} target distance d={d}");

    for (name, hp) in [
        ("default", AlmHyperParams::default()),
        ("mu=0.1", AlmHyperParams { mu: 0.1, ..AlmHyperParams::default() }),
    ] {
        for init in [InitMethod::Greedy, InitMethod::Hadamard] {
            let out = optimize(&sim, q, d, &hp, 0, init).unwrap();
            let before = quality_metrics(&out.initial, &sim).unwrap();
            let after = quality_metrics(&out.centers, &sim).unwrap();
            println!(
                "{name:>8} {:?}: s_loss {:.3} -> {:.3}, d_min {:?} -> {:?}, {} violations, kept cycle {}",
                out.init_method,
                before.s_loss,
                after.s_loss,
                before.d_min,
                after.d_min,
                out.violations.len(),
                out.best_cycle,
            );
        }
    }

    let out = optimize(&sim, q, d, &AlmHyperParams::default(), 0, InitMethod::Greedy).unwrap();
    let trace: Vec<String> = out.trace.iter().take(5).map(|v| format!("{v:.2}")).collect();
    println!("first Lagrangian values: {}", trace.join(", "));
}
