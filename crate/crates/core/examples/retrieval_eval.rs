// Hamming-ranking evaluation on a synthetic database: every item is its class
// center with each bit flipped independently.
//
//     cargo run --release --example retrieval_eval

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shc::eval::{default_pr_grid, evaluate, TopK};
use shc::gv::compute_min_distance;
use shc::optimizer::{init_centers, InitMethod};
use shc::{BinaryCode, CodeDatabase};

fn noisy(center: &BinaryCode, flip: f64, rng: &mut ChaCha8Rng) -> BinaryCode {
    let mut code = center.clone();
    for j in 0..code.q() {
        if rng.random_bool(flip) {
            code.set(j, !code.bit(j));
        }
    }
    code
}

fn main() {
    let (q, classes) = (32, 16);
    let d = compute_min_distance(q, classes).unwrap();
    let centers = init_centers(q, classes, d, 0, InitMethod::Greedy).unwrap().centers;
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    for flip in [0.05, 0.15, 0.3] {
        let mut db = CodeDatabase::new(q).unwrap();
        let mut queries = CodeDatabase::new(q).unwrap();
        for (class, center) in centers.iter().enumerate() {
            for _ in 0..100 {
                db.push(class as u32, noisy(center, flip, &mut rng)).unwrap();
            }
            for _ in 0..10 {
                queries.push(class as u32, noisy(center, flip, &mut rng)).unwrap();
            }
        }
        let report = evaluate(&queries, &db, &[TopK::Count(100), TopK::All], &default_pr_grid()).unwrap();
        println!(
            "flip {flip:.2}: MAP@100 {:.4}  MAP@all {:.4}",
            report.map_at["100"], report.map_at["all"]
        );
        if flip == 0.15 {
            for ((k, p), (_, r)) in report.precision_curve.iter().zip(&report.recall_curve).step_by(4) {
                println!("    K={k:>3}  P={p:.3}  R={r:.3}");
            }
        }
    }
}
