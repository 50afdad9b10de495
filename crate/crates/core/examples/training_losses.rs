// Central and quantization losses for relaxed network outputs against a fixed
// center, as a relaxed code walks from 0 to the center.
//
//     cargo run --example training_losses

use shc::losses::{central_loss, quantization_loss, total_loss, LossConfig, RelaxedCode};
use shc::BinaryCode;

fn main() {
    let center = BinaryCode::from_signs(&[1, -1, 1, 1, -1, -1, 1, -1]).unwrap();
    let target = center.to_f64();
    let cfg = LossConfig::default();
    println!("{:>5} {:>10} {:>10} {:>10}", "t", "central", "quant", "total");
    for step in 0..=10 {
        let t = step as f64 / 10.0;
        let b = RelaxedCode::new(target.iter().map(|v| t * v).collect()).unwrap();
        let batch = [(b.clone(), center.clone())];
        println!(
            "{t:>5.1} {:>10.5} {:>10.5} {:>10.5}",
            central_loss(&batch, &cfg).unwrap(),
            quantization_loss(&[b]),
            total_loss(&batch, &cfg).unwrap()
        );
    }
}
