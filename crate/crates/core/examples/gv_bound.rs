// Distance targets for a few codebook sizes, and what happens past 2^q classes.
//
//     cargo run --example gv_bound

use shc::gv::compute_min_distance;

fn main() {
    let lengths = [16, 32, 64];
    println!("{:>8} {}", "classes", lengths.map(|q| format!("{:>6}", format!("q={q}"))).join(""));
    for classes in [10, 100, 196, 555, 1000] {
        let row: String = lengths
            .iter()
            .map(|&q| format!("{:>6}", compute_min_distance(q, classes).unwrap()))
            .collect();
        println!("{classes:>8} {row}");
    }

    match compute_min_distance(4, 17) {
        Ok(d) => println!("unexpected: {d}"),
        Err(e) => println!("17 classes with 4 bits: {e}"),
    }
}
