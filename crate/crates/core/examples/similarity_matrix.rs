// Build a class similarity matrix two ways: from classifier logits (mask the
// ground-truth class, softmax the rest, average per class) and from class
// embeddings (cosine similarity).
//
//     cargo run --example similarity_matrix

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shc::similarity::{
    build_similarity, cosine_similarity_matrix, EmbeddingTable, LogitRecord, MaskMode,
};
use shc::SimilarityMatrix;

fn print_matrix(title: &str, sim: &SimilarityMatrix) {
    println!("{title}");
    for i in 0..sim.num_classes() {
        let row: Vec<String> = sim.row(i).iter().map(|v| format!("{v:>7.3}")).collect();
        println!("  {}", row.join(" "));
    }
}

fn main() {
    // Classes 0 and 1 are easily confused with each other, class 2 stands apart.
    let prototypes = [[4.0, 2.5, 0.0], [2.5, 4.0, 0.0], [0.0, 0.0, 4.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut records = Vec::new();
    for (label, proto) in prototypes.iter().enumerate() {
        for n in 0..50 {
            records.push(LogitRecord {
                image_id: format!("img{label}_{n}"),
                label,
                logits: proto.iter().map(|v| v + rng.random_range(-0.5..0.5)).collect(),
            });
        }
    }
    let from_logits = build_similarity(&records, 3, MaskMode::GroundTruth).unwrap();
    print_matrix("from logits (ground-truth mask):", &from_logits);

    let emb = EmbeddingTable::new(vec![
        vec![0.9, 0.4, 0.1],
        vec![0.8, 0.5, 0.0],
        vec![0.0, 0.2, 1.0],
    ])
    .unwrap();
    print_matrix("from embeddings (cosine):", &cosine_similarity_matrix(&emb).unwrap());
}
