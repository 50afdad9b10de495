// The on-disk workflow the CLI follows: similarity file in, centers file out,
// then a codes database evaluated against queries. Files go to a scratch
// directory under the system temp dir.
//
//     cargo run --example file_pipeline

use std::fs::{self, File};
use std::io::BufReader;

use shc::eval::{evaluate, TopK};
use shc::format::{read_centers, read_codes, write_centers, write_codes};
use shc::gv::compute_min_distance;
use shc::optimizer::{optimize, quality_metrics, AlmHyperParams, InitMethod};
use shc::similarity::{read_similarity, write_similarity};
use shc::{CodeDatabase, SimilarityMatrix};

fn main() -> shc::Result<()> {
    let dir = std::env::temp_dir().join(format!("shc-pipeline-{}", std::process::id()));
    fs::create_dir_all(&dir)?;

    let sim = SimilarityMatrix::new(
        4,
        vec![1.0, 0.5, 0.0, -0.2, 0.5, 1.0, 0.1, 0.0, 0.0, 0.1, 1.0, 0.4, -0.2, 0.0, 0.4, 1.0],
    )?;
    let sim_path = dir.join("sim.csv");
    write_similarity(&sim, File::create(&sim_path)?)?;
    let sim = read_similarity(BufReader::new(File::open(&sim_path)?))?;

    let q = 16;
    let d = compute_min_distance(q, sim.num_classes())?;
    let out = optimize(&sim, q, d, &AlmHyperParams::default(), 0, InitMethod::Greedy)?;
    let centers_path = dir.join("centers.bin");
    write_centers(&out.centers, File::create(&centers_path)?)?;
    let centers = read_centers(File::open(&centers_path)?)?;
    let quality = quality_metrics(&centers, &sim)?;
    println!("centers: {} bytes, d={d}, d_min={:?}, s_loss={:.4}", fs::metadata(&centers_path)?.len(), quality.d_min, quality.s_loss);

    // The centers themselves make a tiny database; query with them too.
    let db = CodeDatabase::from_records(q, centers.iter().enumerate().map(|(i, c)| (i as u32, c.clone())))?;
    let db_path = dir.join("db.bin");
    write_codes(&db, File::create(&db_path)?)?;
    let db = read_codes(File::open(&db_path)?, Some(centers.num_classes()))?;
    let report = evaluate(&db, &db, &[TopK::Count(1)], &[1, 2, 4])?;
    println!("self-retrieval MAP@1 = {}", report.map_at["1"]);

    fs::remove_dir_all(&dir)?;
    Ok(())
}
