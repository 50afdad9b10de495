use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use shc::code::{BinaryCode, CenterSet, CodeDatabase, SimilarityMatrix};
use shc::format::{read_centers, write_centers, write_codes};
use shc::similarity::{read_similarity, write_similarity};
use tempfile::TempDir;

fn shc<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_shc")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp paths are UTF-8")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_sim(dir: &Path, name: &str, sim: &SimilarityMatrix) -> PathBuf {
    let p = dir.join(name);
    write_similarity(sim, fs::File::create(&p).unwrap()).unwrap();
    p
}

fn write_center_file(dir: &Path, name: &str, rows: &[&[i8]]) -> PathBuf {
    let cs = CenterSet::new(rows.iter().map(|r| BinaryCode::from_signs(r).unwrap()).collect()).unwrap();
    let p = dir.join(name);
    write_centers(&cs, fs::File::create(&p).unwrap()).unwrap();
    p
}

const HADAMARD_4X8: [&[i8]; 4] = [
    &[1, 1, 1, 1, 1, 1, 1, 1],
    &[1, -1, 1, -1, 1, -1, 1, -1],
    &[1, 1, -1, -1, 1, 1, -1, -1],
    &[1, -1, -1, 1, 1, -1, -1, 1],
];

#[test]
fn gvbound_prints_distance() {
    let o = shc(["gvbound", "--bits", "16", "--classes", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4\n");
}

#[test]
fn gvbound_infeasible_exits_two() {
    let o = shc(["gvbound", "--bits", "1", "--classes", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("infeasible"), "{}", stderr(&o));
}

#[test]
fn unknown_flag_prints_usage_and_exits_one() {
    let o = shc(["gvbound", "--bits", "8", "--classes", "2", "--colour"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage:"));
}

#[test]
fn missing_input_file_exits_one() {
    let dir = TempDir::new().unwrap();
    let o = shc([
        "centers",
        "--sim",
        "missing.csv",
        "--bits",
        "16",
        "--out",
        dir.path().join("c.bin").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.csv"), "{}", stderr(&o));
}

#[test]
fn inspect_planted_fixture() {
    let dir = TempDir::new().unwrap();
    let centers = write_center_file(dir.path(), "h.bin", &HADAMARD_4X8);
    let sim = write_sim(dir.path(), "s.csv", &SimilarityMatrix::identity(4).unwrap());
    let o = shc(["inspect", "--json", "--centers", path_str(&centers), "--sim", path_str(&sim)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["d_min"], 4);
    assert_eq!(v["s_loss"], 0.0);
}

#[test]
fn inspect_plain_text_and_duplicates() {
    let dir = TempDir::new().unwrap();
    let row: &[i8] = &[1, -1, 1, 1];
    let centers = write_center_file(dir.path(), "dup.bin", &[row, row]);
    let sim = write_sim(dir.path(), "s.csv", &SimilarityMatrix::new(2, vec![1.0, 1.0, 1.0, 1.0]).unwrap());
    let o = shc([
        "inspect",
        "--centers",
        path_str(&centers),
        "--sim",
        path_str(&sim),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "d_min: 0\ns_loss: 0\n");
}

#[test]
fn inspect_class_mismatch_exits_one() {
    let dir = TempDir::new().unwrap();
    let centers = write_center_file(dir.path(), "h.bin", &HADAMARD_4X8);
    let sim = write_sim(dir.path(), "s.csv", &SimilarityMatrix::identity(3).unwrap());
    let o = shc([
        "inspect",
        "--centers",
        path_str(&centers),
        "--sim",
        path_str(&sim),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("dimension mismatch"));
}

#[test]
fn simmatrix_from_logits_and_embeddings() {
    let dir = TempDir::new().unwrap();
    let logits = dir.path().join("logits.csv");
    fs::write(
        &logits,
        "C=3\nimg0,0,2.0,1.0,0.0\nimg1,1,0.5,3.0,0.5\nimg2,2,0.0,1.0,2.0\nimg3,0,1.0,0.0,2.0\n",
    )
    .unwrap();
    let out = dir.path().join("s.csv");
    let o = shc([
        "simmatrix",
        "--logits",
        path_str(&logits),
        "--out",
        path_str(&out),
        "--mask",
        "argmax",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = read_similarity(std::io::BufReader::new(fs::File::open(&out).unwrap())).unwrap();
    assert_eq!(m.num_classes(), 3);
    assert!((0..3).all(|i| m.get(i, i) == 1.0));

    let emb = dir.path().join("emb.csv");
    fs::write(&emb, "C=2,D=2\n1,0\n1,1\n").unwrap();
    let o = shc([
        "simmatrix",
        "--embeddings",
        path_str(&emb),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = read_similarity(std::io::BufReader::new(fs::File::open(&out).unwrap())).unwrap();
    assert!((m.get(0, 1) - 0.5f64.sqrt()).abs() < 1e-12);

    // --mask only applies to logits
    let o = shc([
        "simmatrix",
        "--embeddings",
        path_str(&emb),
        "--out",
        path_str(&out),
        "--mask",
        "argmax",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn centers_writes_file_and_report() {
    let dir = TempDir::new().unwrap();
    let sim = write_sim(dir.path(), "s.csv", &SimilarityMatrix::identity(6).unwrap());
    let out = dir.path().join("c.bin");
    let report = dir.path().join("r.json");
    let o = shc([
        "centers",
        "--sim",
        path_str(&sim),
        "--bits",
        "16",
        "--out",
        path_str(&out),
        "--report",
        path_str(&report),
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cs = read_centers(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!((cs.num_classes(), cs.q()), (6, 16));
    let r: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    for key in ["d", "d_min", "s_loss", "trace", "violations", "seed", "hyperparameters"] {
        assert!(r.get(key).is_some(), "report lacks {key}: {r}");
    }
    assert_eq!(r["seed"], 3);
    assert_eq!(r["trace"].as_array().unwrap().len(), 20);
    assert_eq!(r["hyperparameters"]["mu"], 0.625);
}

#[test]
fn centers_semantic_only_and_explicit_distance() {
    let dir = TempDir::new().unwrap();
    let sim = write_sim(dir.path(), "s.csv", &SimilarityMatrix::identity(4).unwrap());
    let out = dir.path().join("c.bin");
    let report = dir.path().join("r.json");
    let o = shc([
        "centers",
        "--sim",
        path_str(&sim),
        "--bits",
        "8",
        "--min-dist",
        "4",
        "--no-distance",
        "--init",
        "hadamard",
        "--out",
        path_str(&out),
        "--report",
        path_str(&report),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["d"], 4);
    assert_eq!(r["mode"], "semantic-only");
    assert_eq!(r["init"], "hadamard");
    assert_eq!(r["trace"].as_array().unwrap().len(), 20);
    assert!(r["s_loss"].as_f64().unwrap() <= 2.0 + 1e-12);
}

#[test]
fn centers_too_many_classes_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let sim = write_sim(dir.path(), "s.csv", &SimilarityMatrix::identity(5).unwrap());
    let o = shc([
        "centers",
        "--sim",
        path_str(&sim),
        "--bits",
        "2",
        "--out",
        path_str(&dir.path().join("c.bin")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_writes_report() {
    let dir = TempDir::new().unwrap();
    let code = |s: &[i8]| BinaryCode::from_signs(s).unwrap();
    let db = CodeDatabase::from_records(
        4,
        [(1, code(&[1, 1, 1, 1])), (0, code(&[1, 1, 1, -1])), (1, code(&[1, 1, -1, -1])), (0, code(&[1, -1, -1, -1]))],
    )
    .unwrap();
    let queries = CodeDatabase::from_records(4, [(1, code(&[1, 1, 1, 1]))]).unwrap();
    let db_path = dir.path().join("db.bin");
    let q_path = dir.path().join("q.bin");
    write_codes(&db, fs::File::create(&db_path).unwrap()).unwrap();
    write_codes(&queries, fs::File::create(&q_path).unwrap()).unwrap();
    let out = dir.path().join("eval.json");
    let o = shc([
        "eval",
        "--db",
        path_str(&db_path),
        "--queries",
        path_str(&q_path),
        "--topk",
        "2,all",
        "--pr-grid",
        "1:4:1",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("MAP@all: 0.833333"));
    let r: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(r["query_count"], 1);
    assert_eq!(r["map_at"]["2"], 1.0);
    assert_eq!(r["precision_curve"][1], serde_json::json!([2, 0.5]));
    assert_eq!(r["pr_curve"].as_array().unwrap().len(), 4);

    let o = shc([
        "eval",
        "--db",
        path_str(&db_path),
        "--queries",
        path_str(&q_path),
        "--topk",
        "zero",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_is_independent_of_thread_count() {
    let dir = TempDir::new().unwrap();
    let db = CodeDatabase::from_records(
        12,
        (0..400u32).map(|i| (i % 7, BinaryCode::from_fn(12, |j| (i.wrapping_mul(2654435761) >> j) & 1 == 1).unwrap())),
    )
    .unwrap();
    let db_path = dir.path().join("db.bin");
    write_codes(&db, fs::File::create(&db_path).unwrap()).unwrap();
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("eval{threads}.json"));
        let o = Command::new(env!("CARGO_BIN_EXE_shc"))
            .env("SHC_THREADS", threads)
            .args(["eval", "--db"])
            .arg(&db_path)
            .arg("--queries")
            .arg(&db_path)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        reports.push(fs::read(out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

const SUBCOMMAND_FLAGS: [(&str, &[&str]); 5] = [
    ("gvbound", &["--bits", "--classes"]),
    ("simmatrix", &["--logits", "--embeddings", "--out", "--mask"]),
    (
        "centers",
        &[
            "--sim", "--bits", "--min-dist", "--out", "--seed", "--mu", "--rho", "--beta", "--eta", "--cycles",
            "--inner", "--no-distance", "--init", "--report",
        ],
    ),
    ("inspect", &["--centers", "--sim", "--json"]),
    ("eval", &["--db", "--queries", "--topk", "--pr-grid", "--out"]),
];

#[test]
fn help_lists_every_flag() {
    for (sub, flags) in SUBCOMMAND_FLAGS {
        let o = shc([sub, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        for flag in flags {
            assert!(text.contains(flag), "{sub} --help lacks {flag}:\n{text}");
        }
    }
}

/// Set `SHC_UPDATE_SNAPSHOTS=1` to rewrite the stored help texts.
#[test]
fn help_matches_snapshots() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/snapshots");
    let update = std::env::var_os("SHC_UPDATE_SNAPSHOTS").is_some();
    for (sub, _) in SUBCOMMAND_FLAGS {
        let text = stdout(&shc([sub, "--help"]));
        let path = dir.join(format!("help_{sub}.txt"));
        if update {
            fs::create_dir_all(&dir).unwrap();
            fs::write(&path, &text).unwrap();
        } else {
            let stored = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing snapshot {}", path.display()));
            assert_eq!(text, stored, "help text of {sub} changed");
        }
    }
}
