//! The `shc` command line.
//!
//! Exit codes: 0 on success, 1 for usage, validation, format and I/O errors,
//! 2 when the request is infeasible (for example more classes than `2^q`).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{default_pr_grid, evaluate, parse_grid, parse_topk_list};
use crate::format::{read_centers, read_codes, write_centers};
use crate::gv::compute_min_distance;
use crate::optimizer::{
    ablation_optimize_from, init_centers, optimize, quality_metrics, AlmHyperParams, InitMethod,
    QualityMetrics,
};
use crate::similarity::{
    build_similarity, cosine_similarity_matrix, read_embeddings, read_logits, read_similarity,
    write_similarity, MaskMode,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SHC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "shc", version, about = "Semantic hash centers and Hamming-ranking retrieval evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the minimum distance target for `C` codewords of length `q`.
    Gvbound(GvArgs),
    /// Build a class similarity matrix from logits or class embeddings.
    Simmatrix(SimArgs),
    /// Generate hash centers for a similarity matrix.
    Centers(CentersArgs),
    /// Report minimum distance and semantic loss of a center file.
    Inspect(InspectArgs),
    /// Evaluate Hamming-ranking retrieval of query codes against a database.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct GvArgs {
    /// Code length q.
    #[arg(long)]
    bits: usize,
    /// Number of classes C.
    #[arg(long)]
    classes: usize,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["logits", "embeddings"])))]
struct SimArgs {
    /// Logits file (`C=<int>` header, then `id,label,logits...` rows).
    #[arg(long, value_name = "FILE")]
    logits: Option<PathBuf>,
    /// Class embeddings file (`C=<int>,D=<int>` header, then C rows).
    #[arg(long, value_name = "FILE")]
    embeddings: Option<PathBuf>,
    /// Output similarity file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Which logit is masked before the softmax, logits input only [default: ground-truth].
    #[arg(long, value_enum, conflicts_with = "embeddings")]
    mask: Option<MaskArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MaskArg {
    GroundTruth,
    Argmax,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitArg {
    Greedy,
    Hadamard,
}

#[derive(Debug, Args)]
struct CentersArgs {
    /// Similarity matrix file.
    #[arg(long, value_name = "FILE")]
    sim: PathBuf,
    /// Code length q.
    #[arg(long)]
    bits: usize,
    /// Target minimum distance, or `auto` for the bound computed from q and C.
    #[arg(long, value_name = "N|auto", default_value = "auto", value_parser = parse_min_dist)]
    min_dist: MinDist,
    /// Output centers file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Seed for the initialization.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weight of the pairwise inner-product penalty.
    #[arg(long, default_value_t = AlmHyperParams::default().mu)]
    mu: f64,
    /// Penalty tying the centers to their real-valued proxy.
    #[arg(long, default_value_t = AlmHyperParams::default().rho)]
    rho: f64,
    /// Penalty on the minimum-distance residuals.
    #[arg(long, default_value_t = AlmHyperParams::default().beta)]
    beta: f64,
    /// Step divisor of the sign-projected gradient update.
    #[arg(long, default_value_t = AlmHyperParams::default().eta)]
    eta: f64,
    /// Outer optimization cycles.
    #[arg(long, default_value_t = AlmHyperParams::default().cycles)]
    cycles: usize,
    /// Gradient steps per center and cycle.
    #[arg(long, default_value_t = AlmHyperParams::default().inner)]
    inner: usize,
    /// Drop the distance constraints and optimize the semantic term only.
    #[arg(long)]
    no_distance: bool,
    /// Initialization scheme.
    #[arg(long, value_enum, default_value_t = InitArg::Greedy)]
    init: InitArg,
    /// Write a JSON run report to this file.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug)]
enum MinDist {
    Auto,
    Fixed(usize),
}

fn parse_min_dist(s: &str) -> std::result::Result<MinDist, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(MinDist::Auto);
    }
    s.parse()
        .map(MinDist::Fixed)
        .map_err(|_| format!("expected a non-negative integer or `auto`, got {s:?}"))
}

#[derive(Debug, Args)]
struct InspectArgs {
    /// Centers file.
    #[arg(long, value_name = "FILE")]
    centers: PathBuf,
    /// Similarity matrix file.
    #[arg(long, value_name = "FILE")]
    sim: PathBuf,
    /// Print JSON instead of plain text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Database codes file.
    #[arg(long, value_name = "FILE")]
    db: PathBuf,
    /// Query codes file.
    #[arg(long, value_name = "FILE")]
    queries: PathBuf,
    /// Comma-separated MAP cutoffs; `all` means the whole database.
    #[arg(long, value_name = "LIST", default_value = "100,1000,all")]
    topk: String,
    /// Cutoffs for the precision/recall curves: comma-separated `K` or `start:stop:step`.
    #[arg(long, value_name = "GRID")]
    pr_grid: Option<String>,
    /// Output JSON report.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Serialize)]
struct CentersReport {
    mode: &'static str,
    init: InitMethod,
    d: usize,
    #[serde(flatten)]
    quality: QualityMetrics,
    trace: Vec<f64>,
    violations: usize,
    seed: u64,
    hyperparameters: AlmHyperParams,
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Gvbound(a) => gvbound(a),
        Command::Simmatrix(a) => simmatrix(a),
        Command::Centers(a) => centers(a),
        Command::Inspect(a) => inspect(a),
        Command::Eval(a) => eval(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("shc: {e}");
            exit_code(&e)
        }
    }
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => 2,
        _ => 1,
    }
}

fn configure_threads() {
    let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    else {
        return;
    };
    // a second call in the same process finds the pool already built
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut sink = create(path)?;
    serde_json::to_writer_pretty(&mut sink, value)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}

fn gvbound(a: GvArgs) -> Result<()> {
    println!("{}", compute_min_distance(a.bits, a.classes)?);
    Ok(())
}

fn simmatrix(a: SimArgs) -> Result<()> {
    let sim = match (&a.logits, &a.embeddings) {
        (Some(path), _) => {
            let (classes, records) = read_logits(open(path)?)?;
            let mode = match a.mask {
                None | Some(MaskArg::GroundTruth) => MaskMode::GroundTruth,
                Some(MaskArg::Argmax) => MaskMode::Argmax,
            };
            build_similarity(&records, classes, mode)?
        }
        (None, Some(path)) => cosine_similarity_matrix(&read_embeddings(open(path)?)?)?,
        (None, None) => unreachable!("clap requires one input"),
    };
    let mut sink = create(&a.out)?;
    write_similarity(&sim, &mut sink)?;
    sink.flush()?;
    Ok(())
}

fn centers(a: CentersArgs) -> Result<()> {
    let sim = read_similarity(open(&a.sim)?)?;
    let classes = sim.num_classes();
    let d = match a.min_dist {
        MinDist::Auto => compute_min_distance(a.bits, classes)?,
        MinDist::Fixed(d) => d,
    };
    let hp = AlmHyperParams {
        mu: a.mu,
        rho: a.rho,
        beta: a.beta,
        eta: a.eta,
        cycles: a.cycles,
        inner: a.inner,
        ..AlmHyperParams::default()
    };
    hp.validate()?;
    let init = match a.init {
        InitArg::Greedy => InitMethod::Greedy,
        InitArg::Hadamard => InitMethod::Hadamard,
    };
    let (centers, trace, init_used, mode) = if a.no_distance {
        let start = init_centers(a.bits, classes, d, a.seed, init)?;
        let out = ablation_optimize_from(&sim, &start.centers, &hp)?;
        (out.centers, out.s_loss_trace, start.method, "semantic-only")
    } else {
        let out = optimize(&sim, a.bits, d, &hp, a.seed, init)?;
        (out.centers, out.trace, out.init_method, "constrained")
    };

    let mut sink = create(&a.out)?;
    write_centers(&centers, &mut sink)?;
    sink.flush()?;

    let quality = quality_metrics(&centers, &sim)?;
    let violations = centers.violations(d as u32).len();
    eprintln!(
        "d={d} d_min={} s_loss={} violations={violations}",
        fmt_d_min(quality.d_min),
        quality.s_loss
    );
    if let Some(path) = &a.report {
        write_json(
            path,
            &CentersReport {
                mode,
                init: init_used,
                d,
                quality,
                trace,
                violations,
                seed: a.seed,
                hyperparameters: hp,
            },
        )?;
    }
    Ok(())
}

fn fmt_d_min(d: Option<u32>) -> String {
    d.map_or_else(|| "undefined".to_owned(), |v| v.to_string())
}

fn inspect(a: InspectArgs) -> Result<()> {
    let centers = read_centers(open(&a.centers)?)?;
    let sim = read_similarity(open(&a.sim)?)?;
    let quality = quality_metrics(&centers, &sim)?;
    if a.json {
        let text = serde_json::to_string(&quality).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        println!("{text}");
    } else {
        println!("d_min: {}", fmt_d_min(quality.d_min));
        println!("s_loss: {}", quality.s_loss);
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let topks = parse_topk_list(&a.topk)?;
    let grid = match &a.pr_grid {
        Some(grid) => parse_grid(grid)?,
        None => default_pr_grid(),
    };
    let db = read_codes(open(&a.db)?, None)?;
    let queries = read_codes(open(&a.queries)?, None)?;
    let report = evaluate(&queries, &db, &topks, &grid)?;
    for t in &topks {
        let key = t.to_string();
        println!("MAP@{key}: {:.6}", report.map_at[&key]);
    }
    write_json(&a.out, &report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn min_dist_parsing() {
        assert!(matches!(parse_min_dist("auto"), Ok(MinDist::Auto)));
        assert!(matches!(parse_min_dist("7"), Ok(MinDist::Fixed(7))));
        assert!(parse_min_dist("-1").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["shc", "gvbound", "--bits", "16", "--classes", "100"]), 0);
        assert_eq!(run(["shc", "gvbound", "--bits", "1", "--classes", "3"]), 2);
        assert_eq!(run(["shc", "gvbound", "--bits", "16"]), 1);
        assert_eq!(run(["shc", "gvbound", "--bits", "16", "--classes", "4", "--bogus"]), 1);
        assert_eq!(run(["shc", "--help"]), 0);
    }
}
