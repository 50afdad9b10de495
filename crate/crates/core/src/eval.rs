//! Hamming-ranking retrieval metrics: MAP@K, Precision@K, Recall@K, PR curves.
//!
//! The database is ranked per query by ascending Hamming distance with ties
//! broken by ascending record index. A record is relevant when its label
//! equals the query label.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::code::{hamming_unchecked, BinaryCode, CodeDatabase};
use crate::error::{Error, Result};

/// A cutoff: a fixed count, or the whole database.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TopK {
    Count(usize),
    All,
}

impl TopK {
    /// Effective cutoff for a database of `n` records.
    pub fn resolve(self, n: usize) -> usize {
        match self {
            TopK::Count(k) => k.min(n),
            TopK::All => n,
        }
    }
}

impl fmt::Display for TopK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopK::Count(k) => write!(f, "{k}"),
            TopK::All => f.write_str("all"),
        }
    }
}

impl FromStr for TopK {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(TopK::All);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(Error::invalid(format!(
                "topK must be a positive integer or `all`, got {s:?}"
            ))),
            Ok(k) => Ok(TopK::Count(k)),
        }
    }
}

/// Parses a comma-separated list such as `100,1000,all`.
pub fn parse_topk_list(s: &str) -> Result<Vec<TopK>> {
    let out = s.split(',').map(str::parse).collect::<Result<Vec<TopK>>>()?;
    if out.is_empty() {
        return Err(Error::invalid("empty topK list"));
    }
    Ok(out)
}

/// `1..=5`, then `10..=50` step 5, `60..=100` step 10, `150..=500` step 50.
pub fn default_pr_grid() -> Vec<usize> {
    (1..=5)
        .chain((10..=50).step_by(5))
        .chain((60..=100).step_by(10))
        .chain((150..=500).step_by(50))
        .collect()
}

/// Parses a cutoff grid: comma-separated items, each `K` or an inclusive
/// range `start:stop:step`. The result is sorted and deduplicated.
pub fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        let nums = item
            .split(':')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad grid item {item:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match nums.as_slice() {
            [k] if *k > 0 => out.push(*k),
            [start, stop, step] if *start > 0 && *step > 0 && start <= stop => {
                out.extend((*start..=*stop).step_by(*step))
            }
            _ => return Err(Error::invalid(format!("bad grid item {item:?}"))),
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    Ok(out)
}

/// Record indices by ascending distance to `query`, ties by ascending index.
pub fn rank_database(query: &BinaryCode, db: &CodeDatabase) -> Result<Vec<usize>> {
    if query.q() != db.q() {
        return Err(Error::dim(format!(
            "query has {} bits, database has {}",
            query.q(),
            db.q()
        )));
    }
    Ok(rank_unchecked(query, db))
}

fn rank_unchecked(query: &BinaryCode, db: &CodeDatabase) -> Vec<usize> {
    // counting sort on distance keeps index order within each bucket
    let dists: Vec<u32> = db.codes().iter().map(|c| hamming_unchecked(query, c)).collect();
    let mut starts = vec![0usize; db.q() + 2];
    for &d in &dists {
        starts[d as usize + 1] += 1;
    }
    for b in 1..starts.len() {
        starts[b] += starts[b - 1];
    }
    let mut order = vec![0usize; dists.len()];
    for (idx, &d) in dists.iter().enumerate() {
        order[starts[d as usize]] = idx;
        starts[d as usize] += 1;
    }
    order
}

/// AP over the first `k` ranked labels, normalized by the relevant items
/// retrieved within those `k`; 0 when none are retrieved.
pub fn average_precision(query_label: u32, ranked_labels: &[u32], k: usize) -> f64 {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, &label) in ranked_labels.iter().take(k).enumerate() {
        if label == query_label {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    if hits == 0 {
        0.0
    } else {
        sum / hits as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    /// Keyed by the requested cutoff (`"100"`, `"all"`, ...).
    pub map_at: BTreeMap<String, f64>,
    /// `(K, mean Precision@K)` over the grid.
    pub precision_curve: Vec<(usize, f64)>,
    /// `(K, mean Recall@K)` over the grid.
    pub recall_curve: Vec<(usize, f64)>,
    /// `(Recall@K, Precision@K)` over the grid.
    pub pr_curve: Vec<(f64, f64)>,
    pub query_count: usize,
}

struct QueryStats {
    ap: Vec<f64>,
    precision: Vec<f64>,
    recall: Vec<f64>,
}

/// Evaluates every query against `db`.
///
/// Cutoffs beyond the database size are clamped to it. A query whose label
/// has no record in `db` gets recall 1.
pub fn evaluate(
    queries: &CodeDatabase,
    db: &CodeDatabase,
    topks: &[TopK],
    grid: &[usize],
) -> Result<EvalReport> {
    if queries.q() != db.q() {
        return Err(Error::dim(format!(
            "queries have {} bits, database has {}",
            queries.q(),
            db.q()
        )));
    }
    if db.is_empty() {
        return Err(Error::invalid("database is empty"));
    }
    if topks.is_empty() {
        return Err(Error::invalid("no topK values requested"));
    }
    let n = db.len();
    let mut relevant_total: HashMap<u32, usize> = HashMap::new();
    for &l in db.labels() {
        *relevant_total.entry(l).or_default() += 1;
    }
    let map_cuts: Vec<usize> = topks.iter().map(|t| t.resolve(n).max(1)).collect();
    let grid_cuts: Vec<usize> = grid.iter().map(|&k| k.clamp(1, n)).collect();

    let per_query: Vec<QueryStats> = queries
        .codes()
        .par_iter()
        .zip(queries.labels().par_iter())
        .map(|(code, &label)| {
            let ranked: Vec<u32> = rank_unchecked(code, db)
                .into_iter()
                .map(|i| db.labels()[i])
                .collect();
            let total = relevant_total.get(&label).copied().unwrap_or(0);
            // prefix hits and prefix sum of precision at each hit
            let mut hits = vec![0usize; n + 1];
            let mut prec_sum = vec![0.0; n + 1];
            for (i, &l) in ranked.iter().enumerate() {
                let rel = l == label;
                hits[i + 1] = hits[i] + usize::from(rel);
                prec_sum[i + 1] = prec_sum[i]
                    + if rel { hits[i + 1] as f64 / (i + 1) as f64 } else { 0.0 };
            }
            QueryStats {
                ap: map_cuts
                    .iter()
                    .map(|&k| if hits[k] == 0 { 0.0 } else { prec_sum[k] / hits[k] as f64 })
                    .collect(),
                precision: grid_cuts.iter().map(|&k| hits[k] as f64 / k as f64).collect(),
                recall: grid_cuts
                    .iter()
                    .map(|&k| if total == 0 { 1.0 } else { hits[k] as f64 / total as f64 })
                    .collect(),
            }
        })
        .collect();

    let count = per_query.len();
    let mean = |pick: &dyn Fn(&QueryStats) -> f64| -> f64 {
        if count == 0 {
            return 0.0;
        }
        // fixed index order keeps the sum independent of thread count
        per_query.iter().map(pick).sum::<f64>() / count as f64
    };
    let mut map_at = BTreeMap::new();
    for (t, topk) in topks.iter().enumerate() {
        map_at.insert(topk.to_string(), mean(&|s| s.ap[t]));
    }
    let precision_curve: Vec<(usize, f64)> = grid
        .iter()
        .enumerate()
        .map(|(g, &k)| (k, mean(&|s| s.precision[g])))
        .collect();
    let recall_curve: Vec<(usize, f64)> = grid
        .iter()
        .enumerate()
        .map(|(g, &k)| (k, mean(&|s| s.recall[g])))
        .collect();
    let pr_curve = recall_curve
        .iter()
        .zip(&precision_curve)
        .map(|(r, p)| (r.1, p.1))
        .collect();
    Ok(EvalReport {
        map_at,
        precision_curve,
        recall_curve,
        pr_curve,
        query_count: count,
    })
}
