//! Class-level similarity matrices.
//!
//! The data-dependent route starts from per-image classifier logits. Each
//! image's logit vector is softmaxed with one class masked out, the masked
//! probability vectors are averaged within each ground-truth class, every
//! averaged row is centered and scaled to max-abs 1, and the stacked rows are
//! symmetrized with the diagonal forced to 1.
//!
//! The alternative route takes one embedding vector per class and uses pairwise
//! cosine similarity.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::code::SimilarityMatrix;
use crate::error::{Error, Result};

/// Tolerance for validating symmetry and the unit diagonal when reading a matrix file.
pub const READ_TOLERANCE: f64 = 1e-9;

/// One classified image: its ground-truth label and raw logits over all classes.
#[derive(Clone, Debug, PartialEq)]
pub struct LogitRecord {
    pub image_id: String,
    pub label: usize,
    pub logits: Vec<f64>,
}

/// Which entry of an image's logits is masked before the softmax.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MaskMode {
    /// Mask the record's ground-truth class.
    #[default]
    GroundTruth,
    /// Mask the predicted class (argmax of the logits, lowest index on ties).
    Argmax,
}

/// One real vector per class, all of the same dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid("embedding table needs at least one class"))?;
        if dim == 0 {
            return Err(Error::invalid("embedding dimension must be at least 1"));
        }
        for (c, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::dim(format!(
                    "embedding {c} has dimension {}, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("embedding {c} has a non-finite entry")));
            }
            if row.iter().all(|&v| v == 0.0) {
                return Err(Error::Degenerate(format!("embedding {c} has zero norm")));
            }
        }
        Ok(Self { dim, rows })
    }

    pub fn num_classes(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// Softmax of `logits` with the entry at `masked` excluded; that entry is exactly 0.
pub fn masked_softmax(logits: &[f64], masked: usize) -> Result<Vec<f64>> {
    let c = logits.len();
    if masked >= c {
        return Err(Error::invalid(format!(
            "masked class {masked} out of range for {c} classes"
        )));
    }
    if c < 2 {
        return Err(Error::Degenerate(
            "masking leaves no entries to normalize".into(),
        ));
    }
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("logits must be finite"));
    }
    let max = logits
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != masked)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits
        .iter()
        .enumerate()
        .map(|(k, &v)| if k == masked { 0.0 } else { (v - max).exp() })
        .collect();
    let total: f64 = out.iter().sum();
    for v in &mut out {
        *v /= total;
    }
    Ok(out)
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// Mean masked-softmax vector per ground-truth class.
pub fn class_similarity_rows(
    records: &[LogitRecord],
    classes: usize,
    mode: MaskMode,
) -> Result<Vec<Vec<f64>>> {
    let mut sums = vec![vec![0.0; classes]; classes];
    let mut counts = vec![0usize; classes];
    for (n, rec) in records.iter().enumerate() {
        if rec.label >= classes {
            return Err(Error::invalid(format!(
                "record {n} ({}) has label {} but only {classes} classes",
                rec.image_id, rec.label
            )));
        }
        if rec.logits.len() != classes {
            return Err(Error::dim(format!(
                "record {n} ({}) has {} logits, expected {classes}",
                rec.image_id,
                rec.logits.len()
            )));
        }
        let masked = match mode {
            MaskMode::GroundTruth => rec.label,
            MaskMode::Argmax => argmax(&rec.logits),
        };
        let p = masked_softmax(&rec.logits, masked)?;
        for (acc, v) in sums[rec.label].iter_mut().zip(p) {
            *acc += v;
        }
        counts[rec.label] += 1;
    }
    let missing: Vec<usize> = (0..classes).filter(|&m| counts[m] == 0).collect();
    if !missing.is_empty() {
        return Err(Error::MissingClasses(missing));
    }
    for (row, &n) in sums.iter_mut().zip(&counts) {
        for v in row.iter_mut() {
            *v /= n as f64;
        }
    }
    Ok(sums)
}

/// Centers a row on its mean and divides by the largest absolute deviation.
pub fn normalize_row(row: &[f64]) -> Result<Vec<f64>> {
    if row.is_empty() {
        return Err(Error::Degenerate("empty row".into()));
    }
    let mean = row.iter().sum::<f64>() / row.len() as f64;
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = row.iter().copied().fold(f64::INFINITY, f64::min);
    if max == min {
        return Err(Error::Degenerate("constant row cannot be normalized".into()));
    }
    let scale = (max - mean).abs().max((min - mean).abs());
    Ok(row
        .iter()
        .map(|&v| ((v - mean) / scale).clamp(-1.0, 1.0))
        .collect())
}

/// `(R + R^T) / 2` with the diagonal set to 1.
pub fn symmetrize_and_unit_diag(rows: &[Vec<f64>]) -> Result<SimilarityMatrix> {
    let n = rows.len();
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::dim(format!(
            "row {i} has {} entries in a {n}-row matrix",
            rows[i].len()
        )));
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = 0.5 * (rows[i][j] + rows[j][i]);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    SimilarityMatrix::new(n, values)
}

/// Full logits-to-matrix pipeline.
pub fn build_similarity(
    records: &[LogitRecord],
    classes: usize,
    mode: MaskMode,
) -> Result<SimilarityMatrix> {
    let rows = class_similarity_rows(records, classes, mode)?;
    let normalized = rows
        .iter()
        .enumerate()
        .map(|(m, r)| {
            normalize_row(r).map_err(|e| match e {
                Error::Degenerate(msg) => Error::Degenerate(format!("class {m}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    symmetrize_and_unit_diag(&normalized)
}

/// Pairwise cosine similarity of class embeddings; diagonal forced to 1.
pub fn cosine_similarity_matrix(emb: &EmbeddingTable) -> Result<SimilarityMatrix> {
    let n = emb.num_classes();
    let norms: Vec<f64> = emb
        .rows()
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let dot: f64 = emb.rows()[i].iter().zip(&emb.rows()[j]).map(|(a, b)| a * b).sum();
            let v = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    SimilarityMatrix::new(n, values)
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| Error::format(format!("line {line}: cannot parse {tok:?} as a number")))?;
    if !v.is_finite() {
        return Err(Error::format(format!("line {line}: non-finite value {tok:?}")));
    }
    Ok(v)
}

fn parse_header_field(field: &str, key: &str, line: usize) -> Result<usize> {
    let (k, v) = field
        .trim()
        .split_once('=')
        .ok_or_else(|| Error::format(format!("line {line}: expected `{key}=<int>`")))?;
    if k.trim() != key {
        return Err(Error::format(format!("line {line}: expected `{key}=<int>`, got {field:?}")));
    }
    v.trim()
        .parse()
        .map_err(|_| Error::format(format!("line {line}: bad integer for {key}: {v:?}")))
}

/// Non-empty lines with their 1-based line numbers.
fn content_lines<R: BufRead>(source: R) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

/// Reads a logits file: `C=<int>` then `id,label,logit_0,...,logit_{C-1}` per line.
pub fn read_logits<R: BufRead>(source: R) -> Result<(usize, Vec<LogitRecord>)> {
    let lines = content_lines(source)?;
    let ((first_no, header), rest) = lines
        .split_first()
        .ok_or_else(|| Error::format("empty logits file"))?;
    let classes = parse_header_field(header, "C", *first_no)?;
    if classes == 0 {
        return Err(Error::format("C must be at least 1"));
    }
    let mut records = Vec::with_capacity(rest.len());
    for (no, line) in rest {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != classes + 2 {
            return Err(Error::format(format!(
                "line {no}: expected {} fields, got {}",
                classes + 2,
                fields.len()
            )));
        }
        let label: usize = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::format(format!("line {no}: bad label {:?}", fields[1])))?;
        if label >= classes {
            return Err(Error::invalid(format!(
                "line {no}: label {label} out of range for {classes} classes"
            )));
        }
        let logits = fields[2..]
            .iter()
            .map(|t| parse_f64(t, *no))
            .collect::<Result<Vec<_>>>()?;
        records.push(LogitRecord {
            image_id: fields[0].trim().to_string(),
            label,
            logits,
        });
    }
    Ok((classes, records))
}

/// Reads an embeddings file: `C=<int>,D=<int>` then C lines of D reals.
pub fn read_embeddings<R: BufRead>(source: R) -> Result<EmbeddingTable> {
    let lines = content_lines(source)?;
    let ((first_no, header), rest) = lines
        .split_first()
        .ok_or_else(|| Error::format("empty embeddings file"))?;
    let (cf, df) = header
        .split_once(',')
        .ok_or_else(|| Error::format(format!("line {first_no}: expected `C=<int>,D=<int>`")))?;
    let classes = parse_header_field(cf, "C", *first_no)?;
    let dim = parse_header_field(df, "D", *first_no)?;
    if rest.len() != classes {
        return Err(Error::format(format!(
            "expected {classes} embedding rows, found {}",
            rest.len()
        )));
    }
    let rows = rest
        .iter()
        .map(|(no, line)| {
            let row = line
                .split(',')
                .map(|t| parse_f64(t, *no))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != dim {
                return Err(Error::format(format!(
                    "line {no}: expected {dim} values, got {}",
                    row.len()
                )));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    EmbeddingTable::new(rows)
}

/// Reads a similarity matrix file, validating symmetry and the diagonal
/// within [`READ_TOLERANCE`] and snapping both exactly.
pub fn read_similarity<R: BufRead>(source: R) -> Result<SimilarityMatrix> {
    let lines = content_lines(source)?;
    let ((first_no, header), rest) = lines
        .split_first()
        .ok_or_else(|| Error::format("empty similarity file"))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::format(format!("line {first_no}: expected class count, got {header:?}")))?;
    if n == 0 {
        return Err(Error::format("class count must be at least 1"));
    }
    if rest.len() != n {
        return Err(Error::format(format!("expected {n} rows, found {}", rest.len())));
    }
    let rows = rest
        .iter()
        .map(|(no, line)| {
            let row = line
                .split(',')
                .map(|t| parse_f64(t, *no))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::format(format!(
                    "line {no}: expected {n} values, got {}",
                    row.len()
                )));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    SimilarityMatrix::from_rows_snapped(&rows, READ_TOLERANCE)
}

/// Writes a similarity matrix with shortest round-trip float formatting.
pub fn write_similarity<W: Write>(sim: &SimilarityMatrix, mut sink: W) -> Result<()> {
    let n = sim.num_classes();
    let mut buf = format!("{n}\n");
    for i in 0..n {
        for (j, v) in sim.row(i).iter().enumerate() {
            if j > 0 {
                buf.push(',');
            }
            write!(buf, "{v:?}").expect("writing to a String cannot fail");
        }
        buf.push('\n');
    }
    sink.write_all(buf.as_bytes())?;
    sink.flush()?;
    Ok(())
}
