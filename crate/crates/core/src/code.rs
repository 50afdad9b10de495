//! Binary codewords and the containers built on top of them.
//!
//! A [`BinaryCode`] is semantically a vector over `{-1, +1}`; it is stored
//! bit-packed (`1` for `+1`, `0` for `-1`) in 64-bit words so that Hamming
//! distance is a popcount over XOR'ed words. Unused high bits of the last word
//! are always zero.

use rand::Rng;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinaryCode {
    words: Vec<u64>,
    q: usize,
}

impl BinaryCode {
    /// Builds a code of length `q` where `bit(j)` is `true` for `+1`.
    pub fn from_fn(q: usize, mut bit: impl FnMut(usize) -> bool) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("code length must be at least 1"));
        }
        let mut words = vec![0u64; q.div_ceil(WORD_BITS)];
        for j in 0..q {
            if bit(j) {
                words[j / WORD_BITS] |= 1 << (j % WORD_BITS);
            }
        }
        Ok(Self { words, q })
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        Self::from_fn(bits.len(), |j| bits[j])
    }

    /// Builds a code from a `{-1, +1}` vector. Any other value is rejected.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        if let Some(j) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::invalid(format!(
                "entry {j} is {}, expected -1 or +1",
                signs[j]
            )));
        }
        Self::from_fn(signs.len(), |j| signs[j] > 0)
    }

    /// Builds a code from real values that must each be exactly `-1.0` or `+1.0`.
    pub fn from_f64(values: &[f64]) -> Result<Self> {
        if let Some(j) = values.iter().position(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::invalid(format!(
                "entry {j} is {}, expected -1 or +1",
                values[j]
            )));
        }
        Self::from_fn(values.len(), |j| values[j] > 0.0)
    }

    /// The all `+1` code.
    pub fn ones(q: usize) -> Result<Self> {
        Self::from_fn(q, |_| true)
    }

    pub fn random<R: Rng + ?Sized>(q: usize, rng: &mut R) -> Result<Self> {
        Self::from_fn(q, |_| rng.random::<bool>())
    }

    /// Code length in bits.
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn bit(&self, j: usize) -> bool {
        assert!(j < self.q, "bit index {j} out of range for q={}", self.q);
        (self.words[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    pub fn sign(&self, j: usize) -> i8 {
        if self.bit(j) {
            1
        } else {
            -1
        }
    }

    pub fn set(&mut self, j: usize, positive: bool) {
        assert!(j < self.q, "bit index {j} out of range for q={}", self.q);
        let mask = 1u64 << (j % WORD_BITS);
        if positive {
            self.words[j / WORD_BITS] |= mask;
        } else {
            self.words[j / WORD_BITS] &= !mask;
        }
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_padding();
        out
    }

    pub fn to_signs(&self) -> Vec<i8> {
        (0..self.q).map(|j| self.sign(j)).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.q).map(|j| f64::from(self.sign(j))).collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn clear_padding(&mut self) {
        let used = self.q % WORD_BITS;
        if used != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << used) - 1;
        }
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::dim(format!(
                "code lengths differ: {} vs {}",
                self.q, other.q
            )));
        }
        Ok(())
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming_distance(a: &BinaryCode, b: &BinaryCode) -> Result<u32> {
    a.check_len(b)?;
    Ok(hamming_unchecked(a, b))
}

/// `Σ a_j b_j` over the `{-1, +1}` view; always equals `q - 2 * hamming`.
pub fn inner_product(a: &BinaryCode, b: &BinaryCode) -> Result<i64> {
    a.check_len(b)?;
    Ok(a.q as i64 - 2 * i64::from(hamming_unchecked(a, b)))
}

#[inline]
pub(crate) fn hamming_unchecked(a: &BinaryCode, b: &BinaryCode) -> u32 {
    a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones())
        .sum()
}

/// One codeword per class, all of the same length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CenterSet {
    q: usize,
    centers: Vec<BinaryCode>,
}

impl CenterSet {
    pub fn new(centers: Vec<BinaryCode>) -> Result<Self> {
        let first = centers
            .first()
            .ok_or_else(|| Error::invalid("a center set needs at least one class"))?;
        let q = first.q();
        if let Some(i) = centers.iter().position(|c| c.q() != q) {
            return Err(Error::dim(format!(
                "center {i} has length {}, expected {q}",
                centers[i].q()
            )));
        }
        Ok(Self { q, centers })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn num_classes(&self) -> usize {
        self.centers.len()
    }

    pub fn get(&self, class: usize) -> &BinaryCode {
        &self.centers[class]
    }

    pub fn centers(&self) -> &[BinaryCode] {
        &self.centers
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BinaryCode> {
        self.centers.iter()
    }

    pub fn into_centers(self) -> Vec<BinaryCode> {
        self.centers
    }

    /// Smallest pairwise Hamming distance, or `None` with fewer than two centers.
    pub fn min_distance(&self) -> Option<u32> {
        let mut best = None;
        for i in 0..self.centers.len() {
            for j in (i + 1)..self.centers.len() {
                let d = hamming_unchecked(&self.centers[i], &self.centers[j]);
                best = Some(best.map_or(d, |b: u32| b.min(d)));
            }
        }
        best
    }

    /// Unordered pairs `(i, j, distance)` with `i < j` and distance below `d`.
    pub fn violations(&self, d: u32) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.centers.len() {
            for j in (i + 1)..self.centers.len() {
                let dist = hamming_unchecked(&self.centers[i], &self.centers[j]);
                if dist < d {
                    out.push((i, j, dist));
                }
            }
        }
        out
    }
}

/// Symmetric `C x C` similarity matrix with unit diagonal and entries in `[-1, 1]`.
#[derive(Clone, PartialEq, Debug)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Strict constructor: symmetry and the unit diagonal must hold exactly.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        Self::check_shape(n, &values)?;
        for i in 0..n {
            if values[i * n + i] != 1.0 {
                return Err(Error::invalid(format!(
                    "diagonal entry ({i},{i}) is {}, expected 1",
                    values[i * n + i]
                )));
            }
            for j in (i + 1)..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::invalid(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Self::check_range(n, &values)?;
        Ok(Self { n, values })
    }

    /// Accepts a matrix that is symmetric with unit diagonal up to `tol`,
    /// then snaps it: off-diagonal pairs are averaged and the diagonal set to 1.
    pub fn from_rows_snapped(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::dim(format!(
                "row {i} has {} entries, expected {n}",
                rows[i].len()
            )));
        }
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            if (rows[i][i] - 1.0).abs() > tol {
                return Err(Error::invalid(format!(
                    "diagonal entry ({i},{i}) is {}, expected 1",
                    rows[i][i]
                )));
            }
            values[i * n + i] = 1.0;
            for j in (i + 1)..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > tol {
                    return Err(Error::invalid(format!(
                        "entries ({i},{j})={a} and ({j},{i})={b} are not symmetric"
                    )));
                }
                let v = (0.5 * (a + b)).clamp(-1.0, 1.0);
                if (0.5 * (a + b)).abs() > 1.0 + tol {
                    return Err(Error::invalid(format!("entry ({i},{j}) outside [-1, 1]")));
                }
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self::new(n, values)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
        }
        Self::new(n, values)
    }

    fn check_shape(n: usize, values: &[f64]) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("similarity matrix needs at least one class"));
        }
        if values.len() != n * n {
            return Err(Error::dim(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(())
    }

    fn check_range(n: usize, values: &[f64]) -> Result<()> {
        if let Some(k) = values.iter().position(|v| !v.is_finite() || v.abs() > 1.0) {
            return Err(Error::invalid(format!(
                "entry ({},{}) = {} outside [-1, 1]",
                k / n,
                k % n,
                values[k]
            )));
        }
        Ok(())
    }

    pub fn num_classes(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Row-major entries.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A labeled collection of equal-length binary codes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CodeDatabase {
    q: usize,
    labels: Vec<u32>,
    codes: Vec<BinaryCode>,
}

impl CodeDatabase {
    pub fn new(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("code length must be at least 1"));
        }
        Ok(Self {
            q,
            labels: Vec::new(),
            codes: Vec::new(),
        })
    }

    pub fn from_records(q: usize, records: impl IntoIterator<Item = (u32, BinaryCode)>) -> Result<Self> {
        let mut db = Self::new(q)?;
        for (label, code) in records {
            db.push(label, code)?;
        }
        Ok(db)
    }

    pub fn push(&mut self, label: u32, code: BinaryCode) -> Result<()> {
        if code.q() != self.q {
            return Err(Error::dim(format!(
                "record {} has length {}, expected {}",
                self.codes.len(),
                code.q(),
                self.q
            )));
        }
        self.labels.push(label);
        self.codes.push(code);
        Ok(())
    }

    /// Checks that every label is a valid class id for `classes` classes.
    pub fn validate_labels(&self, classes: usize) -> Result<()> {
        if let Some(i) = self.labels.iter().position(|&l| l as usize >= classes) {
            return Err(Error::invalid(format!(
                "record {i} has label {} but only {classes} classes are declared",
                self.labels[i]
            )));
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn codes(&self) -> &[BinaryCode] {
        &self.codes
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &BinaryCode)> {
        self.labels.iter().copied().zip(&self.codes)
    }
}
