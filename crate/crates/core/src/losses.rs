//! Loss kernels for training a hashing network against fixed centers.
//!
//! These operate on plain values: a relaxed code `b0` (e.g. a `tanh` output in
//! `[-1, 1]^q`) and its target center `h`. Autodiff is the trainer's concern.

use crate::code::BinaryCode;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossConfig {
    /// Weight of the quantization term.
    pub gamma: f64,
    /// Probabilities are clamped to `[epsilon, 1 - epsilon]` before the log.
    pub epsilon: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self { gamma: 1e-4, epsilon: 1e-12 }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1e-3) {
            return Err(Error::invalid(format!(
                "epsilon must lie in (0, 1e-3), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// A real-valued code with entries in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxedCode(Vec<f64>);

impl RelaxedCode {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("relaxed code must have at least one entry"));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite() || v.abs() > 1.0) {
            return Err(Error::invalid(format!(
                "entry {j} = {} outside [-1, 1]",
                values[j]
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn q(&self) -> usize {
        self.0.len()
    }
}

/// Binary cross-entropy between `(1 + h) / 2` and `(1 + b0) / 2`, summed over
/// bits and averaged over the batch. Returns 0 for an empty batch.
pub fn central_loss(batch: &[(RelaxedCode, BinaryCode)], cfg: &LossConfig) -> Result<f64> {
    cfg.validate()?;
    if batch.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (n, (b0, h)) in batch.iter().enumerate() {
        if b0.q() != h.q() {
            return Err(Error::dim(format!(
                "item {n}: relaxed code has {} bits, center has {}",
                b0.q(),
                h.q()
            )));
        }
        for (j, &b) in b0.values().iter().enumerate() {
            let p = ((1.0 + b) / 2.0).clamp(cfg.epsilon, 1.0 - cfg.epsilon);
            total -= if h.bit(j) { p.ln() } else { (1.0 - p).ln() };
        }
    }
    Ok(total / batch.len() as f64)
}

/// `sum_i || |b0_i| - 1 ||^2` over the batch.
pub fn quantization_loss(batch: &[RelaxedCode]) -> f64 {
    batch
        .iter()
        .flat_map(|b| b.values())
        .map(|v| {
            let e = v.abs() - 1.0;
            e * e
        })
        .sum()
}

/// `central_loss + gamma * quantization_loss`.
pub fn total_loss(batch: &[(RelaxedCode, BinaryCode)], cfg: &LossConfig) -> Result<f64> {
    let central = central_loss(batch, cfg)?;
    let q: f64 = batch.iter().map(|(b, _)| quantization_loss(std::slice::from_ref(b))).sum();
    Ok(central + cfg.gamma * q)
}
