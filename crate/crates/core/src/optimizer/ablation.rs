//! Semantic-only variant without the distance term.
//!
//! Minimizes the relaxation `||S - H^T M / q||_F^2 + mu ||H - M||_F^2` by
//! alternating two closed forms derived from the normal equations:
//!
//! ```text
//! M-step: (H H^T / q^2 + mu I) M = H (S / q + mu I)
//! H-step: H = sign[(M M^T / q^2 + mu I)^-1 M (S / q + mu I)]
//! ```
//!
//! With `mu = 0` both systems may be singular and a pseudo-inverse is used.

use nalgebra::DMatrix;

use super::init::{init_centers, InitMethod};
use super::{from_matrix, semantic_loss, sign_keep, sim_to_matrix, to_matrix, AlmHyperParams};
use crate::code::{CenterSet, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::gv::compute_min_distance;

#[derive(Clone, Debug, PartialEq)]
pub struct AblationOutcome {
    /// Lowest semantic loss seen over all iterates, including the start.
    pub centers: CenterSet,
    pub initial: CenterSet,
    /// Relaxed objective after each M-step.
    pub relaxed_trace: Vec<f64>,
    /// Semantic loss of `H` after each H-step.
    pub s_loss_trace: Vec<f64>,
    /// Final proxy `M`.
    pub proxy: DMatrix<f64>,
}

/// `||S - H^T M / q||_F^2 + mu ||H - M||_F^2`.
pub fn relaxed_objective(h: &DMatrix<f64>, m: &DMatrix<f64>, s: &DMatrix<f64>, mu: f64) -> f64 {
    let q = h.nrows() as f64;
    (s - h.transpose() * m / q).norm_squared() + mu * (h - m).norm_squared()
}

/// Starts from the greedy initialization at the bound distance for `(q, C)`.
pub fn ablation_optimize(
    sim: &SimilarityMatrix,
    q: usize,
    hp: &AlmHyperParams,
    seed: u64,
) -> Result<AblationOutcome> {
    let c = sim.num_classes();
    let d = compute_min_distance(q, c)?;
    let start = init_centers(q, c, d, seed, InitMethod::Greedy)?;
    ablation_optimize_from(sim, &start.centers, hp)
}

pub fn ablation_optimize_from(
    sim: &SimilarityMatrix,
    initial: &CenterSet,
    hp: &AlmHyperParams,
) -> Result<AblationOutcome> {
    if !(hp.mu >= 0.0 && hp.mu.is_finite()) || hp.cycles == 0 {
        return Err(Error::invalid("ablation needs a finite mu >= 0 and at least one cycle"));
    }
    if initial.num_classes() != sim.num_classes() {
        return Err(Error::dim(format!(
            "{} initial centers for a {}-class similarity matrix",
            initial.num_classes(),
            sim.num_classes()
        )));
    }
    let s = sim_to_matrix(sim);
    let q = initial.q() as f64;
    let c = initial.num_classes();
    let target = &s / q + DMatrix::identity(c, c) * hp.mu;

    let mut h = to_matrix(initial);
    let mut m = h.clone();
    let mut best = (semantic_loss(&h, &s), h.clone());
    let mut relaxed_trace = Vec::with_capacity(hp.cycles);
    let mut s_loss_trace = Vec::with_capacity(hp.cycles);
    for _ in 0..hp.cycles {
        m = ridge_solve(&h, &(&h * &target), hp.mu)?;
        relaxed_trace.push(relaxed_objective(&h, &m, &s, hp.mu));

        let real = ridge_solve(&m, &(&m * &target), hp.mu)?;
        h.zip_apply(&real, |cur, r| *cur = sign_keep(r, *cur));
        let loss = semantic_loss(&h, &s);
        s_loss_trace.push(loss);
        if loss < best.0 {
            best = (loss, h.clone());
        }
    }
    Ok(AblationOutcome {
        centers: from_matrix(&best.1)?,
        initial: initial.clone(),
        relaxed_trace,
        s_loss_trace,
        proxy: m,
    })
}

/// Solves `(X X^T / q^2 + mu I) Y = rhs` for `Y`, with `q = rows(X)`.
fn ridge_solve(x: &DMatrix<f64>, rhs: &DMatrix<f64>, mu: f64) -> Result<DMatrix<f64>> {
    let q = x.nrows() as f64;
    let a = x * x.transpose() / (q * q) + DMatrix::identity(x.nrows(), x.nrows()) * mu;
    if mu > 0.0 {
        if let Some(chol) = a.clone().cholesky() {
            return Ok(chol.solve(rhs));
        }
    }
    let pinv = a
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::Solve(format!("pseudo-inverse failed: {e}")))?;
    Ok(pinv * rhs)
}
