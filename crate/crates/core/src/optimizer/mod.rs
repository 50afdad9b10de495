//! Semantic hash center generation.
//!
//! The centers `H` (one `{-1,+1}^q` column per class) minimize
//!
//! ```text
//! ||S - H^T H / q||_F^2 + mu * sum_{i != j} h_i^T h_j
//! subject to h_i^T h_j <= q - 2d  for all i != j
//! ```
//!
//! solved with an augmented Lagrangian over a real proxy `M` of `H`, slack
//! variables `K` and multipliers `Lambda`, `alpha`; see [`alm`]. Columns of
//! `H` are updated by sign-projected gradient steps.

mod ablation;
mod alm;
mod init;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::code::{BinaryCode, CenterSet, SimilarityMatrix};
use crate::error::{Error, Result};

pub use ablation::{ablation_optimize, ablation_optimize_from, relaxed_objective, AblationOutcome};
pub use alm::{optimize, optimize_from, AlmState, Optimization};
pub use init::{init_centers, Initialization, InitMethod, CANDIDATES_PER_SLOT};

/// Hyperparameters of the alternating ALM procedure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlmHyperParams {
    /// Weight of the distance term `sum_{i != j} h_i^T h_j`.
    pub mu: f64,
    /// Penalty on `h_i - m_i`.
    pub rho: f64,
    /// Penalty on the distance-constraint residuals.
    pub beta: f64,
    /// Step divisor of the sign-projected gradient update.
    pub eta: f64,
    /// Outer cycles.
    pub cycles: usize,
    /// Gradient steps per column and cycle.
    pub inner: usize,
    /// Initial value of every entry of `Lambda`.
    pub lambda_init: f64,
}

impl Default for AlmHyperParams {
    fn default() -> Self {
        Self {
            mu: 0.625,
            rho: 0.2,
            beta: 1e-6,
            eta: 0.5,
            cycles: 20,
            inner: 3,
            lambda_init: 0.1,
        }
    }
}

impl AlmHyperParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.mu, self.rho, self.beta, self.eta, self.lambda_init]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("hyperparameters must be finite"));
        }
        if self.mu < 0.0 {
            return Err(Error::invalid(format!("mu must be >= 0, got {}", self.mu)));
        }
        for (name, v) in [("rho", self.rho), ("beta", self.beta), ("eta", self.eta)] {
            if v <= 0.0 {
                return Err(Error::invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.cycles == 0 || self.inner == 0 {
            return Err(Error::invalid("cycles and inner must be at least 1"));
        }
        Ok(())
    }
}

/// Minimum pairwise distance and semantic loss of a center set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QualityMetrics {
    /// `None` when there are fewer than two centers.
    #[serde(serialize_with = "serialize_d_min")]
    pub d_min: Option<u32>,
    pub s_loss: f64,
}

fn serialize_d_min<S: Serializer>(d: &Option<u32>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match d {
        Some(v) => s.serialize_u32(*v),
        None => s.serialize_str("undefined"),
    }
}

pub fn quality_metrics(centers: &CenterSet, sim: &SimilarityMatrix) -> Result<QualityMetrics> {
    check_classes(centers, sim)?;
    Ok(QualityMetrics {
        d_min: centers.min_distance(),
        s_loss: semantic_loss(&to_matrix(centers), &sim_to_matrix(sim)),
    })
}

/// `||S - H^T H / q||_F^2 + mu * sum_{i != j} h_i^T h_j` for a binary `H`.
pub fn constrained_objective(centers: &CenterSet, sim: &SimilarityMatrix, mu: f64) -> Result<f64> {
    check_classes(centers, sim)?;
    let h = to_matrix(centers);
    Ok(semantic_loss(&h, &sim_to_matrix(sim)) + mu * distance_term(&h))
}

fn check_classes(centers: &CenterSet, sim: &SimilarityMatrix) -> Result<()> {
    if centers.num_classes() != sim.num_classes() {
        return Err(Error::dim(format!(
            "{} centers but a {}-class similarity matrix",
            centers.num_classes(),
            sim.num_classes()
        )));
    }
    Ok(())
}

pub(crate) fn semantic_loss(h: &DMatrix<f64>, s: &DMatrix<f64>) -> f64 {
    let q = h.nrows() as f64;
    let gram = h.transpose() * h;
    (s - gram / q).norm_squared()
}

/// `sum_{i != j} h_i^T h_j`.
pub(crate) fn distance_term(h: &DMatrix<f64>) -> f64 {
    let gram = h.transpose() * h;
    gram.sum() - gram.trace()
}

/// `q x C` matrix with the `{-1, +1}` centers as columns.
pub fn to_matrix(centers: &CenterSet) -> DMatrix<f64> {
    DMatrix::from_fn(centers.q(), centers.num_classes(), |r, c| {
        f64::from(centers.get(c).sign(r))
    })
}

/// Inverse of [`to_matrix`]; every entry must be exactly `-1` or `+1`.
pub fn from_matrix(h: &DMatrix<f64>) -> Result<CenterSet> {
    let centers = h
        .column_iter()
        .map(|col| BinaryCode::from_f64(col.as_slice()))
        .collect::<Result<Vec<_>>>()?;
    CenterSet::new(centers)
}

pub fn sim_to_matrix(sim: &SimilarityMatrix) -> DMatrix<f64> {
    let n = sim.num_classes();
    DMatrix::from_row_slice(n, n, sim.values())
}

/// Elementwise sign where a zero argument keeps the previous value.
pub(crate) fn sign_keep(arg: f64, previous: f64) -> f64 {
    if arg > 0.0 {
        1.0
    } else if arg < 0.0 {
        -1.0
    } else {
        previous
    }
}
