//! Augmented Lagrangian alternating minimization.
//!
//! The Lagrangian over `(H, M, K, Lambda, alpha)` is
//!
//! ```text
//! L = ||S - H^T M / q||_F^2 + mu * sum_{i != j} h_i^T h_j
//!   + sum_i lambda_i^T (h_i - m_i) + rho/2 * sum_i ||h_i - m_i||^2
//!   + sum_{i != j} alpha_ij r_ij + beta/2 * sum_{i != j} r_ij^2
//! r_ij = q - 2d - h_i^T h_j - k_ij
//! ```
//!
//! Each cycle solves for `M` in closed form, clamps `K`, then sweeps the
//! columns: a few sign-projected gradient steps on `h_i` followed by ascent on
//! `lambda_i` and the row `alpha_i.`. Column updates are Gauss-Seidel.

use nalgebra::{DMatrix, DVector};

use super::init::{init_centers, InitMethod};
use super::{
    distance_term, from_matrix, semantic_loss, sign_keep, sim_to_matrix, to_matrix,
    AlmHyperParams,
};
use crate::code::{CenterSet, SimilarityMatrix};
use crate::error::{Error, Result};

/// Full variable set of one ALM run.
#[derive(Clone, Debug, PartialEq)]
pub struct AlmState {
    /// `q x C`, entries in `{-1, +1}`.
    pub h: DMatrix<f64>,
    /// `q x C` real proxy of `h`.
    pub m: DMatrix<f64>,
    /// `C x C` slack, off-diagonal `>= 0`, diagonal unused (0).
    pub k: DMatrix<f64>,
    /// `q x C` multipliers of `h = m`.
    pub lambda: DMatrix<f64>,
    /// `C x C` multipliers of the distance constraints, diagonal unused (0).
    pub alpha: DMatrix<f64>,
    /// Minimum-distance target.
    pub d: usize,
}

impl AlmState {
    /// Starts from `centers` with `M = H`, `K = 0`, `alpha = 0` and
    /// `Lambda` filled with `lambda_init`.
    pub fn new(centers: &CenterSet, d: usize, lambda_init: f64) -> Self {
        let h = to_matrix(centers);
        let (q, c) = h.shape();
        Self {
            m: h.clone(),
            h,
            k: DMatrix::zeros(c, c),
            lambda: DMatrix::from_element(q, c, lambda_init),
            alpha: DMatrix::zeros(c, c),
            d,
        }
    }

    pub fn q(&self) -> usize {
        self.h.nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.h.ncols()
    }

    pub fn centers(&self) -> Result<CenterSet> {
        from_matrix(&self.h)
    }

    fn check(&self, s: &DMatrix<f64>) -> Result<()> {
        let (q, c) = self.h.shape();
        let ok = self.m.shape() == (q, c)
            && self.lambda.shape() == (q, c)
            && self.k.shape() == (c, c)
            && self.alpha.shape() == (c, c)
            && s.shape() == (c, c);
        if !ok {
            return Err(Error::dim(format!(
                "inconsistent state: H {:?}, M {:?}, Lambda {:?}, K {:?}, alpha {:?}, S {:?}",
                self.h.shape(),
                self.m.shape(),
                self.lambda.shape(),
                self.k.shape(),
                self.alpha.shape(),
                s.shape()
            )));
        }
        Ok(())
    }

    /// `q - 2d`, the largest allowed inner product between two centers.
    fn bound(&self) -> f64 {
        self.q() as f64 - 2.0 * self.d as f64
    }

    /// Value of the augmented Lagrangian.
    pub fn objective(&self, sim: &SimilarityMatrix, hp: &AlmHyperParams) -> Result<f64> {
        let s = sim_to_matrix(sim);
        self.check(&s)?;
        Ok(self.objective_raw(&s, hp))
    }

    fn objective_raw(&self, s: &DMatrix<f64>, hp: &AlmHyperParams) -> f64 {
        let q = self.q() as f64;
        let c = self.num_classes();
        let fit = (s - self.h.transpose() * &self.m / q).norm_squared();
        let gram = self.h.transpose() * &self.h;
        let diff = &self.h - &self.m;
        let mut total = fit
            + hp.mu * (gram.sum() - gram.trace())
            + self.lambda.component_mul(&diff).sum()
            + 0.5 * hp.rho * diff.norm_squared();
        let bound = self.bound();
        for i in 0..c {
            for j in 0..c {
                if i != j {
                    let r = bound - gram[(i, j)] - self.k[(i, j)];
                    total += self.alpha[(i, j)] * r + 0.5 * hp.beta * r * r;
                }
            }
        }
        total
    }

    /// Gradient of [`AlmState::objective`] with respect to column `h_i`,
    /// treating it as a real vector with everything else fixed.
    pub fn center_gradient(
        &self,
        sim: &SimilarityMatrix,
        hp: &AlmHyperParams,
        i: usize,
    ) -> Result<DVector<f64>> {
        let s = sim_to_matrix(sim);
        self.check(&s)?;
        if i >= self.num_classes() {
            return Err(Error::invalid(format!("class {i} out of range")));
        }
        Ok(self.gradient_raw(&s, hp, i))
    }

    fn gradient_raw(&self, s: &DMatrix<f64>, hp: &AlmHyperParams, i: usize) -> DVector<f64> {
        let q = self.q() as f64;
        let hi = self.h.column(i);
        // fit term: row i of S against H^T M
        let fit_resid: DVector<f64> = self.m.tr_mul(&hi) / q - s.row(i).transpose();
        let mut grad = &self.m * fit_resid * (2.0 / q);
        grad += self.lambda.column(i);
        grad += (hi - self.m.column(i)) * hp.rho;
        let bound = self.bound();
        for j in 0..self.num_classes() {
            if j == i {
                continue;
            }
            let hj = self.h.column(j);
            let ip = hi.dot(&hj);
            let r_ij = bound - ip - self.k[(i, j)];
            let r_ji = bound - ip - self.k[(j, i)];
            // mu term counts the pair twice; alpha/beta terms see (i,j) and (j,i)
            let coeff = 2.0 * hp.mu
                - (self.alpha[(i, j)] + self.alpha[(j, i)])
                - hp.beta * (r_ij + r_ji);
            grad.axpy(coeff, &hj, 1.0);
        }
        grad
    }

    /// Closed-form minimization over every column of `M`:
    /// `(2/q^2 H H^T + rho I) m_i = 2/q H s_i + lambda_i + rho h_i`.
    pub fn update_proxy(&mut self, sim: &SimilarityMatrix, hp: &AlmHyperParams) -> Result<()> {
        let s = sim_to_matrix(sim);
        self.check(&s)?;
        self.update_proxy_raw(&s, hp)
    }

    fn update_proxy_raw(&mut self, s: &DMatrix<f64>, hp: &AlmHyperParams) -> Result<()> {
        let (a, b) = proxy_system(&self.h, &self.lambda, s, hp.rho);
        let chol = a
            .cholesky()
            .ok_or_else(|| Error::Solve("proxy system is not positive definite".into()))?;
        self.m = chol.solve(&b);
        Ok(())
    }

    /// `k_ij = max(q - 2d - h_i^T h_j + alpha_ij / beta, 0)` for `i != j`.
    pub fn update_slack(&mut self, hp: &AlmHyperParams) {
        let gram = self.h.transpose() * &self.h;
        let bound = self.bound();
        let c = self.num_classes();
        for i in 0..c {
            for j in 0..c {
                self.k[(i, j)] = if i == j {
                    0.0
                } else {
                    (bound - gram[(i, j)] + self.alpha[(i, j)] / hp.beta).max(0.0)
                };
            }
        }
    }

    /// `inner` steps of `h_i <- sign(h_i - grad / eta)`; a zero argument keeps the bit.
    pub fn update_center(
        &mut self,
        sim: &SimilarityMatrix,
        hp: &AlmHyperParams,
        i: usize,
    ) -> Result<()> {
        let s = sim_to_matrix(sim);
        self.check(&s)?;
        if i >= self.num_classes() {
            return Err(Error::invalid(format!("class {i} out of range")));
        }
        self.update_center_raw(&s, hp, i);
        Ok(())
    }

    fn update_center_raw(&mut self, s: &DMatrix<f64>, hp: &AlmHyperParams, i: usize) {
        for _ in 0..hp.inner {
            let grad = self.gradient_raw(s, hp, i);
            self.project_step(&grad, hp.eta, i);
        }
    }

    /// One sign-projected step on column `i` with an explicit gradient.
    pub fn project_step(&mut self, grad: &DVector<f64>, eta: f64, i: usize) {
        let mut col = self.h.column_mut(i);
        for (h, g) in col.iter_mut().zip(grad.iter()) {
            *h = sign_keep(*h - g / eta, *h);
        }
    }

    /// `lambda_i += rho (h_i - m_i)` and `alpha_ij += beta r_ij` for `j != i`.
    pub fn update_multipliers(&mut self, hp: &AlmHyperParams, i: usize) {
        let step = (self.h.column(i) - self.m.column(i)) * hp.rho;
        let mut li = self.lambda.column_mut(i);
        li += step;
        let bound = self.bound();
        for j in 0..self.num_classes() {
            if j != i {
                let ip = self.h.column(i).dot(&self.h.column(j));
                self.alpha[(i, j)] += hp.beta * (bound - ip - self.k[(i, j)]);
            }
        }
    }

    /// One outer cycle: proxy, slack, then a Gauss-Seidel sweep over columns.
    pub fn cycle(&mut self, sim: &SimilarityMatrix, hp: &AlmHyperParams) -> Result<()> {
        let s = sim_to_matrix(sim);
        self.check(&s)?;
        self.cycle_raw(&s, hp)
    }

    fn cycle_raw(&mut self, s: &DMatrix<f64>, hp: &AlmHyperParams) -> Result<()> {
        self.update_proxy_raw(s, hp)?;
        self.update_slack(hp);
        for i in 0..self.num_classes() {
            self.update_center_raw(s, hp, i);
            self.update_multipliers(hp, i);
        }
        Ok(())
    }
}

/// System matrix and right-hand sides of the proxy update.
pub(crate) fn proxy_system(
    h: &DMatrix<f64>,
    lambda: &DMatrix<f64>,
    s: &DMatrix<f64>,
    rho: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let q = h.nrows() as f64;
    let a = h * h.transpose() * (2.0 / (q * q)) + DMatrix::identity(h.nrows(), h.nrows()) * rho;
    let b = h * s * (2.0 / q) + lambda + h * rho;
    (a, b)
}

/// Result of [`optimize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Optimization {
    /// Best centers seen, ranked by violation count, then constrained objective.
    pub centers: CenterSet,
    pub initial: CenterSet,
    pub d: usize,
    /// Augmented Lagrangian value after each cycle.
    pub trace: Vec<f64>,
    /// Violating pairs `(i, j, distance)` of `centers`.
    pub violations: Vec<(usize, usize, u32)>,
    /// Cycle that produced `centers`; 0 is the initialization.
    pub best_cycle: usize,
    pub init_method: InitMethod,
}

/// Generates centers for `sim` with target distance `d`, seeded initialization.
pub fn optimize(
    sim: &SimilarityMatrix,
    q: usize,
    d: usize,
    hp: &AlmHyperParams,
    seed: u64,
    init: InitMethod,
) -> Result<Optimization> {
    hp.validate()?;
    if d > q {
        return Err(Error::invalid(format!("distance {d} exceeds code length {q}")));
    }
    let start = init_centers(q, sim.num_classes(), d, seed, init)?;
    let mut out = optimize_from(sim, &start.centers, d, hp)?;
    out.init_method = start.method;
    Ok(out)
}

/// Runs the ALM cycles from explicit initial centers.
pub fn optimize_from(
    sim: &SimilarityMatrix,
    initial: &CenterSet,
    d: usize,
    hp: &AlmHyperParams,
) -> Result<Optimization> {
    hp.validate()?;
    if initial.num_classes() != sim.num_classes() {
        return Err(Error::dim(format!(
            "{} initial centers for a {}-class similarity matrix",
            initial.num_classes(),
            sim.num_classes()
        )));
    }
    if d > initial.q() {
        return Err(Error::invalid(format!(
            "distance {d} exceeds code length {}",
            initial.q()
        )));
    }
    let s = sim_to_matrix(sim);
    let mut state = AlmState::new(initial, d, hp.lambda_init);

    let rank = |h: &DMatrix<f64>| -> (usize, f64) {
        let v = count_violations(h, d);
        (v, semantic_loss(h, &s) + hp.mu * distance_term(h))
    };
    let mut best = (rank(&state.h), state.h.clone(), 0usize);
    let mut trace = Vec::with_capacity(hp.cycles);
    for t in 1..=hp.cycles {
        state.cycle_raw(&s, hp)?;
        trace.push(state.objective_raw(&s, hp));
        let key = rank(&state.h);
        if key.0 < best.0 .0 || (key.0 == best.0 .0 && key.1 < best.0 .1) {
            best = (key, state.h.clone(), t);
        }
    }
    let centers = from_matrix(&best.1)?;
    let violations = centers.violations(d as u32);
    Ok(Optimization {
        centers,
        initial: initial.clone(),
        d,
        trace,
        violations,
        best_cycle: best.2,
        init_method: InitMethod::default(),
    })
}

fn count_violations(h: &DMatrix<f64>, d: usize) -> usize {
    let gram = h.transpose() * h;
    let bound = h.nrows() as f64 - 2.0 * d as f64;
    let c = h.ncols();
    (0..c)
        .flat_map(|i| ((i + 1)..c).map(move |j| (i, j)))
        .filter(|&(i, j)| gram[(i, j)] > bound)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::BinaryCode;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn centers(rows: &[&[i8]]) -> CenterSet {
        CenterSet::new(rows.iter().map(|r| BinaryCode::from_signs(r).unwrap()).collect()).unwrap()
    }

    fn random_sim(rng: &mut ChaCha8Rng, c: usize) -> SimilarityMatrix {
        let mut v = vec![0.0; c * c];
        for i in 0..c {
            v[i * c + i] = 1.0;
            for j in (i + 1)..c {
                let x = rng.random_range(-1.0..1.0);
                v[i * c + j] = x;
                v[j * c + i] = x;
            }
        }
        SimilarityMatrix::new(c, v).unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng, q: usize, c: usize) -> AlmState {
        let cs = CenterSet::new((0..c).map(|_| BinaryCode::random(q, rng).unwrap()).collect()).unwrap();
        let mut st = AlmState::new(&cs, rng.random_range(0..=q / 2), 0.0);
        st.m = DMatrix::from_fn(q, c, |_, _| rng.random_range(-1.5..1.5));
        st.lambda = DMatrix::from_fn(q, c, |_, _| rng.random_range(-1.0..1.0));
        st.k = DMatrix::from_fn(c, c, |i, j| if i == j { 0.0 } else { rng.random_range(0.0..4.0) });
        st.alpha = DMatrix::from_fn(c, c, |i, j| if i == j { 0.0 } else { rng.random_range(-1.0..1.0) });
        st
    }

    /// Term-by-term evaluation with explicit loops.
    fn oracle_objective(st: &AlmState, s: &SimilarityMatrix, hp: &AlmHyperParams) -> f64 {
        let (q, c) = st.h.shape();
        let dot = |a: &DMatrix<f64>, i: usize, b: &DMatrix<f64>, j: usize| -> f64 {
            (0..q).map(|r| a[(r, i)] * b[(r, j)]).sum()
        };
        let mut total = 0.0;
        for i in 0..c {
            for j in 0..c {
                let e = s.get(i, j) - dot(&st.h, i, &st.m, j) / q as f64;
                total += e * e;
                if i != j {
                    let hh = dot(&st.h, i, &st.h, j);
                    total += hp.mu * hh;
                    let r = q as f64 - 2.0 * st.d as f64 - hh - st.k[(i, j)];
                    total += st.alpha[(i, j)] * r + hp.beta / 2.0 * r * r;
                }
            }
            for r in 0..q {
                let diff = st.h[(r, i)] - st.m[(r, i)];
                total += st.lambda[(r, i)] * diff + hp.rho / 2.0 * diff * diff;
            }
        }
        total
    }

    #[test]
    fn objective_matches_term_by_term_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let hp = AlmHyperParams { beta: 0.3, ..Default::default() };
        for _ in 0..20 {
            let st = random_state(&mut rng, 4, 3);
            let s = random_sim(&mut rng, 3);
            assert_abs_diff_eq!(st.objective(&s, &hp).unwrap(), oracle_objective(&st, &s, &hp), epsilon = 1e-12);
        }
    }

    #[test]
    fn objective_with_vanishing_penalties() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cs = CenterSet::new((0..4).map(|_| BinaryCode::random(6, &mut rng).unwrap()).collect()).unwrap();
        let s = random_sim(&mut rng, 4);
        let hp = AlmHyperParams::default();
        let mut st = AlmState::new(&cs, 2, 0.0);
        let gram = st.h.transpose() * &st.h;
        st.k = DMatrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 6.0 - 4.0 - gram[(i, j)] });
        let expected = super::super::constrained_objective(&cs, &s, hp.mu).unwrap();
        assert_abs_diff_eq!(st.objective(&s, &hp).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn objective_single_center() {
        let cs = centers(&[&[1, -1, 1]]);
        let s = SimilarityMatrix::identity(1).unwrap();
        let hp = AlmHyperParams::default();
        let mut st = AlmState::new(&cs, 1, 0.2);
        st.m = DMatrix::from_column_slice(3, 1, &[0.5, -1.0, 2.0]);
        let fit = 1.0 - (0.5 + 1.0 + 2.0) / 3.0;
        let diff = [0.5, 0.0, -1.0];
        let lin: f64 = diff.iter().map(|v| 0.2 * v).sum();
        let quad: f64 = diff.iter().map(|v| v * v).sum::<f64>() * hp.rho / 2.0;
        assert_abs_diff_eq!(st.objective(&s, &hp).unwrap(), fit * fit + lin + quad, epsilon = 1e-12);
    }

    #[test]
    fn gradient_single_center_reduction() {
        let cs = centers(&[&[1, -1, 1, 1]]);
        let s = SimilarityMatrix::identity(1).unwrap();
        let st = AlmState::new(&cs, 1, 0.0);
        let g = st.center_gradient(&s, &AlmHyperParams::default(), 0).unwrap();
        let h = to_matrix(&cs);
        let expected = &h * h.transpose() * h.column(0) * (2.0 / 16.0) - &h * DVector::from_element(1, 1.0) * 0.5;
        assert_abs_diff_eq!(g, expected, epsilon = 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let hp = AlmHyperParams { beta: 0.05, ..Default::default() };
        for _ in 0..10 {
            let st = random_state(&mut rng, 6, 4);
            let s = random_sim(&mut rng, 4);
            for i in 0..4 {
                let g = st.center_gradient(&s, &hp, i).unwrap();
                let fd = DVector::from_fn(6, |r, _| {
                    let mut p = st.clone();
                    let mut n = st.clone();
                    p.h[(r, i)] += 1e-5;
                    n.h[(r, i)] -= 1e-5;
                    (oracle_objective(&p, &s, &hp) - oracle_objective(&n, &s, &hp)) / 2e-5
                });
                assert!((&g - &fd).norm() <= 1e-5 * fd.norm().max(1.0), "{g} vs {fd}");
            }
        }
    }

    #[test]
    fn gradient_is_affine_in_mu() {
        // dyadic inputs keep every operation exact
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cs = CenterSet::new((0..5).map(|_| BinaryCode::random(8, &mut rng).unwrap()).collect()).unwrap();
        let mut st = AlmState::new(&cs, 2, 0.25);
        st.alpha = DMatrix::from_fn(5, 5, |i, j| if i == j { 0.0 } else { 0.125 * (i as f64 - j as f64) });
        st.k = DMatrix::from_fn(5, 5, |i, j| if i == j { 0.0 } else { (i + j) as f64 });
        let s = SimilarityMatrix::new(
            5,
            (0..25).map(|n| if n / 5 == n % 5 { 1.0 } else { 0.25 * ((n / 5 + n % 5) % 3) as f64 - 0.25 }).collect(),
        )
        .unwrap();
        let g = |mu| {
            st.center_gradient(&s, &AlmHyperParams { mu, beta: 0.5, ..Default::default() }, 2)
                .unwrap()
        };
        assert_eq!(g(1.0) - g(0.5), g(0.5) - g(0.0));
    }

    #[test]
    fn proxy_update_hand_example() {
        let cs = centers(&[&[1, 1]]);
        let s = SimilarityMatrix::identity(1).unwrap();
        let mut st = AlmState::new(&cs, 1, 0.0);
        st.update_proxy(&s, &AlmHyperParams::default()).unwrap();
        assert_abs_diff_eq!(st.m, DMatrix::from_column_slice(2, 1, &[1.0, 1.0]), epsilon = 1e-12);
    }

    #[test]
    fn proxy_tracks_h_under_heavy_penalty() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut st = random_state(&mut rng, 8, 5);
        let s = random_sim(&mut rng, 5);
        st.update_proxy(&s, &AlmHyperParams { rho: 1e6, ..Default::default() }).unwrap();
        for i in 0..5 {
            assert!((st.m.column(i) - st.h.column(i)).norm() <= 1e-4);
        }
    }

    #[test]
    fn proxy_update_zeroes_the_m_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let hp = AlmHyperParams::default();
        for _ in 0..10 {
            let mut st = random_state(&mut rng, 10, 6);
            let s = random_sim(&mut rng, 6);
            st.update_proxy(&s, &hp).unwrap();
            let (a, b) = proxy_system(&st.h, &st.lambda, &sim_to_matrix(&s), hp.rho);
            for i in 0..6 {
                let resid = &a * st.m.column(i) - b.column(i);
                assert!(resid.norm() <= 1e-8 * (1.0 + b.column(i).norm()));
            }
        }
    }

    #[test]
    fn slack_examples() {
        // q = 16, d = 4 and one pair with the requested inner product
        let make = |ip: i64| {
            let flips = ((16 - ip) / 2) as usize;
            let a = BinaryCode::ones(16).unwrap();
            let b = BinaryCode::from_fn(16, |j| j >= flips).unwrap();
            AlmState::new(&CenterSet::new(vec![a, b]).unwrap(), 4, 0.0)
        };
        let hp = AlmHyperParams::default();
        let mut st = make(8);
        st.update_slack(&hp);
        assert_eq!(st.k[(0, 1)], 0.0);
        let mut st = make(4);
        st.update_slack(&hp);
        assert_eq!(st.k[(0, 1)], 4.0);
        assert_eq!(st.k[(1, 0)], 4.0);
        assert_eq!(st.k[(0, 0)], 0.0);
        let mut st = make(4);
        st.alpha[(0, 1)] = -10.0;
        st.update_slack(&AlmHyperParams { beta: 1.0, ..Default::default() });
        assert_eq!(st.k[(0, 1)], 0.0);
        assert_eq!(st.k[(1, 0)], 4.0);
    }

    #[test]
    fn center_step_examples() {
        let cs = centers(&[&[1, -1, 1, -1]]);
        let mut st = AlmState::new(&cs, 1, 0.0);
        let eta = 0.5;
        st.project_step(&DVector::zeros(4), eta, 0);
        assert_eq!(st.centers().unwrap(), cs);

        let h = st.h.column(0).into_owned();
        st.project_step(&(&h * (2.0 * eta)), eta, 0);
        assert_eq!(st.centers().unwrap().get(0), &cs.get(0).complement());

        let mut st = AlmState::new(&centers(&[&[1, 1]]), 1, 0.0);
        st.project_step(&DVector::from_column_slice(&[eta, 0.0]), eta, 0);
        assert_eq!(st.h.column(0).as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn multiplier_examples() {
        let mut st = AlmState::new(&centers(&[&[1, -1]]), 1, 0.1);
        st.m = DMatrix::from_column_slice(2, 1, &[0.0, 0.0]);
        st.update_multipliers(&AlmHyperParams::default(), 0);
        assert_abs_diff_eq!(st.lambda[(0, 0)], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(st.lambda[(1, 0)], -0.1, epsilon = 1e-15);

        let mut st = AlmState::new(&centers(&[&[1, -1]]), 1, 0.1);
        st.update_multipliers(&AlmHyperParams::default(), 0);
        assert_eq!(st.lambda[(0, 0)], 0.1);

        // q = 16, d = 4, inner product 10
        let a = BinaryCode::ones(16).unwrap();
        let b = BinaryCode::from_fn(16, |j| j >= 3).unwrap();
        let mut st = AlmState::new(&CenterSet::new(vec![a, b]).unwrap(), 4, 0.0);
        st.update_multipliers(&AlmHyperParams { beta: 1e-6, ..Default::default() }, 0);
        assert_abs_diff_eq!(st.alpha[(0, 1)], -2e-6, epsilon = 1e-18);
        assert_eq!(st.alpha[(1, 0)], 0.0);
        assert_eq!(st.alpha[(0, 0)], 0.0);
    }

    #[test]
    fn single_class_is_trivial() {
        let s = SimilarityMatrix::identity(1).unwrap();
        let out = optimize(&s, 12, 12, &AlmHyperParams::default(), 9, InitMethod::Greedy).unwrap();
        let m = super::super::quality_metrics(&out.centers, &s).unwrap();
        assert_eq!(m.s_loss, 0.0);
        assert_eq!(m.d_min, None);
        assert_eq!(out.trace.len(), 20);
    }

    #[test]
    fn deterministic_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let s = random_sim(&mut rng, 10);
        let hp = AlmHyperParams::default();
        let a = optimize(&s, 16, 5, &hp, 1, InitMethod::Greedy).unwrap();
        let b = optimize(&s, 16, 5, &hp, 1, InitMethod::Greedy).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = SimilarityMatrix::identity(3).unwrap();
        let hp = AlmHyperParams::default();
        assert!(matches!(optimize(&s, 1, 1, &hp, 0, InitMethod::Greedy), Err(Error::Infeasible(_))));
        assert!(optimize(&s, 8, 9, &hp, 0, InitMethod::Greedy).is_err());
        let two = centers(&[&[1, 1], &[1, -1]]);
        assert!(matches!(optimize_from(&s, &two, 1, &hp), Err(Error::Dimension(_))));
    }
}
