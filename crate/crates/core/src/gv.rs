//! Minimum pairwise distance target from the Gilbert-Varshamov bound.

use num_bigint::BigUint;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GvConfig {
    pub q: usize,
    pub classes: usize,
    pub d: usize,
}

impl GvConfig {
    pub fn new(q: usize, classes: usize) -> Result<Self> {
        let d = compute_min_distance(q, classes)?;
        Ok(Self { q, classes, d })
    }
}

/// Smallest `d` in `1..=q` with `2^q / C <= sum_{i<d} binom(q, i)`.
///
/// The test is evaluated as `2^q <= C * sum` in exact integer arithmetic.
pub fn compute_min_distance(q: usize, classes: usize) -> Result<usize> {
    if q == 0 {
        return Err(Error::invalid("code length must be at least 1"));
    }
    if classes == 0 {
        return Err(Error::invalid("class count must be at least 1"));
    }
    let space = BigUint::from(1u8) << q;
    let c = BigUint::from(classes);
    if c > space {
        return Err(Error::Infeasible(format!(
            "{classes} classes exceed the 2^{q} available codewords"
        )));
    }

    if classes == 1 {
        // no pairs to separate; the ball never reaches the whole space
        return Ok(q);
    }

    let mut binom = BigUint::from(1u8);
    let mut ball = BigUint::from(0u8);
    for d in 1..=q {
        // ball = sum_{i=0}^{d-1} binom(q, i), binom = binom(q, d-1)
        ball += &binom;
        if &c * &ball >= space {
            return Ok(d);
        }
        binom = binom * (q - d + 1) / d;
    }
    // unreachable for 2 <= C <= 2^q: at d = q the ball holds 2^q - 1 >= 2^q / C
    Err(Error::Infeasible(format!(
        "no distance in 1..={q} satisfies the bound for {classes} classes"
    )))
}
