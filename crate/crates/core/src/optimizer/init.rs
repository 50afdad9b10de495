use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code::{hamming_unchecked, BinaryCode, CenterSet};
use crate::error::{Error, Result};

/// Random candidates drawn per slot by the greedy construction.
pub const CANDIDATES_PER_SLOT: usize = 200;

/// Largest `q` for which a duplicate fallback is resolved by scanning all `2^q` codewords.
const EXHAUSTIVE_MAX_BITS: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMethod {
    /// Seeded farthest-point style construction from random candidates.
    #[default]
    Greedy,
    /// Sylvester-Hadamard rows and their complements; falls back to greedy
    /// when `q` is not a power of two or `C > 2q`.
    Hadamard,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Initialization {
    pub centers: CenterSet,
    /// Pairs `(i, j, distance)` below the requested distance.
    pub violations: Vec<(usize, usize, u32)>,
    /// The construction actually used.
    pub method: InitMethod,
}

/// Builds `C` distinct centers of length `q`, aiming for pairwise distance `>= d`.
pub fn init_centers(
    q: usize,
    classes: usize,
    d: usize,
    seed: u64,
    method: InitMethod,
) -> Result<Initialization> {
    if q == 0 || classes == 0 {
        return Err(Error::invalid("code length and class count must be at least 1"));
    }
    if d > q {
        return Err(Error::invalid(format!("distance {d} exceeds code length {q}")));
    }
    if q < 64 && classes as u128 > 1u128 << q {
        return Err(Error::Infeasible(format!(
            "{classes} distinct centers do not exist in {{-1,+1}}^{q}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (centers, method) = match method {
        InitMethod::Hadamard => match hadamard_centers(q, classes, &mut rng) {
            Some(c) => (c, InitMethod::Hadamard),
            None => (greedy_centers(q, classes, d, &mut rng)?, InitMethod::Greedy),
        },
        InitMethod::Greedy => (greedy_centers(q, classes, d, &mut rng)?, InitMethod::Greedy),
    };
    let centers = CenterSet::new(centers)?;
    let violations = centers.violations(d as u32);
    Ok(Initialization { centers, violations, method })
}

fn min_distance_to(candidate: &BinaryCode, accepted: &[BinaryCode]) -> u32 {
    accepted
        .iter()
        .map(|c| hamming_unchecked(candidate, c))
        .min()
        .unwrap_or(u32::MAX)
}

fn greedy_centers(q: usize, classes: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<BinaryCode>> {
    let target = d.max(1) as u32;
    let mut accepted: Vec<BinaryCode> = Vec::with_capacity(classes);
    while accepted.len() < classes {
        let mut best: Option<(u32, BinaryCode)> = None;
        for _ in 0..CANDIDATES_PER_SLOT {
            let cand = BinaryCode::random(q, rng)?;
            let dist = min_distance_to(&cand, &accepted);
            if dist >= target {
                best = Some((dist, cand));
                break;
            }
            if best.as_ref().is_none_or(|(b, _)| dist > *b) {
                best = Some((dist, cand));
            }
        }
        let (dist, mut cand) = best.expect("at least one candidate is drawn");
        if dist == 0 {
            cand = distinct_fallback(q, &accepted, rng)?;
        }
        accepted.push(cand);
    }
    Ok(accepted)
}

/// A codeword not yet in `accepted`, maximizing the distance to it when `q` is small.
fn distinct_fallback(q: usize, accepted: &[BinaryCode], rng: &mut ChaCha8Rng) -> Result<BinaryCode> {
    if q <= EXHAUSTIVE_MAX_BITS {
        let mut best: Option<(u32, BinaryCode)> = None;
        for word in 0u64..(1u64 << q) {
            let cand = BinaryCode::from_fn(q, |j| (word >> j) & 1 == 1)?;
            let dist = min_distance_to(&cand, accepted);
            if best.as_ref().is_none_or(|(b, _)| dist > *b) {
                best = Some((dist, cand));
            }
        }
        return Ok(best.expect("q >= 1 gives at least two codewords").1);
    }
    loop {
        let cand = BinaryCode::random(q, rng)?;
        if min_distance_to(&cand, accepted) > 0 {
            return Ok(cand);
        }
    }
}

/// Rows of the Sylvester-Hadamard matrix of order `q` and their complements,
/// shuffled, truncated to `classes`.
fn hadamard_centers(q: usize, classes: usize, rng: &mut ChaCha8Rng) -> Option<Vec<BinaryCode>> {
    if !q.is_power_of_two() || classes > 2 * q {
        return None;
    }
    // Sylvester: entry (r, c) is -1 iff popcount(r & c) is odd
    let mut pool: Vec<BinaryCode> = (0..q)
        .map(|r| {
            BinaryCode::from_fn(q, |c| (r & c).count_ones() % 2 == 0).expect("q >= 1")
        })
        .collect();
    let complements: Vec<BinaryCode> = pool.iter().map(BinaryCode::complement).collect();
    pool.extend(complements);
    pool.shuffle(rng);
    pool.truncate(classes);
    Some(pool)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn easy_pair_meets_distance() {
        for seed in 0..10 {
            let init = init_centers(8, 2, 4, seed, InitMethod::Greedy).unwrap();
            assert!(init.violations.is_empty());
            assert!(init.centers.min_distance().unwrap() >= 4);
        }
    }

    #[test]
    fn full_square_reports_violations() {
        // all four codewords of length 2 have minimum distance 1 < 2
        let init = init_centers(2, 4, 2, 3, InitMethod::Greedy).unwrap();
        let mut signs: Vec<_> = init.centers.iter().map(BinaryCode::to_signs).collect();
        signs.sort();
        assert_eq!(signs, vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]);
        assert_eq!(init.centers.min_distance(), Some(1));
        assert!(!init.violations.is_empty());
    }

    #[test]
    fn infeasible_class_count() {
        assert!(matches!(
            init_centers(1, 3, 1, 0, InitMethod::Greedy),
            Err(Error::Infeasible(_))
        ));
        assert!(init_centers(4, 2, 5, 0, InitMethod::Greedy).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let a = init_centers(32, 20, 12, 42, InitMethod::Greedy).unwrap();
        let b = init_centers(32, 20, 12, 42, InitMethod::Greedy).unwrap();
        let c = init_centers(32, 20, 12, 43, InitMethod::Greedy).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.centers, c.centers);
    }

    #[test]
    fn centers_are_distinct() {
        for seed in 0..5 {
            let init = init_centers(3, 8, 2, seed, InitMethod::Greedy).unwrap();
            assert_eq!(init.centers.min_distance(), Some(1));
        }
    }

    #[test]
    fn hadamard_rows_are_half_apart() {
        let init = init_centers(16, 20, 8, 1, InitMethod::Hadamard).unwrap();
        assert_eq!(init.method, InitMethod::Hadamard);
        assert_eq!(init.centers.min_distance(), Some(8));
        assert!(init.violations.is_empty());

        let fallback = init_centers(16, 40, 4, 1, InitMethod::Hadamard).unwrap();
        assert_eq!(fallback.method, InitMethod::Greedy);
        let odd = init_centers(12, 4, 4, 1, InitMethod::Hadamard).unwrap();
        assert_eq!(odd.method, InitMethod::Greedy);
    }
}
