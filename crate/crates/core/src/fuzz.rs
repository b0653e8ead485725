//! Seeded random instances for the algebraic identities and inequalities,
//! and per-check summaries of the worst residual or slack seen.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cancellation::{check_composition, check_permutation_relation, inner_bound_slack, norm_bound_slack};
use crate::chaos::{covariance_identity_residual, expand_product, moment_oracle, wick_eval_at, DEFAULT_EXPANSION_CAP};
use crate::error::Result;
use crate::pairings::{cardinality_bound, count_admissible, enumerate_admissible, IntervalDecomposition, PairSet};
use crate::rng::{gaussian_vec, stream};
use crate::tensor::{Permutation, SymTensor};

type T = SymTensor<f64>;

/// Size limits of generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FuzzLimits {
    /// Number of factors `ℓ`.
    pub max_factors: usize,
    /// Order of each factor.
    pub max_order: usize,
    pub max_dim: usize,
    /// Total order `N`.
    pub max_total: usize,
}

impl Default for FuzzLimits {
    fn default() -> Self {
        Self {
            max_factors: 4,
            max_order: 3,
            max_dim: 3,
            max_total: 10,
        }
    }
}

/// Worst case of one check over a batch of instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub check: String,
    pub seed: u64,
    pub instances: usize,
    /// Evaluations, when a check samples several points per instance.
    pub evaluations: usize,
    /// Largest residual, or the negated smallest slack for inequality checks.
    pub worst: f64,
    pub tolerance: f64,
    pub failures: usize,
    pub pass: bool,
}

impl FuzzSummary {
    fn from_scores(check: &str, seed: u64, evaluations: usize, scores: &[f64], tolerance: f64) -> Self {
        let worst = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let failures = scores.iter().filter(|s| !(**s <= tolerance)).count();
        Self {
            check: check.into(),
            seed,
            instances: scores.len(),
            evaluations,
            worst,
            tolerance,
            failures,
            pass: failures == 0,
        }
    }

    pub const CSV_HEADER: &'static str = "check,seed,instances,evaluations,worst,tolerance,failures,pass";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e},{},{}",
            self.check, self.seed, self.instances, self.evaluations, self.worst, self.tolerance, self.failures, self.pass
        )
    }
}

/// Symmetric tensor with entries drawn uniformly from `[−1, 1]` and then
/// symmetrized.
pub fn random_symmetric(rng: &mut ChaCha8Rng, order: usize, dim: usize) -> T {
    random_tensor(rng, order, dim).symmetrize()
}

/// Tensor with entries uniform in `[−1, 1]`, scaled to unit norm.
pub fn random_tensor(rng: &mut ChaCha8Rng, order: usize, dim: usize) -> T {
    let len = dim.pow(order as u32);
    let t = T::new(order, dim, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("consistent length");
    let n = t.norm();
    if n > 0.0 {
        t.scaled(1.0 / n)
    } else {
        t
    }
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    Permutation::new(p).expect("a shuffle is a permutation")
}

/// Interval lengths within `limits`, at least `min_factors` of them.
pub fn random_lengths(rng: &mut ChaCha8Rng, limits: &FuzzLimits, min_factors: usize) -> Vec<usize> {
    loop {
        let l = rng.random_range(min_factors..=limits.max_factors.max(min_factors));
        let lengths: Vec<usize> = (0..l).map(|_| rng.random_range(1..=limits.max_order)).collect();
        if lengths.iter().sum::<usize>() <= limits.max_total {
            return lengths;
        }
    }
}

/// A uniformly chosen admissible pair set of random size, or `None` when the
/// chosen size admits none.
pub fn random_pair_set(rng: &mut ChaCha8Rng, decomp: &IntervalDecomposition, max_k: usize) -> Result<Option<PairSet>> {
    let k = rng.random_range(0..=max_k.min(decomp.total() / 2));
    let all = enumerate_admissible(decomp, k)?;
    Ok(all.choose(rng).cloned())
}

fn run<F>(seed: u64, instances: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    (0..instances)
        .into_par_iter()
        .map(|i| f(&mut stream(seed, i as u64)))
        .collect()
}

/// Degree-0 term of the expansion against the moment oracle, relative error.
pub fn fuzz_expansion_mean(seed: u64, instances: usize, limits: &FuzzLimits, tol: f64) -> Result<FuzzSummary> {
    let scores = run(seed, instances, |rng| {
        let lengths = random_lengths(rng, limits, 2);
        let dim = rng.random_range(1..=limits.max_dim);
        let ts: Vec<T> = lengths.iter().map(|&n| random_symmetric(rng, n, dim)).collect();
        let refs: Vec<&T> = ts.iter().collect();
        let e = expand_product(&refs, DEFAULT_EXPANSION_CAP)?;
        let oracle = moment_oracle(&refs)?;
        Ok((e.mean() - oracle).abs() / oracle.abs().max(1.0))
    })?;
    Ok(FuzzSummary::from_scores("expansion_mean", seed, instances, &scores, tol))
}

/// `Π W_{d_i}(A_i)(ξ) = Σ_k W_k(terms_k)(ξ)` at `points` Gaussian seeds per
/// instance, relative to the size of the terms.
pub fn fuzz_expansion_pointwise(
    seed: u64,
    instances: usize,
    points: usize,
    limits: &FuzzLimits,
    tol: f64,
) -> Result<FuzzSummary> {
    let scores = run(seed, instances, |rng| {
        let lengths = random_lengths(rng, limits, 2);
        let dim = rng.random_range(1..=limits.max_dim);
        let ts: Vec<T> = lengths.iter().map(|&n| random_symmetric(rng, n, dim)).collect();
        let refs: Vec<&T> = ts.iter().collect();
        let e = expand_product(&refs, DEFAULT_EXPANSION_CAP)?;
        let mut worst = 0.0f64;
        for _ in 0..points {
            let xi = gaussian_vec(rng, dim);
            let lhs: f64 = ts.iter().map(|t| wick_eval_at(t, &xi)).product::<Result<f64>>()?;
            let rhs = e.eval(&xi)?;
            worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
        Ok(worst)
    })?;
    Ok(FuzzSummary::from_scores("expansion_pointwise", seed, instances * points, &scores, tol))
}

/// Norm bound `‖R^V(A)‖ ≤ Π ‖A_i‖`; the score is the negated slack.
pub fn fuzz_norm_bound(seed: u64, instances: usize, limits: &FuzzLimits, tol: f64) -> Result<FuzzSummary> {
    let scores = run(seed, instances, |rng| {
        let lengths = random_lengths(rng, limits, 1);
        let dim = rng.random_range(1..=limits.max_dim);
        let decomp = IntervalDecomposition::new(lengths.clone())?;
        let v = random_pair_set(rng, &decomp, decomp.total() / 2)?.unwrap_or_else(|| PairSet::empty(decomp));
        let ts: Vec<T> = lengths.iter().map(|&n| random_tensor(rng, n, dim)).collect();
        let refs: Vec<&T> = ts.iter().collect();
        Ok(-norm_bound_slack(&v, &refs)?)
    })?;
    Ok(FuzzSummary::from_scores("norm_bound", seed, instances, &scores, tol))
}

/// Inner-product bound through the traces of `V`; the score is the negated
/// slack.
pub fn fuzz_inner_bound(seed: u64, instances: usize, limits: &FuzzLimits, tol: f64) -> Result<FuzzSummary> {
    let scores = run(seed, instances, |rng| {
        let lengths = random_lengths(rng, limits, 1);
        let dim = rng.random_range(1..=limits.max_dim);
        let decomp = IntervalDecomposition::new(lengths.clone())?;
        let v = random_pair_set(rng, &decomp, decomp.total() / 2)?.unwrap_or_else(|| PairSet::empty(decomp));
        let a: Vec<T> = lengths.iter().map(|&n| random_tensor(rng, n, dim)).collect();
        let b: Vec<T> = lengths.iter().map(|&n| random_tensor(rng, n, dim)).collect();
        let ra: Vec<&T> = a.iter().collect();
        let rb: Vec<&T> = b.iter().collect();
        Ok(-inner_bound_slack(&v, &ra, &rb)?)
    })?;
    Ok(FuzzSummary::from_scores("inner_bound", seed, instances, &scores, tol))
}

/// Composition residual for a random `V` and a random follow-up `V'`.
pub fn fuzz_composition(seed: u64, instances: usize, limits: &FuzzLimits, tol: f64) -> Result<FuzzSummary> {
    let scores = run(seed, instances, |rng| {
        let dim = rng.random_range(1..=limits.max_dim);
        loop {
            let mut lengths = random_lengths(rng, limits, 2);
            let last = lengths.pop().expect("at least two factors");
            let decomp = IntervalDecomposition::new(lengths.clone())?;
            let Some(v) = random_pair_set(rng, &decomp, decomp.total() / 2)? else {
                continue;
            };
            let Ok(follow) = v.follow_up_decomposition(last) else {
                continue;
            };
            let Some(vp) = random_pair_set(rng, &follow, follow.total() / 2)? else {
                continue;
            };
            let mut ts: Vec<T> = lengths.iter().map(|&n| random_tensor(rng, n, dim)).collect();
            ts.push(random_tensor(rng, last, dim));
            let refs: Vec<&T> = ts.iter().collect();
            return check_composition(&v, &vp, &refs);
        }
    })?;
    Ok(FuzzSummary::from_scores("composition", seed, instances, &scores, tol))
}

/// Permutation relation residual for random slot permutations.
pub fn fuzz_permutation(seed: u64, instances: usize, limits: &FuzzLimits, tol: f64) -> Result<FuzzSummary> {
    let scores = run(seed, instances, |rng| {
        let lengths = random_lengths(rng, limits, 1);
        let dim = rng.random_range(1..=limits.max_dim);
        let decomp = IntervalDecomposition::new(lengths.clone())?;
        let v = random_pair_set(rng, &decomp, decomp.total() / 2)?.unwrap_or_else(|| PairSet::empty(decomp));
        let ts: Vec<T> = lengths.iter().map(|&n| random_tensor(rng, n, dim)).collect();
        let perms: Vec<Permutation> = lengths.iter().map(|&n| random_permutation(rng, n)).collect();
        let refs: Vec<&T> = ts.iter().collect();
        check_permutation_relation(&v, &refs, &perms)
    })?;
    Ok(FuzzSummary::from_scores("permutation", seed, instances, &scores, tol))
}

/// `|E[W_n(A)W_n(B)] − n!⟨Ã, B̃⟩|` on random symmetric pairs.
pub fn fuzz_covariance(seed: u64, instances: usize, limits: &FuzzLimits, tol: f64) -> Result<FuzzSummary> {
    let scores = run(seed, instances, |rng| {
        let n = rng.random_range(1..=limits.max_order);
        let dim = rng.random_range(1..=limits.max_dim);
        let a = random_symmetric(rng, n, dim);
        let b = random_symmetric(rng, n, dim);
        covariance_identity_residual(&a, &b)
    })?;
    Ok(FuzzSummary::from_scores("covariance", seed, instances, &scores, tol))
}

/// Admissible pair-set counts: exact on all-unit decompositions up to
/// `max_unit`, and never above the bound on random decompositions.
pub fn fuzz_cardinality(seed: u64, max_unit: usize, instances: usize, max_total: usize) -> Result<FuzzSummary> {
    let mut scores = Vec::new();
    for n in 1..=max_unit {
        let d = IntervalDecomposition::new(vec![1; n])?;
        for k in 0..=n / 2 {
            let got = enumerate_admissible(&d, k)?.len() as u128;
            scores.push(if got == cardinality_bound(n, k) { 0.0 } else { 1.0 });
        }
    }
    let random = run(seed, instances, |rng| {
        let n_total = rng.random_range(1..=max_total);
        let mut lengths = Vec::new();
        let mut left = n_total;
        while left > 0 {
            let l = rng.random_range(1..=left);
            lengths.push(l);
            left -= l;
        }
        let d = IntervalDecomposition::new(lengths)?;
        let mut excess = 0.0f64;
        for k in 0..=n_total / 2 {
            let c = count_admissible(&d, k)?;
            if c > cardinality_bound(n_total, k) {
                excess = 1.0;
            }
        }
        Ok(excess)
    })?;
    scores.extend(random);
    let count = scores.len();
    Ok(FuzzSummary::from_scores("cardinality", seed, count, &scores, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batches_pass() {
        let lim = FuzzLimits {
            max_factors: 3,
            max_order: 2,
            max_dim: 2,
            max_total: 6,
        };
        for s in [
            fuzz_expansion_mean(1, 10, &lim, 1e-9).unwrap(),
            fuzz_expansion_pointwise(2, 5, 5, &lim, 1e-9).unwrap(),
            fuzz_norm_bound(3, 20, &lim, 1e-12).unwrap(),
            fuzz_inner_bound(4, 20, &lim, 1e-12).unwrap(),
            fuzz_composition(5, 20, &lim, 1e-10).unwrap(),
            fuzz_permutation(6, 20, &lim, 1e-10).unwrap(),
            fuzz_covariance(7, 20, &lim, 1e-10).unwrap(),
            fuzz_cardinality(8, 6, 20, 8).unwrap(),
        ] {
            assert!(s.pass, "{s:?}");
        }
    }

    #[test]
    fn summaries_are_reproducible() {
        let lim = FuzzLimits::default();
        let a = fuzz_norm_bound(11, 15, &lim, 1e-12).unwrap();
        let b = fuzz_norm_bound(11, 15, &lim, 1e-12).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.csv_row().split(',').count(), FuzzSummary::CSV_HEADER.split(',').count());
    }

    #[test]
    fn lengths_respect_limits() {
        let lim = FuzzLimits::default();
        let mut rng = stream(3, 0);
        for _ in 0..200 {
            let l = random_lengths(&mut rng, &lim, 2);
            assert!(l.len() >= 2 && l.len() <= 4);
            assert!(l.iter().all(|&n| (1..=3).contains(&n)));
            assert!(l.iter().sum::<usize>() <= 10);
        }
    }
}
