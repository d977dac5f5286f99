use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{iteration_seed, ModelError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    pub observed: f64,
    pub n_perm: usize,
    /// Permutations scoring at least the observed statistic.
    pub at_least: usize,
    pub p_value: f64,
}

impl PermutationResult {
    fn new(observed: f64, n_perm: usize, at_least: usize) -> Self {
        Self {
            observed,
            n_perm,
            at_least,
            p_value: (1 + at_least) as f64 / (1 + n_perm) as f64,
        }
    }
}

fn permuted(labels: &[bool], seed: u64, k: usize) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(iteration_seed(!seed, k));
    let mut y = labels.to_vec();
    y.shuffle(&mut rng);
    y
}

/// Label-permutation significance of `observed`. Each permutation shuffles
/// the labels once with its own derived seed and passes them to `statistic`.
/// `p = (1 + #{perm >= observed}) / (1 + n_perm)`.
pub fn permutation_test<F>(
    labels: &[bool],
    observed: f64,
    n_perm: usize,
    seed: u64,
    statistic: F,
) -> Result<PermutationResult, ModelError>
where
    F: Fn(&[bool]) -> Result<f64, ModelError> + Sync,
{
    let mut r = permutation_test_many(labels, &[observed], n_perm, seed, |y| {
        statistic(y).map(|s| vec![s])
    })?;
    Ok(r.remove(0))
}

/// Several statistics sharing the same permutations.
pub fn permutation_test_many<F>(
    labels: &[bool],
    observed: &[f64],
    n_perm: usize,
    seed: u64,
    statistics: F,
) -> Result<Vec<PermutationResult>, ModelError>
where
    F: Fn(&[bool]) -> Result<Vec<f64>, ModelError> + Sync,
{
    let stats = (0..n_perm)
        .into_par_iter()
        .map(|k| statistics(&permuted(labels, seed, k)))
        .collect::<Result<Vec<Vec<f64>>, _>>()?;
    Ok(observed
        .iter()
        .enumerate()
        .map(|(j, &obs)| {
            let at_least = stats.iter().filter(|s| s[j] >= obs).count();
            PermutationResult::new(obs, n_perm, at_least)
        })
        .collect())
}
