use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ModelError;

const MAX_DRAWS: usize = 100;

/// Indices into the game list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Seed of one split iteration.
pub fn iteration_seed(seed: u64, iteration: usize) -> u64 {
    seed ^ (iteration as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Shuffles puzzles and assigns them whole to training until the training
/// game count reaches `train_frac` of the corpus; the remaining puzzles (at
/// least one) form the validation side. Draws lacking either class on either
/// side are repeated.
pub fn puzzle_aware_splits<S: AsRef<str>>(
    puzzles: &[S],
    labels: &[bool],
    n_iter: usize,
    train_frac: f64,
    seed: u64,
) -> Result<Vec<Split>, ModelError> {
    if puzzles.len() != labels.len() {
        return Err(ModelError::Shape(format!(
            "{} puzzle ids vs {} labels",
            puzzles.len(),
            labels.len()
        )));
    }
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(ModelError::InvalidParameter(format!(
            "train fraction must lie in (0, 1), got {train_frac}"
        )));
    }
    let mut by_puzzle: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, p) in puzzles.iter().enumerate() {
        by_puzzle.entry(p.as_ref()).or_default().push(i);
    }
    if by_puzzle.len() < 2 {
        return Err(ModelError::UnsplittableCorpus(0));
    }
    let groups: Vec<&Vec<usize>> = by_puzzle.values().collect();
    let target = train_frac * puzzles.len() as f64;

    (0..n_iter)
        .map(|it| {
            let mut rng = ChaCha8Rng::seed_from_u64(iteration_seed(seed, it));
            for _ in 0..MAX_DRAWS {
                let mut order: Vec<usize> = (0..groups.len()).collect();
                order.shuffle(&mut rng);
                let mut train = Vec::new();
                let mut validation = Vec::new();
                for (k, &g) in order.iter().enumerate() {
                    let last = k + 1 == order.len();
                    if (train.len() as f64) < target && !last {
                        train.extend_from_slice(groups[g]);
                    } else {
                        validation.extend_from_slice(groups[g]);
                    }
                }
                let both = |idx: &[usize]| {
                    idx.iter().any(|&i| labels[i]) && idx.iter().any(|&i| !labels[i])
                };
                if both(&train) && both(&validation) {
                    train.sort_unstable();
                    validation.sort_unstable();
                    return Ok(Split { train, validation });
                }
            }
            Err(ModelError::UnsplittableCorpus(MAX_DRAWS))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn corpus(n_puzzles: usize, per: usize) -> (Vec<String>, Vec<bool>) {
        let mut p = Vec::new();
        let mut y = Vec::new();
        for i in 0..n_puzzles * per {
            p.push(format!("p{}", i % n_puzzles));
            y.push(i % 3 == 0);
        }
        (p, y)
    }

    #[test]
    fn puzzles_never_straddle() {
        let (p, y) = corpus(12, 7);
        let splits = puzzle_aware_splits(&p, &y, 20, 0.8, 3).unwrap();
        assert_eq!(splits.len(), 20);
        for s in &splits {
            let tp: HashSet<&str> = s.train.iter().map(|&i| p[i].as_str()).collect();
            let vp: HashSet<&str> = s.validation.iter().map(|&i| p[i].as_str()).collect();
            assert!(tp.is_disjoint(&vp));
            let mut all: Vec<usize> = s.train.iter().chain(&s.validation).copied().collect();
            all.sort();
            assert_eq!(all, (0..p.len()).collect::<Vec<_>>());
            assert!(s.train.len() as f64 >= 0.8 * p.len() as f64);
        }
    }

    #[test]
    fn two_puzzles_force_one_against_the_other() {
        let (p, y) = corpus(2, 6);
        for s in puzzle_aware_splits(&p, &y, 20, 0.8, 9).unwrap() {
            let tp: HashSet<&str> = s.train.iter().map(|&i| p[i].as_str()).collect();
            assert_eq!(tp.len(), 1);
            assert_eq!(s.train.len(), 6);
            assert_eq!(s.validation.len(), 6);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let (p, y) = corpus(10, 5);
        let a = puzzle_aware_splits(&p, &y, 20, 0.8, 42).unwrap();
        let b = puzzle_aware_splits(&p, &y, 20, 0.8, 42).unwrap();
        assert_eq!(a, b);
        let c = puzzle_aware_splits(&p, &y, 20, 0.8, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn unsplittable() {
        let p = vec!["a", "a", "b", "b"];
        let y = vec![true, true, false, false];
        assert_eq!(
            puzzle_aware_splits(&p, &y, 1, 0.5, 0),
            Err(ModelError::UnsplittableCorpus(100))
        );
        assert!(puzzle_aware_splits(&["a", "a"], &[true, false], 1, 0.5, 0).is_err());
        assert!(puzzle_aware_splits(&["a", "b"], &[true, false], 1, 1.5, 0).is_err());
    }
}
