use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{auc, train_logreg, Design, ModelError, Split, Standardizer, TrainOptions};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub c_values: Vec<f64>,
    pub pos_n: Vec<usize>,
    pub min_df: Vec<usize>,
    /// Ensemble weights are multiples of `1 / weight_steps`.
    pub weight_steps: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            c_values: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            pos_n: vec![1, 2, 3],
            min_df: vec![2, 5, 10],
            weight_steps: 10,
        }
    }
}

/// One point of the hyperparameter grid. POS settings are absent for
/// groups without n-gram features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub c: f64,
    pub pos_n: Option<usize>,
    pub min_df: Option<usize>,
}

impl GridConfig {
    pub fn candidates(&self, with_pos: bool) -> Vec<Candidate> {
        let mut out = Vec::new();
        for &c in &self.c_values {
            if with_pos {
                for &n in &self.pos_n {
                    for &d in &self.min_df {
                        out.push(Candidate {
                            c,
                            pos_n: Some(n),
                            min_df: Some(d),
                        });
                    }
                }
            } else {
                out.push(Candidate {
                    c,
                    pos_n: None,
                    min_df: None,
                });
            }
        }
        out
    }

    pub fn max_pos_n(&self) -> usize {
        self.pos_n.iter().copied().max().unwrap_or(1)
    }
}

/// Validation outcome of one configuration across all splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub aucs: Vec<f64>,
    pub mean_auc: f64,
    /// Validation probabilities per split, in `Split::validation` order.
    #[serde(skip)]
    pub predictions: Vec<Vec<f64>>,
}

impl CvResult {
    pub fn from_predictions(
        predictions: Vec<Vec<f64>>,
        splits: &[Split],
        labels: &[bool],
    ) -> Result<Self, ModelError> {
        let aucs = predictions
            .iter()
            .zip(splits)
            .map(|(p, s)| {
                let y: Vec<bool> = s.validation.iter().map(|&i| labels[i]).collect();
                auc::<f64, f64>(p, &y)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mean_auc = aucs.iter().sum::<f64>() / aucs.len().max(1) as f64;
        Ok(Self {
            aucs,
            mean_auc,
            predictions,
        })
    }

    pub fn sd_auc(&self) -> f64 {
        let n = self.aucs.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let var = self.aucs.iter().map(|a| (a - self.mean_auc).powi(2)).sum::<f64>() / (n - 1.0);
        var.sqrt()
    }
}

/// Trains on each split's training side and scores its validation side.
/// `design` builds the raw (unstandardised) train and validation matrices.
pub fn cross_validate<T, F>(
    splits: &[Split],
    labels: &[bool],
    c: T,
    opts: TrainOptions,
    design: F,
) -> Result<CvResult, ModelError>
where
    T: Real,
    F: Fn(&Split) -> (Design<T>, Design<T>) + Sync,
{
    let predictions = splits
        .par_iter()
        .map(|s| {
            let (train, val) = design(s);
            let y: Vec<bool> = s.train.iter().map(|&i| labels[i]).collect();
            let (std, x) = Standardizer::fit_apply(&train);
            let model = train_logreg(x.view(), &y, c, opts)?;
            let p = model.predict_proba(std.apply(&val).view());
            Ok(p.iter().map(|v| v.as_f64()).collect())
        })
        .collect::<Result<Vec<Vec<f64>>, ModelError>>()?;
    CvResult::from_predictions(predictions, splits, labels)
}

fn candidate_order(a: (&Candidate, f64), b: (&Candidate, f64)) -> Ordering {
    b.1.total_cmp(&a.1)
        .then(a.0.c.total_cmp(&b.0.c))
        .then(a.0.pos_n.cmp(&b.0.pos_n))
        .then(b.0.min_df.cmp(&a.0.min_df))
}

/// Index of the best candidate: highest mean AUC, then smaller C, smaller n,
/// larger minimum document frequency.
pub fn select_candidate(results: &[(Candidate, f64)]) -> Option<usize> {
    (0..results.len()).min_by(|&i, &j| {
        candidate_order((&results[i].0, results[i].1), (&results[j].0, results[j].1))
    })
}

/// Non-negative integer vectors of length `k` summing to `steps`, in
/// lexicographic order.
pub fn simplex_weights(k: usize, steps: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(k - 1, left - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(k, steps, &mut Vec::new(), &mut out);
    }
    out
}

/// Weighted average of member model probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub weights: Vec<f64>,
}

impl Ensemble {
    pub fn combine(&self, member_probs: &[&[f64]]) -> Vec<f64> {
        let n = member_probs.first().map_or(0, |p| p.len());
        (0..n)
            .map(|i| {
                self.weights
                    .iter()
                    .zip(member_probs)
                    .fold(0.0, |acc, (w, p)| acc + w * p[i])
            })
            .collect()
    }
}

/// Chooses simplex weights maximising mean validation AUC of the averaged
/// probabilities. Ties go to weights nearer the uniform vector, then to the
/// lexicographically smallest.
pub fn ensemble_search(
    members: &[&CvResult],
    splits: &[Split],
    labels: &[bool],
    steps: usize,
) -> Result<(Ensemble, CvResult), ModelError> {
    let k = members.len();
    if k == 0 || steps == 0 {
        return Err(ModelError::InvalidParameter("empty ensemble".into()));
    }
    let combos = simplex_weights(k, steps);
    let evaluated = combos
        .par_iter()
        .map(|ints| {
            let e = Ensemble {
                weights: ints.iter().map(|&v| v as f64 / steps as f64).collect(),
            };
            let preds = (0..splits.len())
                .map(|s| {
                    let probs: Vec<&[f64]> =
                        members.iter().map(|m| m.predictions[s].as_slice()).collect();
                    e.combine(&probs)
                })
                .collect();
            CvResult::from_predictions(preds, splits, labels).map(|r| (e, r))
        })
        .collect::<Result<Vec<_>, _>>()?;
    // distance to uniform, scaled to integers
    let spread = |ints: &[usize]| -> usize {
        ints.iter()
            .map(|&v| {
                let d = (k * v) as i64 - steps as i64;
                (d * d) as usize
            })
            .sum()
    };
    let best = (0..evaluated.len())
        .min_by(|&i, &j| {
            evaluated[j]
                .1
                .mean_auc
                .total_cmp(&evaluated[i].1.mean_auc)
                .then(spread(&combos[i]).cmp(&spread(&combos[j])))
                .then(combos[i].cmp(&combos[j]))
        })
        .expect("at least one weight vector");
    Ok(evaluated.into_iter().nth(best).expect("index in range"))
}
