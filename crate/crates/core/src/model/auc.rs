use super::ModelError;
use crate::scalar::Scalar;

/// Area under the ROC curve: the probability that a positive outscores a
/// negative, ties counting one half. Computed from tie-grouped ranks in
/// integer arithmetic, so an exact scalar type yields an exact result.
pub fn auc<S, T>(scores: &[S], labels: &[bool]) -> Result<T, ModelError>
where
    S: PartialOrd + Copy,
    T: Scalar,
{
    if scores.len() != labels.len() {
        return Err(ModelError::Shape(format!(
            "{} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.partial_cmp(s).is_none()) {
        return Err(ModelError::IncomparableScores);
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(ModelError::SingleClassLabels);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("checked comparable"));

    // twice the Mann-Whitney U of the positives
    let mut u2: usize = 0;
    let mut neg_below = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let group_pos = order[i..j].iter().filter(|&&k| labels[k]).count();
        let group_neg = (j - i) - group_pos;
        u2 += group_pos * (2 * neg_below + group_neg);
        neg_below += group_neg;
        i = j;
    }
    Ok(T::from_count(u2) / T::from_count(2 * pos * neg))
}
