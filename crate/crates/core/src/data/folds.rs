use rand::seq::SliceRandom;
use rand::Rng;

use super::DataError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Group-aware k-fold split over real rows.
///
/// Distinct groups (in first-appearance order) are shuffled and dealt
/// round-robin into `k` folds, so replicates of a sample always share a
/// fold. Augmented rows are excluded from both sides.
pub fn grouped_kfold<R: Rng + ?Sized>(
    groups: &[String],
    augmented: &[bool],
    k: usize,
    rng: &mut R,
) -> Result<Vec<Fold>, DataError> {
    if k < 2 {
        return Err(DataError::Config {
            key: "folds",
            reason: format!("need at least 2 folds, got {k}"),
        });
    }
    let mut distinct: Vec<&str> = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut row_group = vec![usize::MAX; groups.len()];
    for (i, g) in groups.iter().enumerate() {
        if augmented.get(i).copied().unwrap_or(false) {
            continue;
        }
        let id = *index.entry(g.as_str()).or_insert_with(|| {
            distinct.push(g.as_str());
            distinct.len() - 1
        });
        row_group[i] = id;
    }
    if distinct.len() < k {
        return Err(DataError::Config {
            key: "folds",
            reason: format!("{} groups cannot fill {k} folds", distinct.len()),
        });
    }
    let mut order: Vec<usize> = (0..distinct.len()).collect();
    order.shuffle(rng);
    let mut fold_of = vec![0; distinct.len()];
    for (pos, &g) in order.iter().enumerate() {
        fold_of[g] = pos % k;
    }
    Ok((0..k)
        .map(|f| {
            let (mut train, mut test) = (Vec::new(), Vec::new());
            for (i, &g) in row_group.iter().enumerate() {
                if g == usize::MAX {
                    continue;
                }
                if fold_of[g] == f {
                    test.push(i);
                } else {
                    train.push(i);
                }
            }
            Fold { train, test }
        })
        .collect())
}
