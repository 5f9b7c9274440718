use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// One cross-validation split, as original sample indices.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified k-fold split.
///
/// Each class (ascending) is shuffled with one seeded generator and the
/// classes are laid end to end; position `p` of that sequence goes to fold
/// `p mod k`. Every class is therefore spread over the folds as evenly as
/// possible. Train and test lists follow dataset order.
pub fn stratified_kfold(dataset: &Dataset, folds: usize, seed: u64) -> Result<Vec<Fold>> {
    if folds < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    if folds > dataset.len() {
        return Err(Error::InvalidArgument(alloc::format!(
            "{folds} folds for {} samples",
            dataset.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = alloc::vec![0usize; dataset.len()];
    let mut p = 0;
    for &class in dataset.classes() {
        let mut positions: Vec<usize> = (0..dataset.len())
            .filter(|&i| dataset.samples()[i].label == class)
            .collect();
        positions.shuffle(&mut rng);
        for pos in positions {
            fold_of[pos] = p % folds;
            p += 1;
        }
    }
    Ok((0..folds)
        .map(|f| {
            let (test, train): (Vec<_>, Vec<_>) = dataset
                .samples()
                .iter()
                .zip(&fold_of)
                .map(|(s, &g)| (s.index, g))
                .partition(|&(_, g)| g == f);
            Fold {
                train: train.into_iter().map(|(i, _)| i).collect(),
                test: test.into_iter().map(|(i, _)| i).collect(),
            }
        })
        .collect())
}
