//! Min-max scaling fit on a training split.

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Per-feature minimum and maximum learned from a training set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    pub fn fit(train: &Dataset) -> Self {
        let dim = train.dim();
        let mut min = alloc::vec![f64::INFINITY; dim];
        let mut max = alloc::vec![f64::NEG_INFINITY; dim];
        for s in train.samples() {
            for ((lo, hi), &v) in min.iter_mut().zip(max.iter_mut()).zip(&s.features) {
                *lo = lo.min(v);
                *hi = hi.max(v);
            }
        }
        Self { min, max }
    }

    /// Features whose training range is a single value; they map to 0.
    pub fn constant_features(&self) -> Vec<usize> {
        (0..self.min.len())
            .filter(|&j| self.max[j] <= self.min[j])
            .collect()
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect()
    }

    /// Scales every sample of `data`. Fails on a dataset that was already scaled.
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.is_normalized() {
            return Err(Error::AlreadyNormalized);
        }
        if data.dim() != self.min.len() {
            return Err(Error::DimensionMismatch {
                expected: self.min.len(),
                found: data.dim(),
            });
        }
        let features = data
            .samples()
            .iter()
            .map(|s| self.transform(&s.features))
            .collect();
        Ok(data.with_features(features)?.mark_normalized())
    }
}

/// Fits on `train` and scales `train` and every dataset in `others` with the
/// same parameters. Values outside the training range are not clamped.
pub fn fit_apply_minmax(
    train: &Dataset,
    others: &[&Dataset],
) -> Result<(Dataset, Vec<Dataset>, NormalizationParams)> {
    let params = NormalizationParams::fit(train);
    let train = params.apply(train)?;
    let others = others
        .iter()
        .map(|d| params.apply(d))
        .collect::<Result<Vec<_>>>()?;
    Ok((train, others, params))
}
