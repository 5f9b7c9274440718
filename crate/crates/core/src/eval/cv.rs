use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::folds::stratified_kfold;
use super::stats::{mean, sample_sd};
use crate::classify::{predict_knn_multi, BallClassifier, DistanceRule};
use crate::clock::Stopwatch;
use crate::dataset::{Dataset, Label, Sample};
use crate::error::{Error, Result};
use crate::granulation::{granulate_by_method, GranulationConfig};
use crate::normalize::fit_apply_minmax;

/// The k values the kNN baseline is evaluated at.
pub const KNN_GRID: [usize; 8] = [1, 3, 5, 7, 9, 11, 13, 15];

/// Training-time counters reported by a learner.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitStats {
    pub distance_evaluations: u64,
    pub balls: usize,
    pub outliers: usize,
}

pub trait Model {
    fn predict(&self, sample: &Sample) -> Result<Label>;

    fn accuracy(&self, test: &Dataset) -> Result<f64> {
        let mut hits = 0usize;
        for s in test.samples() {
            if self.predict(s)? == s.label {
                hits += 1;
            }
        }
        Ok(hits as f64 / test.len() as f64)
    }
}

pub trait Learner {
    type Model: Model;

    fn fit(&self, train: &Dataset) -> Result<(Self::Model, FitStats)>;

    /// Short configuration summary recorded in reports.
    fn describe(&self) -> String;
}

/// Granulate the training fold, then classify against the ball set.
#[derive(Debug, Clone, PartialEq)]
pub struct GranularBallLearner {
    pub config: GranulationConfig,
    pub rule: DistanceRule,
}

impl GranularBallLearner {
    /// Attention-driven granulation with harmonic-distance classification.
    pub fn gbknn_pp(config: GranulationConfig) -> Self {
        Self {
            config,
            rule: DistanceRule::Harmonic,
        }
    }

    /// k-means granulation with surface-distance classification.
    pub fn gbknn_baseline(config: GranulationConfig) -> Self {
        Self {
            config,
            rule: DistanceRule::Surface,
        }
    }
}

impl Model for BallClassifier {
    fn predict(&self, sample: &Sample) -> Result<Label> {
        BallClassifier::predict(self, &sample.features).map(|p| p.label)
    }
}

impl Learner for GranularBallLearner {
    type Model = BallClassifier;

    fn fit(&self, train: &Dataset) -> Result<(BallClassifier, FitStats)> {
        let result = granulate_by_method(train, &self.config)?;
        let stats = FitStats {
            distance_evaluations: result.distance_evaluations,
            balls: result.balls.len(),
            outliers: result.outliers.len(),
        };
        Ok((BallClassifier::new(result.balls, self.rule)?, stats))
    }

    fn describe(&self) -> String {
        let c = &self.config;
        let mut s = format!(
            "method={} rule={} purity={} am={} outlier_detection={}",
            c.method,
            self.rule.as_str(),
            c.purity_threshold,
            c.enable_am,
            c.enable_outlier_detection
        );
        if c.method == crate::granulation::Method::KMeansBaseline {
            s.push_str(&format!(" kmeans_k={} kmeans_seed={}", c.kmeans_k, c.kmeans_seed));
        }
        s
    }
}

/// Plain kNN whose accuracy is averaged over a grid of k values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnnGridLearner {
    pub ks: Vec<usize>,
}

impl Default for KnnGridLearner {
    fn default() -> Self {
        Self {
            ks: KNN_GRID.to_vec(),
        }
    }
}

pub struct KnnModel {
    train: Dataset,
    ks: Vec<usize>,
}

impl Model for KnnModel {
    /// Prediction at the first k of the grid.
    fn predict(&self, sample: &Sample) -> Result<Label> {
        let k = self.ks[0];
        Ok(predict_knn_multi(&self.train, &sample.features, &[k])?[0])
    }

    /// Mean accuracy over the k grid.
    fn accuracy(&self, test: &Dataset) -> Result<f64> {
        let mut hits = alloc::vec![0usize; self.ks.len()];
        for s in test.samples() {
            for (h, l) in hits
                .iter_mut()
                .zip(predict_knn_multi(&self.train, &s.features, &self.ks)?)
            {
                if l == s.label {
                    *h += 1;
                }
            }
        }
        let per_k: Vec<f64> = hits.iter().map(|&h| h as f64 / test.len() as f64).collect();
        Ok(mean(&per_k))
    }
}

impl Learner for KnnGridLearner {
    type Model = KnnModel;

    fn fit(&self, train: &Dataset) -> Result<(KnnModel, FitStats)> {
        if self.ks.is_empty() {
            return Err(Error::InvalidConfig("empty k grid".into()));
        }
        // clamp so tiny training folds still evaluate every grid point
        let ks = self.ks.iter().map(|&k| k.clamp(1, train.len())).collect();
        Ok((
            KnnModel {
                train: train.clone(),
                ks,
            },
            FitStats::default(),
        ))
    }

    fn describe(&self) -> String {
        format!("method=knn k={:?}", self.ks)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldOutcome {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub accuracy: f64,
    pub fit_seconds: f64,
    pub predict_seconds: f64,
    pub fit: FitStats,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub dataset: String,
    pub learner: String,
    pub folds: usize,
    pub seed: u64,
    pub normalization: String,
    pub per_fold: Vec<FoldOutcome>,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub fit_seconds: f64,
    pub predict_seconds: f64,
    pub distance_evaluations: u64,
}

impl EvalReport {
    pub fn per_fold_accuracies(&self) -> Vec<f64> {
        self.per_fold.iter().map(|f| f.accuracy).collect()
    }

    /// Granulation + training + prediction time summed over folds.
    pub fn total_seconds(&self) -> f64 {
        self.fit_seconds + self.predict_seconds
    }
}

/// Stratified k-fold cross-validation. Each training fold is min-max scaled
/// on its own range and the test fold is scaled with the same parameters.
pub fn cross_validate<L: Learner>(
    dataset: &Dataset,
    learner: &L,
    folds: usize,
    seed: u64,
) -> Result<EvalReport> {
    let mut per_fold = Vec::with_capacity(folds);
    for (f, fold) in stratified_kfold(dataset, folds, seed)?.into_iter().enumerate() {
        let train = dataset.subset(&fold.train)?;
        let test = dataset.subset(&fold.test)?;
        let (train, mut others, _) = fit_apply_minmax(&train, &[&test])?;
        let test = others.pop().expect("one test set");

        let clock = Stopwatch::start();
        let (model, fit) = learner.fit(&train)?;
        let fit_time = clock.elapsed();
        let clock = Stopwatch::start();
        let accuracy = model.accuracy(&test)?;
        let predict_time = clock.elapsed();

        per_fold.push(FoldOutcome {
            fold: f,
            train_size: train.len(),
            test_size: test.len(),
            accuracy,
            fit_seconds: fit_time.as_secs_f64(),
            predict_seconds: predict_time.as_secs_f64(),
            fit,
        });
    }
    let accs: Vec<f64> = per_fold.iter().map(|f| f.accuracy).collect();
    Ok(EvalReport {
        dataset: dataset.name().into(),
        learner: learner.describe(),
        folds,
        seed,
        normalization: "min-max fit on each training fold".into(),
        mean_accuracy: mean(&accs),
        sd_accuracy: sample_sd(&accs),
        fit_seconds: per_fold.iter().map(|f| f.fit_seconds).sum(),
        predict_seconds: per_fold.iter().map(|f| f.predict_seconds).sum(),
        distance_evaluations: per_fold.iter().map(|f| f.fit.distance_evaluations).sum(),
        per_fold,
    })
}

/// Cross-validates a granular-ball classifier built with `config` and `rule`.
pub fn cross_validate_balls(
    dataset: &Dataset,
    config: &GranulationConfig,
    rule: DistanceRule,
    folds: usize,
    seed: u64,
) -> Result<EvalReport> {
    let learner = GranularBallLearner {
        config: config.clone(),
        rule,
    };
    cross_validate(dataset, &learner, folds, seed)
}
