//! Ball-set construction.
//!
//! [`granulate`] runs the attention-driven splitter: every impure ball is
//! split by repeatedly covering the majority class of its undivided samples,
//! leftover singletons are dropped as outliers, and heterogeneous nested
//! children are merged back for another round. [`granulate_kmeans_baseline`]
//! runs the original scheme that splits impure balls with seeded 2-means.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;
use core::str::FromStr;
use core::time::Duration;

use crate::ball::{BallId, BallOrigin, GranularBall};
use crate::counter::DistanceCounter;
use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::geometry::{center_radius_counted, label_and_purity};

mod gbgpp;
mod kmeans;

pub use gbgpp::{deconflict, detect_orphans, granulate, split_ball};
pub use kmeans::{granulate_kmeans_baseline, k_means, two_means};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    #[cfg_attr(feature = "serde", serde(rename = "gbg++"))]
    GbgPlusPlus,
    #[cfg_attr(feature = "serde", serde(rename = "kmeans"))]
    KMeansBaseline,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::GbgPlusPlus => "gbg++",
            Method::KMeansBaseline => "kmeans",
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gbg++" | "gbgpp" => Ok(Method::GbgPlusPlus),
            "kmeans" | "k-means" => Ok(Method::KMeansBaseline),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GranulationConfig {
    /// Balls with purity below this are split. In (0, 1].
    pub purity_threshold: f64,
    pub method: Method,
    /// Drop single-sample children as outliers. When off, leftover samples
    /// are kept as one-member balls.
    pub enable_outlier_detection: bool,
    /// Build each child on the majority class of the undivided samples.
    /// When off, children are built on all undivided samples.
    pub enable_am: bool,
    pub kmeans_seed: u64,
    pub kmeans_k: usize,
    /// Lloyd iteration cap per k-means split.
    pub kmeans_max_rounds: usize,
    /// Outer-iteration cap; exceeding it is an error.
    pub max_iterations: usize,
}

impl Default for GranulationConfig {
    fn default() -> Self {
        Self {
            purity_threshold: 1.0,
            method: Method::GbgPlusPlus,
            enable_outlier_detection: true,
            enable_am: true,
            kmeans_seed: crate::DEFAULT_SEED,
            kmeans_k: 2,
            kmeans_max_rounds: 100,
            max_iterations: 10_000,
        }
    }
}

impl GranulationConfig {
    pub fn kmeans_baseline() -> Self {
        Self {
            method: Method::KMeansBaseline,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.purity_threshold;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "purity threshold must be in (0, 1], got {p}"
            )));
        }
        if self.method == Method::KMeansBaseline && self.kmeans_k < 2 {
            return Err(Error::InvalidConfig(format!(
                "kmeans_k must be at least 2, got {}",
                self.kmeans_k
            )));
        }
        if self.max_iterations == 0 || self.kmeans_max_rounds == 0 {
            return Err(Error::InvalidConfig("iteration caps must be positive".into()));
        }
        Ok(())
    }
}

/// Distance tally and ball-id allocator shared by one granulation run.
#[derive(Debug, Default)]
pub struct Counters {
    pub distances: DistanceCounter,
    next_id: u32,
}

impl Counters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn distance_evaluations(&self) -> u64 {
        self.distances.evaluations()
    }

    /// Number of ball ids handed out so far.
    pub fn balls_created(&self) -> u32 {
        self.next_id
    }

    pub(crate) fn next_id(&mut self) -> BallId {
        let id = BallId(self.next_id);
        self.next_id += 1;
        id
    }
}

/// State after one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationStats {
    pub iteration: usize,
    pub balls: usize,
    pub impure_balls: usize,
    /// Samples inside balls still below the purity threshold.
    pub impure_samples: usize,
    pub outliers: usize,
    /// Cumulative distance evaluations.
    pub distance_evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GranulationResult {
    pub balls: Vec<GranularBall>,
    /// Dropped sample indices, ascending.
    pub outliers: Vec<usize>,
    /// Outer iterations run, including the final one that changed nothing.
    pub iterations: usize,
    pub distance_evaluations: u64,
    pub balls_created: u32,
    pub wall_time: Duration,
    pub config: GranulationConfig,
    pub trace: Vec<IterationStats>,
}

impl GranulationResult {
    /// Total members over all balls.
    pub fn covered(&self) -> usize {
        self.balls.iter().map(GranularBall::size).sum()
    }
}

/// Runs whichever granulator `config.method` names.
pub fn granulate_by_method(dataset: &Dataset, config: &GranulationConfig) -> Result<GranulationResult> {
    match config.method {
        Method::GbgPlusPlus => granulate(dataset, config),
        Method::KMeansBaseline => granulate_kmeans_baseline(dataset, config),
    }
}

pub(crate) fn lookup(dataset: &Dataset, index: usize) -> Result<&Sample> {
    dataset.get(index).ok_or(Error::UnknownIndex(index))
}

/// A ball whose center and radius are computed on exactly `members`.
pub(crate) fn ball_on(
    dataset: &Dataset,
    members: Vec<usize>,
    generation: u32,
    origin: BallOrigin,
    counters: &mut Counters,
) -> Result<GranularBall> {
    let samples = members
        .iter()
        .map(|&i| lookup(dataset, i))
        .collect::<Result<Vec<_>>>()?;
    let (center, radius) = center_radius_counted(
        samples.iter().map(|s| s.features.as_slice()),
        dataset.dim(),
        &mut counters.distances,
    )?;
    let labels: Vec<_> = samples.iter().map(|s| s.label).collect();
    let (label, purity) = label_and_purity(&labels)?;
    Ok(GranularBall {
        id: counters.next_id(),
        center,
        radius,
        members,
        label,
        purity,
        generation,
        origin,
    })
}

pub(crate) fn initial_ball(dataset: &Dataset, counters: &mut Counters) -> Result<GranularBall> {
    ball_on(dataset, dataset.indices().collect(), 0, BallOrigin::Initial, counters)
}

pub(crate) fn stats(
    iteration: usize,
    balls: &[GranularBall],
    outliers: usize,
    threshold: f64,
    counters: &Counters,
) -> IterationStats {
    let impure: Vec<_> = balls.iter().filter(|b| b.purity < threshold).collect();
    IterationStats {
        iteration,
        balls: balls.len(),
        impure_balls: impure.len(),
        impure_samples: impure.iter().map(|b| b.size()).sum(),
        outliers,
        distance_evaluations: counters.distance_evaluations(),
    }
}

pub(crate) fn not_converged(
    config: &GranulationConfig,
    balls: &[GranularBall],
) -> Error {
    let impure = balls
        .iter()
        .filter(|b| b.purity < config.purity_threshold)
        .count();
    let mut dump = String::new();
    for b in balls.iter().take(50) {
        let _ = write!(
            dump,
            "[id {} size {} label {} purity {:.4} radius {:.6}] ",
            b.id,
            b.size(),
            b.label,
            b.purity,
            b.radius
        );
    }
    if balls.len() > 50 {
        let _ = write!(dump, "... {} more", balls.len() - 50);
    }
    Error::GranulationDidNotConverge {
        max_iterations: config.max_iterations,
        balls: balls.len(),
        impure,
        dump,
    }
}

pub(crate) fn finish(
    balls: Vec<GranularBall>,
    mut outliers: Vec<usize>,
    iterations: usize,
    counters: &Counters,
    wall_time: Duration,
    config: &GranulationConfig,
    trace: Vec<IterationStats>,
) -> GranulationResult {
    outliers.sort_unstable();
    GranulationResult {
        balls,
        outliers,
        iterations,
        distance_evaluations: counters.distance_evaluations(),
        balls_created: counters.balls_created(),
        wall_time,
        config: config.clone(),
        trace,
    }
}
