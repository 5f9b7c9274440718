//! Cross-validation runs shared by the CLI and the acceptance suite, and the
//! report records they produce.

use std::fmt::Write as _;
use std::str::FromStr;

use gbg_core::eval::{
    cross_validate, inject_label_noise, lnt, wilcoxon_signed_rank, EvalReport, GranularBallLearner,
    KnnGridLearner, KNN_GRID,
};
use gbg_core::granulation::GranulationConfig;
use gbg_core::{Dataset, Method, DEFAULT_SEED};
use serde::{Deserialize, Serialize};

use crate::manifest::RunManifest;

/// A classifier under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodKind {
    /// Attention-driven granulation + harmonic-distance classification.
    #[serde(rename = "gbg++")]
    GbgPlusPlus,
    /// k-means granulation + surface-distance classification.
    #[serde(rename = "kmeans")]
    KMeans,
    #[serde(rename = "knn")]
    Knn,
}

impl MethodKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodKind::GbgPlusPlus => "gbg++",
            MethodKind::KMeans => "kmeans",
            MethodKind::Knn => "knn",
        }
    }

    pub fn uses_purity(self) -> bool {
        self != MethodKind::Knn
    }
}

impl FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gbg++" | "gbgpp" => Ok(MethodKind::GbgPlusPlus),
            "kmeans" | "k-means" => Ok(MethodKind::KMeans),
            "knn" => Ok(MethodKind::Knn),
            other => Err(format!("unknown method {other:?} (expected gbg++, kmeans or knn)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub folds: usize,
    pub seed: u64,
    pub purity: f64,
    pub enable_am: bool,
    pub enable_outlier_detection: bool,
    pub kmeans_seed: u64,
    pub knn_ks: Vec<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            folds: 10,
            seed: DEFAULT_SEED,
            purity: 1.0,
            enable_am: true,
            enable_outlier_detection: true,
            kmeans_seed: DEFAULT_SEED,
            knn_ks: KNN_GRID.to_vec(),
        }
    }
}

impl Settings {
    pub fn granulation(&self, method: Method) -> GranulationConfig {
        GranulationConfig {
            purity_threshold: self.purity,
            method,
            enable_outlier_detection: self.enable_outlier_detection,
            enable_am: self.enable_am,
            kmeans_seed: self.kmeans_seed,
            ..GranulationConfig::default()
        }
    }
}

/// Cross-validates `method` on `dataset` (already noisy, if noise applies).
pub fn evaluate(dataset: &Dataset, method: MethodKind, s: &Settings) -> gbg_core::Result<EvalReport> {
    match method {
        MethodKind::GbgPlusPlus => cross_validate(
            dataset,
            &GranularBallLearner::gbknn_pp(s.granulation(Method::GbgPlusPlus)),
            s.folds,
            s.seed,
        ),
        MethodKind::KMeans => cross_validate(
            dataset,
            &GranularBallLearner::gbknn_baseline(s.granulation(Method::KMeansBaseline)),
            s.folds,
            s.seed,
        ),
        MethodKind::Knn => cross_validate(
            dataset,
            &KnnGridLearner {
                ks: s.knn_ks.clone(),
            },
            s.folds,
            s.seed,
        ),
    }
}

/// Applies label noise at `rate` with the run seed; rate 0 is a no-op.
pub fn noisy(dataset: &Dataset, rate: f64, seed: u64) -> gbg_core::Result<Dataset> {
    inject_label_noise(dataset, rate, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub dataset: String,
    pub method: MethodKind,
    pub learner: String,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub per_fold_accuracies: Vec<f64>,
    pub seconds: f64,
    /// Natural log of `seconds`; absent when no time was measured.
    pub lnt: Option<f64>,
    pub distance_evaluations: u64,
    pub mean_balls: f64,
}

impl Row {
    pub fn new(method: MethodKind, report: &EvalReport) -> Self {
        let seconds = report.total_seconds();
        Self {
            dataset: report.dataset.clone(),
            method,
            learner: report.learner.clone(),
            mean_accuracy: report.mean_accuracy,
            sd_accuracy: report.sd_accuracy,
            per_fold_accuracies: report.per_fold_accuracies(),
            seconds,
            lnt: lnt(seconds).ok(),
            distance_evaluations: report.distance_evaluations,
            mean_balls: report.per_fold.iter().map(|f| f.fit.balls as f64).sum::<f64>()
                / report.per_fold.len().max(1) as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonLine {
    pub a: MethodKind,
    pub b: MethodKind,
    /// "datasets" when differences are per-dataset means, "folds" otherwise.
    pub paired_over: String,
    pub n: usize,
    pub r_plus: f64,
    pub r_minus: f64,
    pub statistic: f64,
    pub reject_at_0_05: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub noise_rate: f64,
    pub purity: f64,
    pub rows: Vec<Row>,
    pub wilcoxon: Vec<WilcoxonLine>,
}

impl Section {
    /// Pairs every two methods present in the section. With several datasets
    /// the paired values are per-dataset mean accuracies; with one dataset
    /// they are per-fold accuracies.
    pub fn add_wilcoxon(&mut self, methods: &[MethodKind]) {
        let datasets: Vec<&str> = {
            let mut d: Vec<&str> = self.rows.iter().map(|r| r.dataset.as_str()).collect();
            d.dedup();
            d
        };
        let find = |ds: &str, m: MethodKind| self.rows.iter().find(|r| r.dataset == ds && r.method == m);
        let mut lines = Vec::new();
        for (i, &a) in methods.iter().enumerate() {
            for &b in &methods[i + 1..] {
                let (diffs, over): (Vec<f64>, &str) = if datasets.len() >= 2 {
                    (
                        datasets
                            .iter()
                            .filter_map(|ds| Some(find(ds, a)?.mean_accuracy - find(ds, b)?.mean_accuracy))
                            .collect(),
                        "datasets",
                    )
                } else {
                    let (Some(ra), Some(rb)) = (
                        datasets.first().and_then(|ds| find(ds, a)),
                        datasets.first().and_then(|ds| find(ds, b)),
                    ) else {
                        continue;
                    };
                    (
                        ra.per_fold_accuracies
                            .iter()
                            .zip(&rb.per_fold_accuracies)
                            .map(|(x, y)| x - y)
                            .collect(),
                        "folds",
                    )
                };
                if diffs.is_empty() {
                    continue;
                }
                let w = wilcoxon_signed_rank(&diffs);
                lines.push(WilcoxonLine {
                    a,
                    b,
                    paired_over: over.into(),
                    n: w.n,
                    r_plus: w.r_plus,
                    r_minus: w.r_minus,
                    statistic: w.statistic,
                    reject_at_0_05: w.reject_at_0_05,
                });
            }
        }
        self.wilcoxon = lines;
    }
}

/// One run that did not complete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub dataset: String,
    pub run: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub manifest: RunManifest,
    pub sections: Vec<Section>,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub per_fold_accuracies: Vec<f64>,
}

impl From<&EvalReport> for Arm {
    fn from(r: &EvalReport) -> Self {
        Self {
            mean_accuracy: r.mean_accuracy,
            sd_accuracy: r.sd_accuracy,
            per_fold_accuracies: r.per_fold_accuracies(),
        }
    }
}

/// Ablation factor toggled between the two arms of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Am,
    OutlierDetection,
}

impl Factor {
    pub fn as_str(self) -> &'static str {
        match self {
            Factor::Am => "am",
            Factor::OutlierDetection => "outlier_detection",
        }
    }

    pub fn disable(self, s: &Settings) -> Settings {
        let mut s = s.clone();
        match self {
            Factor::Am => s.enable_am = false,
            Factor::OutlierDetection => s.enable_outlier_detection = false,
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub dataset: String,
    pub noise_rate: f64,
    pub factor: Factor,
    pub with: Arm,
    pub without: Arm,
}

/// Runs one GBkNN++ pair: default settings against `factor` disabled.
pub fn ablate(dataset: &Dataset, factor: Factor, rate: f64, s: &Settings) -> gbg_core::Result<AblationRow> {
    let data = noisy(dataset, rate, s.seed)?;
    let with = evaluate(&data, MethodKind::GbgPlusPlus, s)?;
    let without = evaluate(&data, MethodKind::GbgPlusPlus, &factor.disable(s))?;
    Ok(AblationRow {
        dataset: dataset.name().into(),
        noise_rate: rate,
        factor,
        with: Arm::from(&with),
        without: Arm::from(&without),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub manifest: RunManifest,
    pub rows: Vec<AblationRow>,
    pub failures: Vec<Failure>,
}

pub fn format_sections(sections: &[Section]) -> String {
    let mut out = String::new();
    for s in sections {
        let _ = writeln!(out, "noise {:.2}  purity {:.2}", s.noise_rate, s.purity);
        let _ = writeln!(
            out,
            "  {:<14} {:<7} {:>8} {:>8} {:>9} {:>14} {:>9}",
            "dataset", "method", "mean", "sd", "lnt", "distances", "balls"
        );
        for r in &s.rows {
            let lnt = r.lnt.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
            let _ = writeln!(
                out,
                "  {:<14} {:<7} {:>8.4} {:>8.4} {:>9} {:>14} {:>9.1}",
                r.dataset,
                r.method.as_str(),
                r.mean_accuracy,
                r.sd_accuracy,
                lnt,
                r.distance_evaluations,
                r.mean_balls
            );
        }
        for w in &s.wilcoxon {
            let verdict = match w.reject_at_0_05 {
                Some(true) => "reject",
                Some(false) => "keep",
                None => "n/a",
            };
            let _ = writeln!(
                out,
                "  wilcoxon {} vs {} over {} (N={}): R+={} R-={} T={} [{}]",
                w.a.as_str(),
                w.b.as_str(),
                w.paired_over,
                w.n,
                w.r_plus,
                w.r_minus,
                w.statistic,
                verdict
            );
        }
    }
    out
}

pub fn format_ablation(rows: &[AblationRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:>6} {:<18} {:>15} {:>15}",
        "dataset", "noise", "factor", "with", "without"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<14} {:>6.2} {:<18} {:>7.4}±{:<7.4} {:>7.4}±{:<7.4}",
            r.dataset,
            r.noise_rate,
            r.factor.as_str(),
            r.with.mean_accuracy,
            r.with.sd_accuracy,
            r.without.mean_accuracy,
            r.without.sd_accuracy
        );
    }
    out
}

pub fn format_failures(failures: &[Failure]) -> String {
    let mut out = String::new();
    for f in failures {
        let _ = writeln!(out, "FAILED {} [{}]: {}", f.dataset, f.run, f.error);
    }
    out
}
