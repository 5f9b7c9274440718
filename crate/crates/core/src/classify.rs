//! Nearest-ball and nearest-neighbor classifiers.

use alloc::vec::Vec;

use crate::ball::{BallId, GranularBall};
use crate::counter::DistanceCounter;
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::geometry::mode;

/// How a query is scored against a ball; lower is closer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DistanceRule {
    /// Center distance minus the ball's share of all members.
    Harmonic,
    /// Center distance minus the radius.
    Surface,
}

impl DistanceRule {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceRule::Harmonic => "harmonic",
            DistanceRule::Surface => "surface",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prediction {
    pub label: Label,
    pub ball_id: BallId,
}

/// An immutable ball set with a scoring rule.
#[derive(Debug, Clone, PartialEq)]
pub struct BallClassifier {
    balls: Vec<GranularBall>,
    total_members: usize,
    rule: DistanceRule,
}

impl BallClassifier {
    pub fn new(balls: Vec<GranularBall>, rule: DistanceRule) -> Result<Self> {
        let total_members = balls.iter().map(GranularBall::size).sum();
        if balls.is_empty() || total_members == 0 {
            return Err(Error::EmptyModel);
        }
        Ok(Self {
            balls,
            total_members,
            rule,
        })
    }

    pub fn balls(&self) -> &[GranularBall] {
        &self.balls
    }

    pub fn total_members(&self) -> usize {
        self.total_members
    }

    pub fn rule(&self) -> DistanceRule {
        self.rule
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        self.predict_counted(x, &mut DistanceCounter::new())
    }

    /// Harmonic-distance prediction; fails on a surface-rule classifier.
    pub fn predict_gbknn_pp(&self, x: &[f64]) -> Result<Prediction> {
        if self.rule != DistanceRule::Harmonic {
            return Err(Error::RuleMismatch {
                expected: "harmonic",
            });
        }
        self.predict(x)
    }

    /// Surface-distance prediction; fails on a harmonic-rule classifier.
    pub fn predict_gbknn_original(&self, x: &[f64]) -> Result<Prediction> {
        if self.rule != DistanceRule::Surface {
            return Err(Error::RuleMismatch { expected: "surface" });
        }
        self.predict(x)
    }

    /// Scores of `x` against every ball, in ball order.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut counter = DistanceCounter::new();
        self.check_dim(x)?;
        Ok(self
            .balls
            .iter()
            .map(|b| self.score(b, counter.measure(x, &b.center)))
            .collect())
    }

    /// Arg-min over ball scores, ties to the smallest ball id. Evaluates
    /// exactly one distance per ball.
    pub fn predict_counted(&self, x: &[f64], counter: &mut DistanceCounter) -> Result<Prediction> {
        self.check_dim(x)?;
        let mut best: Option<(f64, &GranularBall)> = None;
        for b in &self.balls {
            let s = self.score(b, counter.measure(x, &b.center));
            let better = match best {
                None => true,
                Some((bs, bb)) => s < bs || (s == bs && b.id < bb.id),
            };
            if better {
                best = Some((s, b));
            }
        }
        let (_, b) = best.expect("classifier has at least one ball");
        Ok(Prediction {
            label: b.label,
            ball_id: b.id,
        })
    }

    pub fn accuracy(&self, test: &Dataset) -> Result<f64> {
        let mut hits = 0usize;
        for s in test.samples() {
            if self.predict(&s.features)?.label == s.label {
                hits += 1;
            }
        }
        Ok(hits as f64 / test.len() as f64)
    }

    fn score(&self, ball: &GranularBall, d: f64) -> f64 {
        match self.rule {
            DistanceRule::Harmonic => d - ball.size() as f64 / self.total_members as f64,
            DistanceRule::Surface => d - ball.radius,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        let expected = self.balls[0].dim();
        if x.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// Training samples ordered by distance to `x`, ties by smaller sample index.
fn neighbors(train: &Dataset, x: &[f64]) -> Result<Vec<(f64, usize, Label)>> {
    if x.len() != train.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: x.len(),
        });
    }
    let mut out: Vec<_> = train
        .samples()
        .iter()
        .map(|s| (crate::geometry::euclidean(x, &s.features), s.index, s.label))
        .collect();
    out.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(out)
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(alloc::format!(
            "k must be in 1..={n}, got {k}"
        )));
    }
    Ok(())
}

/// Majority label of the `k` nearest training samples; label ties go to the
/// smallest label.
pub fn predict_knn(train: &Dataset, x: &[f64], k: usize) -> Result<Label> {
    check_k(k, train.len())?;
    let nn = neighbors(train, x)?;
    Ok(vote(&nn[..k]))
}

/// [`predict_knn`] for several `k` at once, sharing one neighbor ordering.
pub fn predict_knn_multi(train: &Dataset, x: &[f64], ks: &[usize]) -> Result<Vec<Label>> {
    for &k in ks {
        check_k(k, train.len())?;
    }
    let nn = neighbors(train, x)?;
    Ok(ks.iter().map(|&k| vote(&nn[..k])).collect())
}

fn vote(nn: &[(f64, usize, Label)]) -> Label {
    mode(nn.iter().map(|n| n.2)).expect("k >= 1").0
}
