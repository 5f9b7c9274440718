//! Geometric and label primitives shared by the granulators and classifiers.
//!
//! All distances are Euclidean in double precision.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::ball::GranularBall;
use crate::counter::DistanceCounter;
use crate::dataset::{Label, Sample};
use crate::error::{Error, Result};

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let sq: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum();
    libm::sqrt(sq)
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Arithmetic mean of the points, accumulated as offsets from the first
/// point so that coincident points reproduce that point exactly.
pub(crate) fn mean_point<'a, I>(points: I, dim: usize) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut iter = points.into_iter();
    let first = iter.next().ok_or(Error::EmptyPointSet)?;
    check_dim(dim, first.len())?;
    let mut offset = alloc::vec![0.0; dim];
    let mut n = 1usize;
    for p in iter {
        check_dim(dim, p.len())?;
        for ((acc, x), x0) in offset.iter_mut().zip(p).zip(first) {
            *acc += x - x0;
        }
        n += 1;
    }
    let n = n as f64;
    Ok(first
        .iter()
        .zip(&offset)
        .map(|(x0, acc)| x0 + acc / n)
        .collect())
}

/// Mean of `distances`, floored at their minimum.
///
/// The floor only matters when rounding pushes the mean below the smallest
/// term; it keeps the closest contributing point inside the ball.
pub(crate) fn mean_radius(distances: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut n = 0usize;
    for d in distances {
        sum += d;
        min = min.min(d);
        n += 1;
    }
    if n == 0 {
        return 0.0;
    }
    (sum / n as f64).max(min)
}

/// Center (mean) and radius (mean distance to the center) of a point set,
/// counting every distance evaluated.
pub(crate) fn center_radius_counted<'a, I>(
    points: I,
    dim: usize,
    counter: &mut DistanceCounter,
) -> Result<(Vec<f64>, f64)>
where
    I: IntoIterator<Item = &'a [f64]> + Clone,
{
    let center = mean_point(points.clone(), dim)?;
    let radius = mean_radius(points.into_iter().map(|p| counter.measure(p, &center)));
    Ok((center, radius))
}

/// Center and radius of a non-empty point set: the arithmetic mean and the
/// mean Euclidean distance from the points to it.
pub fn compute_center_radius(points: &[&[f64]]) -> Result<(Vec<f64>, f64)> {
    let dim = points.first().ok_or(Error::EmptyPointSet)?.len();
    center_radius_counted(points.iter().copied(), dim, &mut DistanceCounter::new())
}

/// Candidates whose distance to `center` is at most `radius` (boundary
/// inclusive), in input order.
pub fn membership<'a>(
    candidates: impl IntoIterator<Item = &'a Sample>,
    center: &[f64],
    radius: f64,
) -> Result<Vec<&'a Sample>> {
    let mut out = Vec::new();
    for s in candidates {
        check_dim(center.len(), s.features.len())?;
        if euclidean(&s.features, center) <= radius {
            out.push(s);
        }
    }
    Ok(out)
}

/// Mode of the labels and its frequency; ties go to the smallest label.
pub(crate) fn mode<I>(labels: I) -> Option<(Label, usize)>
where
    I: IntoIterator<Item = Label>,
{
    let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    let mut best: Option<(Label, usize)> = None;
    for (l, c) in counts {
        // ascending iteration: strict comparison keeps the smallest label on ties
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((l, c));
        }
    }
    best
}

/// Ball label (mode, smallest on ties) and purity (mode frequency / count).
pub fn label_and_purity(labels: &[Label]) -> Result<(Label, f64)> {
    let (label, count) = mode(labels.iter().copied()).ok_or(Error::EmptyLabels)?;
    Ok((label, count as f64 / labels.len() as f64))
}

/// Samples carrying the mode label of the set (attention score 1), in order.
pub fn majority_class<'a>(samples: &[&'a Sample]) -> Result<Vec<&'a Sample>> {
    let (label, _) = mode(samples.iter().map(|s| s.label)).ok_or(Error::EmptyPointSet)?;
    Ok(samples.iter().copied().filter(|s| s.label == label).collect())
}

/// Distance from `x` to the ball surface; negative inside the ball.
pub fn surface_distance(x: &[f64], ball: &GranularBall) -> Result<f64> {
    check_dim(ball.center.len(), x.len())?;
    Ok(euclidean(x, &ball.center) - ball.radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nesting {
    None,
    Homogeneous,
    Heterogeneous,
}

/// Two balls are nested when their center distance is at most `|r1 - r2|`.
pub fn nesting_relation(a: &GranularBall, b: &GranularBall) -> Result<Nesting> {
    nesting_counted(a, b, &mut DistanceCounter::new())
}

pub(crate) fn nesting_counted(
    a: &GranularBall,
    b: &GranularBall,
    counter: &mut DistanceCounter,
) -> Result<Nesting> {
    check_dim(a.center.len(), b.center.len())?;
    let d = counter.measure(&a.center, &b.center);
    Ok(if d > (a.radius - b.radius).abs() {
        Nesting::None
    } else if a.label == b.label {
        Nesting::Homogeneous
    } else {
        Nesting::Heterogeneous
    })
}
