use alloc::format;
use alloc::vec::Vec;

use super::{ball_on, finish, initial_ball, lookup, not_converged, stats};
use super::{Counters, GranulationConfig, GranulationResult, Method};
use crate::ball::{BallOrigin, GranularBall};
use crate::clock::Stopwatch;
use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::geometry::{label_and_purity, mean_point, mean_radius, mode, nesting_counted, Nesting};

/// Splits one impure ball into disjoint children plus orphan candidates.
///
/// While the majority class of the undivided samples `T` has more than one
/// sample, a child is built on that majority class (or on all of `T` with
/// attention disabled) and takes every sample of `T` within its radius.
/// Samples still undivided when the loop stops are returned as orphans.
///
/// Each child costs exactly `|T|` distance evaluations: the distances from
/// `T` to the new center give both the radius and the membership.
pub fn split_ball(
    ball: &GranularBall,
    dataset: &Dataset,
    config: &GranulationConfig,
    counters: &mut Counters,
) -> Result<(Vec<GranularBall>, Vec<usize>)> {
    if ball.size() < 2 {
        return Err(Error::SplitPrecondition(format!(
            "ball {} has {} member(s)",
            ball.id,
            ball.size()
        )));
    }
    if ball.purity >= config.purity_threshold {
        return Err(Error::SplitPrecondition(format!(
            "ball {} purity {} already meets threshold {}",
            ball.id, ball.purity, config.purity_threshold
        )));
    }

    let mut undivided: Vec<&Sample> = ball
        .members
        .iter()
        .map(|&i| lookup(dataset, i))
        .collect::<Result<_>>()?;
    let mut children = Vec::new();
    let mut dist = Vec::with_capacity(undivided.len());

    while let Some((major, count)) = mode(undivided.iter().map(|s| s.label)) {
        if count <= 1 {
            break;
        }
        // each child takes at least one sample, so this only guards against bugs
        if children.len() >= config.max_iterations.max(ball.size()) {
            return Err(Error::SplitDidNotConverge(children.len()));
        }
        let contributes = |s: &Sample| !config.enable_am || s.label == major;

        let center = mean_point(
            undivided
                .iter()
                .filter(|s| contributes(s))
                .map(|s| s.features.as_slice()),
            dataset.dim(),
        )?;
        dist.clear();
        dist.extend(
            undivided
                .iter()
                .map(|s| counters.distances.measure(&s.features, &center)),
        );
        let radius = mean_radius(
            undivided
                .iter()
                .zip(&dist)
                .filter(|(s, _)| contributes(s))
                .map(|(_, &d)| d),
        );

        let mut members = Vec::new();
        let mut rest = Vec::with_capacity(undivided.len());
        for (s, &d) in undivided.iter().zip(&dist) {
            if d <= radius {
                members.push(*s);
            } else {
                rest.push(*s);
            }
        }
        if members.is_empty() {
            // unreachable: the radius is floored at the nearest contributor
            return Err(Error::SplitDidNotConverge(children.len()));
        }
        let labels: Vec<_> = members.iter().map(|s| s.label).collect();
        let (label, purity) = label_and_purity(&labels)?;
        children.push(GranularBall {
            id: counters.next_id(),
            center,
            radius,
            members: members.iter().map(|s| s.index).collect(),
            label,
            purity,
            generation: ball.generation + 1,
            origin: BallOrigin::Split,
        });
        undivided = rest;
    }

    Ok((children, undivided.iter().map(|s| s.index).collect()))
}

/// Removes one-member balls, returning the kept balls (order preserved) and
/// the dropped sample indices.
pub fn detect_orphans(children: Vec<GranularBall>) -> (Vec<GranularBall>, Vec<usize>) {
    let mut dropped = Vec::new();
    let kept = children
        .into_iter()
        .filter(|b| {
            if b.size() == 1 {
                dropped.push(b.members[0]);
                false
            } else {
                true
            }
        })
        .collect();
    (kept, dropped)
}

/// Merges heterogeneous nested pairs until none remain.
///
/// Pairs are scanned in ascending id order; the first conflicting pair is
/// replaced by a ball built on the union of both member sets, appended with a
/// fresh id, and the scan restarts. Homogeneous nestings are left alone.
pub fn deconflict(
    mut children: Vec<GranularBall>,
    dataset: &Dataset,
    counters: &mut Counters,
) -> Result<Vec<GranularBall>> {
    children.sort_by_key(|b| b.id);
    'scan: loop {
        for i in 0..children.len() {
            for j in i + 1..children.len() {
                let nesting = nesting_counted(&children[i], &children[j], &mut counters.distances)?;
                if nesting != Nesting::Heterogeneous {
                    continue;
                }
                let b = children.remove(j);
                let a = children.remove(i);
                let mut members = a.members;
                members.extend(b.members);
                let generation = a.generation.max(b.generation);
                let merged = ball_on(dataset, members, generation, BallOrigin::Merged, counters)?;
                children.push(merged);
                continue 'scan;
            }
        }
        return Ok(children);
    }
}

/// Builds a ball set over `dataset` with the attention-driven splitter.
///
/// Starting from one ball over the whole dataset, every outer iteration
/// splits each ball below the purity threshold, drops orphans (if enabled)
/// and resolves heterogeneous nesting among the children. A ball whose split
/// reproduces it unchanged cannot make progress; it is removed and its
/// samples become outliers. The loop stops once an iteration changes nothing.
pub fn granulate(dataset: &Dataset, config: &GranulationConfig) -> Result<GranulationResult> {
    config.validate()?;
    if config.method != Method::GbgPlusPlus {
        return Err(Error::InvalidConfig(format!(
            "granulate expects method gbg++, got {}",
            config.method
        )));
    }
    let clock = Stopwatch::start();
    let mut counters = Counters::new();
    let mut balls = alloc::vec![initial_ball(dataset, &mut counters)?];
    let mut outliers = Vec::new();
    let mut trace = Vec::new();
    let mut iteration = 0;

    loop {
        if iteration >= config.max_iterations {
            return Err(not_converged(config, &balls));
        }
        iteration += 1;
        let mut changed = false;
        let mut next = Vec::with_capacity(balls.len());

        for ball in balls {
            if ball.purity >= config.purity_threshold {
                next.push(ball);
                continue;
            }
            changed = true;
            let (mut children, orphans) = split_ball(&ball, dataset, config, &mut counters)?;
            if is_unchanged(&ball, &children) {
                outliers.extend_from_slice(&ball.members);
                continue;
            }
            if config.enable_outlier_detection {
                outliers.extend(orphans);
                let (kept, dropped) = detect_orphans(children);
                outliers.extend(dropped);
                children = kept;
            } else {
                for i in orphans {
                    let s = lookup(dataset, i)?;
                    children.push(GranularBall {
                        id: counters.next_id(),
                        center: s.features.clone(),
                        radius: 0.0,
                        members: alloc::vec![i],
                        label: s.label,
                        purity: 1.0,
                        generation: ball.generation + 1,
                        origin: BallOrigin::Singleton,
                    });
                }
            }
            let children = deconflict(children, dataset, &mut counters)?;
            // A merge can rebuild the parent exactly; treat it like a no-op split.
            if is_unchanged(&ball, &children) {
                outliers.extend_from_slice(&ball.members);
                continue;
            }
            next.extend(children);
        }

        balls = next;
        trace.push(stats(
            iteration,
            &balls,
            outliers.len(),
            config.purity_threshold,
            &counters,
        ));
        if !changed {
            break;
        }
    }

    Ok(finish(
        balls,
        outliers,
        iteration,
        &counters,
        clock.elapsed(),
        config,
        trace,
    ))
}

// Children are always drawn from the parent, so equal size means equal sets.
fn is_unchanged(parent: &GranularBall, children: &[GranularBall]) -> bool {
    children.len() == 1 && children[0].size() == parent.size()
}
