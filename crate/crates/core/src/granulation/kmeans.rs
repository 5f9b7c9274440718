use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ball_on, finish, initial_ball, not_converged, stats};
use super::{Counters, GranulationConfig, GranulationResult, Method};
use crate::ball::BallOrigin;
use crate::clock::Stopwatch;
use crate::counter::DistanceCounter;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::geometry::mean_point;

/// Seeded Lloyd k-means over `points`, returning `k` nonempty clusters of
/// point positions (each ascending).
///
/// The first centroid is a uniformly drawn point; each further centroid is the
/// point farthest from its nearest chosen centroid (ties to the lower
/// position). Assignment ties go to the lower cluster. If a cluster empties,
/// the split is reseeded from the two mutually farthest points; if that still
/// leaves a cluster empty the last seed is split off on its own.
pub fn k_means<R: Rng + ?Sized>(
    points: &[&[f64]],
    k: usize,
    max_rounds: usize,
    rng: &mut R,
    counter: &mut DistanceCounter,
) -> Result<Vec<Vec<usize>>> {
    let n = points.len();
    if k < 2 || n < k {
        return Err(Error::InvalidArgument(format!(
            "k-means needs 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let dim = points[0].len();

    let mut seeds = alloc::vec![rng.gen_range(0..n)];
    let mut nearest: Vec<f64> = points
        .iter()
        .map(|p| counter.measure(p, points[seeds[0]]))
        .collect();
    while seeds.len() < k {
        let next = argmax(&nearest);
        seeds.push(next);
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(counter.measure(p, points[next]));
        }
    }

    let centroids: Vec<Vec<f64>> = seeds.iter().map(|&s| points[s].to_vec()).collect();
    let assign = lloyd(points, centroids, max_rounds, dim, counter)?;
    if let Some(clusters) = nonempty(&assign, k) {
        return Ok(clusters);
    }

    let (a, b) = farthest_pair(points, counter);
    let assign = lloyd(
        points,
        alloc::vec![points[a].to_vec(), points[b].to_vec()],
        max_rounds,
        dim,
        counter,
    )?;
    if let Some(clusters) = nonempty(&assign, 2) {
        return Ok(clusters);
    }
    let lone = *seeds.last().expect("k >= 2 seeds");
    Ok(alloc::vec![
        (0..n).filter(|&i| i != lone).collect(),
        alloc::vec![lone]
    ])
}

/// Seeded 2-means partition of `points` into two nonempty position lists.
pub fn two_means(points: &[&[f64]], seed: u64) -> Result<[Vec<usize>; 2]> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "2-means needs at least 2 points, got {}",
            points.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clusters = k_means(points, 2, 100, &mut rng, &mut DistanceCounter::new())?;
    let second = clusters.pop().expect("two clusters");
    let first = clusters.pop().expect("two clusters");
    Ok([first, second])
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn farthest_pair(points: &[&[f64]], counter: &mut DistanceCounter) -> (usize, usize) {
    let mut best = (0, 1);
    let mut best_d = f64::NEG_INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = counter.measure(points[i], points[j]);
            if d > best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

fn lloyd(
    points: &[&[f64]],
    mut centroids: Vec<Vec<f64>>,
    max_rounds: usize,
    dim: usize,
    counter: &mut DistanceCounter,
) -> Result<Vec<usize>> {
    let mut assign = alloc::vec![usize::MAX; points.len()];
    for _ in 0..max_rounds {
        let mut moved = false;
        for (slot, p) in assign.iter_mut().zip(points) {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = counter.measure(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if *slot != best {
                *slot = best;
                moved = true;
            }
        }
        if !moved {
            break;
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members = points
                .iter()
                .zip(&assign)
                .filter(|(_, &a)| a == c)
                .map(|(p, _)| *p);
            match mean_point(members, dim) {
                Ok(m) => *centroid = m,
                // empty cluster: stop here and let the caller reseed
                Err(Error::EmptyPointSet) => return Ok(assign),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(assign)
}

fn nonempty(assign: &[usize], k: usize) -> Option<Vec<Vec<usize>>> {
    let mut clusters = alloc::vec![Vec::new(); k];
    for (i, &a) in assign.iter().enumerate() {
        clusters[a].push(i);
    }
    clusters.retain(|c| !c.is_empty());
    (clusters.len() >= 2).then_some(clusters)
}

/// Builds a ball set with the original splitter: each impure ball is divided
/// by seeded k-means and every cluster becomes a ball. No orphan removal or
/// nesting resolution; one-member balls are allowed. A single generator
/// seeded from `kmeans_seed` drives every split of the run.
pub fn granulate_kmeans_baseline(
    dataset: &Dataset,
    config: &GranulationConfig,
) -> Result<GranulationResult> {
    config.validate()?;
    if config.method != Method::KMeansBaseline {
        return Err(Error::InvalidConfig(format!(
            "baseline expects method kmeans, got {}",
            config.method
        )));
    }
    let clock = Stopwatch::start();
    let mut rng = ChaCha8Rng::seed_from_u64(config.kmeans_seed);
    let mut counters = Counters::new();
    let mut balls = alloc::vec![initial_ball(dataset, &mut counters)?];
    let mut trace = Vec::new();
    let mut iteration = 0;

    loop {
        if iteration >= config.max_iterations {
            return Err(not_converged(config, &balls));
        }
        iteration += 1;
        let mut changed = false;
        let mut next = Vec::with_capacity(balls.len() * 2);

        for ball in balls {
            if ball.purity >= config.purity_threshold || ball.size() < 2 {
                next.push(ball);
                continue;
            }
            changed = true;
            let points: Vec<&[f64]> = ball
                .members
                .iter()
                .map(|&i| super::lookup(dataset, i).map(|s| s.features.as_slice()))
                .collect::<Result<_>>()?;
            let k = config.kmeans_k.min(points.len());
            let clusters = k_means(
                &points,
                k,
                config.kmeans_max_rounds,
                &mut rng,
                &mut counters.distances,
            )?;
            for cluster in clusters {
                let members = cluster.iter().map(|&p| ball.members[p]).collect();
                next.push(ball_on(
                    dataset,
                    members,
                    ball.generation + 1,
                    BallOrigin::Cluster,
                    &mut counters,
                )?);
            }
        }

        balls = next;
        trace.push(stats(iteration, &balls, 0, config.purity_threshold, &counters));
        if !changed {
            break;
        }
    }

    Ok(finish(
        balls,
        Vec::new(),
        iteration,
        &counters,
        clock.elapsed(),
        config,
        trace,
    ))
}
