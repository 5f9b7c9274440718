//! Acceptance suite. One line per criterion; exits nonzero if an evaluated
//! criterion fails. Criteria that need an absent dataset print as not
//! evaluated and only fail the run when `GBG_ACCEPTANCE_STRICT=1`.

mod support;

use std::collections::BTreeSet;

use gbg::bench::{ablate, evaluate, noisy, Factor, MethodKind, Settings};
use gbg_core::classify::{BallClassifier, DistanceRule};
use gbg_core::eval::wilcoxon_signed_rank;
use gbg_core::geometry::euclidean;
use gbg_core::granulation::{granulate_by_method, GranulationConfig};
use gbg_core::{BallId, BallOrigin, Dataset, GranularBall, Label};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::{csv, fingerprint, normalized, slope, timed, Outcome, Status};

const NOISE_RATES: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

struct Data {
    sonar: Dataset,
    ecoli: Dataset,
    diabetes: Dataset,
    fourclass: Option<Dataset>,
    svmguide1: Option<Dataset>,
}

impl Data {
    fn load() -> Self {
        Self {
            sonar: csv("sonar"),
            ecoli: csv("ecoli"),
            diabetes: csv("diabetes"),
            fourclass: support::fourclass(),
            svmguide1: support::svmguide1(),
        }
    }

    fn uci(&self) -> [&Dataset; 3] {
        [&self.sonar, &self.ecoli, &self.diabetes]
    }
}

fn gbg_config() -> GranulationConfig {
    GranulationConfig::default()
}

fn kmeans_config() -> GranulationConfig {
    GranulationConfig::kmeans_baseline()
}

fn determinism(data: &Data) -> Outcome {
    let mut o = Outcome::new(1, "determinism over 10 repeats");
    let repeat = |o: &mut Outcome, d: &Dataset, cv_reps: usize| {
        let n = normalized(d);
        let prints: BTreeSet<String> = (0..10)
            .map(|_| fingerprint(&granulate_by_method(&n, &gbg_config()).unwrap(), &n))
            .collect();
        let folds: BTreeSet<Vec<u64>> = (0..cv_reps)
            .map(|_| {
                let r = evaluate(d, MethodKind::GbgPlusPlus, &Settings::default()).unwrap();
                r.per_fold.iter().map(|f| f.accuracy.to_bits()).collect()
            })
            .collect();
        o.check(prints.len() == 1 && folds.len() == 1);
        format!(
            "{}: {} distinct ball sets, {} distinct fold-accuracy vectors over {cv_reps} CV runs",
            d.name(),
            prints.len(),
            folds.len()
        )
    };
    match &data.fourclass {
        Some(d) => o.detail = repeat(&mut o, d, 10),
        None => o.missing("fourclass"),
    }
    for d in data.uci() {
        let line = repeat(&mut o, d, 3);
        o.info.push(format!("info (proxy, not the criterion) {line}"));
    }
    if o.detail.is_empty() {
        o.detail = "fourclass not available".into();
    }
    o
}

fn fourclass_accuracy(data: &Data) -> Outcome {
    let mut o = Outcome::new(2, "fourclass GBkNN++ mean accuracy >= 0.97");
    match &data.fourclass {
        Some(d) => {
            let r = evaluate(d, MethodKind::GbgPlusPlus, &Settings::default()).unwrap();
            o.check(r.mean_accuracy >= 0.97);
            o.detail = format!("{:.4} +/- {:.4}", r.mean_accuracy, r.sd_accuracy);
        }
        None => {
            o.missing("fourclass");
            o.detail = "fourclass not available".into();
        }
    }
    o
}

fn uci_accuracy(data: &Data) -> Outcome {
    let mut o = Outcome::new(3, "UCI accuracy within 0.05 of reference");
    let mut parts = Vec::new();
    for (d, reference) in data.uci().into_iter().zip([0.807, 0.863, 0.724]) {
        let r = evaluate(d, MethodKind::GbgPlusPlus, &Settings::default()).unwrap();
        let gap = (r.mean_accuracy - reference).abs();
        o.check(gap <= 0.05);
        parts.push(format!(
            "{} {:.4} +/- {:.4} (ref {reference}, gap {gap:.4})",
            d.name(),
            r.mean_accuracy,
            r.sd_accuracy
        ));
    }
    o.detail = parts.join("; ");
    o
}

/// Checks the structural invariants of one P = 1 granulation. Returns the
/// number of whole-data balls, which are exempt from radius containment.
fn check_invariants(d: &Dataset) -> Result<usize, String> {
    let r = granulate_by_method(d, &gbg_config()).map_err(|e| e.to_string())?;
    let mut seen: Vec<usize> = r.balls.iter().flat_map(|b| b.members.iter().copied()).collect();
    seen.extend(&r.outliers);
    seen.sort_unstable();
    if seen != d.indices().collect::<Vec<_>>() {
        return Err("members and outliers do not partition the data".into());
    }
    let mut exempt = 0;
    for b in &r.balls {
        if b.purity != 1.0 {
            return Err(format!("ball {} has purity {}", b.id.0, b.purity));
        }
        if b.size() < 2 {
            return Err(format!("ball {} has {} member", b.id.0, b.size()));
        }
        let labels: BTreeSet<Label> = b.members.iter().map(|&i| d.get(i).unwrap().label).collect();
        if labels.len() != 1 {
            return Err(format!("ball {} mixes labels", b.id.0));
        }
        if b.origin == BallOrigin::Initial && d.classes().len() == 1 {
            exempt += 1;
            continue;
        }
        for &i in &b.members {
            let dist = euclidean(&d.get(i).unwrap().features, &b.center);
            if dist > b.radius {
                return Err(format!("sample {i} lies {dist} from ball {} (r {})", b.id.0, b.radius));
            }
        }
    }
    Ok(exempt)
}

fn synthetic() -> Vec<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let blobs: Vec<(Vec<f64>, u32)> = (0..300)
        .map(|i| {
            let c = (i % 3) as u32;
            let x = vec![c as f64 + rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)];
            (x, c)
        })
        .collect();
    let (x, y): (Vec<_>, Vec<_>) = blobs.into_iter().unzip();
    vec![
        Dataset::from_rows(vec![vec![0.5, 0.5]; 6], vec![0, 1, 0, 1, 2, 0])
            .unwrap()
            .with_name("conflicting-duplicates"),
        Dataset::from_rows(vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0], vec![1.0]], vec![0, 0, 1, 1, 0])
            .unwrap()
            .with_name("mixed-duplicates"),
        Dataset::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, 0.5]], vec![1, 1, 1])
            .unwrap()
            .with_name("single-class"),
        Dataset::from_rows(vec![vec![0.0], vec![1.0]], vec![0, 1])
            .unwrap()
            .with_name("two-point"),
        Dataset::from_rows(x, y).unwrap().with_name("overlapping-blobs"),
    ]
}

fn invariants(data: &Data) -> Outcome {
    let mut o = Outcome::new(4, "structural invariants at P = 1");
    let mut sets: Vec<Dataset> = data.uci().iter().map(|d| normalized(d)).collect();
    sets.push(normalized(&noisy(&data.diabetes, 0.3, 42).unwrap().with_name("diabetes-noise-0.3")));
    for d in data.fourclass.iter().chain(&data.svmguide1) {
        sets.push(normalized(d));
    }
    sets.extend(synthetic());
    let mut exempt = 0;
    let mut bad = Vec::new();
    for d in &sets {
        match check_invariants(d) {
            Ok(n) => exempt += n,
            Err(e) => bad.push(format!("{}: {e}", d.name())),
        }
    }
    o.check(bad.is_empty());
    o.detail = format!(
        "{} datasets, {} violations, {exempt} whole-data ball(s) on single-class data exempt from containment",
        sets.len(),
        bad.len()
    );
    o.info.extend(bad);
    o
}

fn subsample(d: &Dataset, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, d.len(), n).into_vec();
    idx.sort_unstable();
    d.subset(&idx).unwrap()
}

/// Distance counts and median time of both granulators on `d`.
fn efficiency_line(d: &Dataset) -> (bool, f64, String) {
    let n = normalized(d);
    let (tg, g) = timed(&n, &gbg_config(), 5);
    let (tk, k) = timed(&n, &kmeans_config(), 5);
    let speedup = tk / tg;
    let ok = g.distance_evaluations < k.distance_evaluations;
    let line = format!(
        "{}: distances {} vs {}, median time {:.4}s vs {:.4}s, speedup {speedup:.2}x",
        d.name(),
        g.distance_evaluations,
        k.distance_evaluations,
        tg,
        tk
    );
    (ok, speedup, line)
}

fn growth_slope(d: &Dataset, sizes: &[usize]) -> (f64, String) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut counts = Vec::new();
    for &n in sizes {
        let sub = normalized(&subsample(d, n.min(d.len()), 42));
        let r = granulate_by_method(&sub, &gbg_config()).unwrap();
        xs.push((sub.len() as f64).ln());
        ys.push((r.distance_evaluations as f64).ln());
        counts.push(format!("{}:{}", sub.len(), r.distance_evaluations));
    }
    let s = slope(&xs, &ys);
    (s, format!("slope {s:.3} over [{}]", counts.join(", ")))
}

fn efficiency(data: &Data) -> Outcome {
    let mut o = Outcome::new(5, "efficiency: fewer distances, >= 2x speedup, near-linear growth");
    let mut parts = Vec::new();
    for (name, d) in [("fourclass", &data.fourclass), ("svmguide1", &data.svmguide1)] {
        match d {
            Some(d) => {
                let (fewer, speedup, line) = efficiency_line(d);
                o.check(fewer && speedup >= 2.0);
                parts.push(line);
            }
            None => o.missing(name),
        }
    }
    match &data.svmguide1 {
        Some(d) => {
            let (s, line) = growth_slope(d, &[500, 1000, 2000, 4000, 7089]);
            o.check(s < 1.3);
            parts.push(format!("svmguide1 {line}"));
        }
        None => o.missing("svmguide1 (growth slope)"),
    }
    for d in data.uci() {
        let (_, _, line) = efficiency_line(d);
        o.info.push(format!("info (proxy, not the criterion) {line}"));
    }
    let (_, line) = growth_slope(&data.diabetes, &[96, 192, 384, 768]);
    o.info.push(format!("info (proxy, not the criterion) diabetes {line}"));
    o.detail = if parts.is_empty() {
        "fourclass and svmguide1 not available".into()
    } else {
        parts.join("; ")
    };
    o
}

/// Tallies (dataset, rate) cells where `wins` holds and settles the verdict
/// against `needed` of `total`, counting absent cells as undecided.
struct Tally {
    wins: usize,
    losses: usize,
    needed: usize,
    total: usize,
}

impl Tally {
    fn verdict(&self, o: &mut Outcome) {
        let undecided = self.total - self.wins - self.losses;
        if self.wins >= self.needed {
            o.status = Status::Pass;
        } else if self.wins + undecided < self.needed {
            o.status = Status::Fail;
        } else {
            o.status = Status::Missing;
        }
    }
}

fn noise_robustness(data: &Data) -> Outcome {
    let mut o = Outcome::new(6, "noise: GBkNN++ >= k-means GBkNN in >= 4 of 8 cells");
    let s = Settings::default();
    let mut tally = Tally { wins: 0, losses: 0, needed: 4, total: 8 };
    let mut cells = Vec::new();
    for (name, d) in [("fourclass", &data.fourclass), ("svmguide1", &data.svmguide1)] {
        let Some(d) = d else {
            o.missing(name);
            continue;
        };
        for rate in NOISE_RATES {
            let nd = noisy(d, rate, s.seed).unwrap();
            let g = evaluate(&nd, MethodKind::GbgPlusPlus, &s).unwrap().mean_accuracy;
            let k = evaluate(&nd, MethodKind::KMeans, &s).unwrap().mean_accuracy;
            if g >= k {
                tally.wins += 1;
            } else {
                tally.losses += 1;
            }
            cells.push(format!("{name}@{rate}: {g:.4} vs {k:.4}"));
        }
    }
    for d in [&data.diabetes, &data.ecoli] {
        for rate in NOISE_RATES {
            let nd = noisy(d, rate, s.seed).unwrap();
            let g = evaluate(&nd, MethodKind::GbgPlusPlus, &s).unwrap().mean_accuracy;
            let k = evaluate(&nd, MethodKind::KMeans, &s).unwrap().mean_accuracy;
            o.info.push(format!(
                "info (proxy, not the criterion) {}@{rate}: {g:.4} vs {k:.4}",
                d.name()
            ));
        }
    }
    tally.verdict(&mut o);
    o.detail = format!(
        "{} wins, {} losses, {} cells not evaluated; {}",
        tally.wins,
        tally.losses,
        8 - tally.wins - tally.losses,
        cells.join(", ")
    );
    o
}

fn ablation(data: &Data) -> Outcome {
    let mut o = Outcome::new(7, "ablation: AM on >= off; outlier detection on >= off in >= 6 of 8 cells");
    let s = Settings::default();
    let mut am_ok = true;
    let mut am_missing = false;
    let mut parts = Vec::new();
    for (name, d) in [
        ("sonar", Some(&data.sonar)),
        ("ecoli", Some(&data.ecoli)),
        ("fourclass", data.fourclass.as_ref()),
    ] {
        let Some(d) = d else {
            am_missing = true;
            o.info.push(format!("dataset missing: {name}"));
            continue;
        };
        let row = ablate(d, Factor::Am, 0.0, &s).unwrap();
        am_ok &= row.with.mean_accuracy >= row.without.mean_accuracy;
        parts.push(format!("AM {name} {:.4} vs {:.4}", row.with.mean_accuracy, row.without.mean_accuracy));
    }

    let mut tally = Tally { wins: 0, losses: 0, needed: 6, total: 8 };
    for (name, d) in [("svmguide1", data.svmguide1.as_ref()), ("diabetes", Some(&data.diabetes))] {
        let Some(d) = d else {
            o.info.push(format!("dataset missing: {name}"));
            continue;
        };
        for rate in NOISE_RATES {
            let row = ablate(d, Factor::OutlierDetection, rate, &s).unwrap();
            if row.with.mean_accuracy >= row.without.mean_accuracy {
                tally.wins += 1;
            } else {
                tally.losses += 1;
            }
            parts.push(format!("OD {name}@{rate} {:.4} vs {:.4}", row.with.mean_accuracy, row.without.mean_accuracy));
        }
    }
    let mut od = Outcome::new(7, "");
    tally.verdict(&mut od);
    o.status = if !am_ok || od.status == Status::Fail {
        Status::Fail
    } else if am_missing || od.status == Status::Missing {
        Status::Missing
    } else {
        Status::Pass
    };
    o.detail = format!(
        "AM holds on all evaluated: {am_ok}; OD {} wins, {} losses of 8; {}",
        tally.wins,
        tally.losses,
        parts.join(", ")
    );
    o
}

/// Rank of each |d| by direct counting: 1 + #smaller + (#equal - 1) / 2.
fn brute_wilcoxon(d: &[f64]) -> (f64, f64) {
    let (mut plus, mut minus) = (0.0, 0.0);
    for &a in d {
        let smaller = d.iter().filter(|b| b.abs() < a.abs()).count() as f64;
        let equal = d.iter().filter(|b| b.abs() == a.abs()).count() as f64;
        let rank = 1.0 + smaller + (equal - 1.0) / 2.0;
        if a > 0.0 {
            plus += rank;
        } else if a < 0.0 {
            minus += rank;
        } else {
            plus += rank / 2.0;
            minus += rank / 2.0;
        }
    }
    (plus, minus)
}

fn wilcoxon_oracle() -> Outcome {
    let mut o = Outcome::new(8, "Wilcoxon matches brute-force oracle on 100 vectors");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut n20, mut rejects, mut with_zero, mut mismatches) = (0, 0, 0, 0);
    for case in 0..100 {
        let n = if case % 2 == 0 { 20 } else { rng.gen_range(1..=20) };
        // a coarse grid forces tied magnitudes and exact zeros
        let diffs: Vec<f64> = (0..n)
            .map(|_| {
                let k: i32 = if case % 5 == 0 { rng.gen_range(-1..=5) } else { rng.gen_range(-5..=5) };
                k as f64 / 10.0
            })
            .collect();
        let r = wilcoxon_signed_rank(&diffs);
        let (p, m) = brute_wilcoxon(&diffs);
        let total = (n * (n + 1)) as f64 / 2.0;
        let expected_flag = (n == 20).then_some(p.min(m) <= 52.0);
        let ok = r.r_plus == p
            && r.r_minus == m
            && r.r_plus + r.r_minus == total
            && r.statistic == p.min(m)
            && r.reject_at_0_05 == expected_flag;
        if !ok {
            mismatches += 1;
            o.info.push(format!("case {case}: {diffs:?} gave {r:?}, oracle ({p}, {m})"));
        }
        n20 += usize::from(n == 20);
        rejects += usize::from(r.reject_at_0_05 == Some(true));
        with_zero += usize::from(diffs.contains(&0.0));
    }
    o.check(mismatches == 0);
    o.detail = format!(
        "{mismatches} mismatches; {n20} vectors with N = 20 ({rejects} rejections), {with_zero} containing zeros"
    );
    o
}

fn ball(id: u32, center: Vec<f64>, radius: f64, size: usize, label: u32) -> GranularBall {
    GranularBall {
        id: BallId(id),
        center,
        radius,
        members: (0..size).collect(),
        label: Label(label),
        purity: 1.0,
        generation: 1,
        origin: BallOrigin::Split,
    }
}

fn classifier_oracles() -> Outcome {
    let mut o = Outcome::new(9, "classifier micro-oracles to 1e-12");
    let close = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12);
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };

    let hd = BallClassifier::new(
        vec![ball(1, vec![0.0, 0.0], 1.0, 5, 0), ball(2, vec![4.0, 0.0], 1.0, 5, 1)],
        DistanceRule::Harmonic,
    )
    .unwrap();
    let p = hd.predict_gbknn_pp(&[1.0, 0.0]).unwrap();
    check("harmonic scores", close(&hd.scores(&[1.0, 0.0]).unwrap(), &[0.5, 2.5]));
    check("harmonic argmin", p.ball_id == BallId(1) && p.label == Label(0));

    let boundary = BallClassifier::new(
        vec![ball(0, vec![-1.0, 0.0], 0.2, 1, 0), ball(1, vec![1.0, 0.0], 0.2, 5, 1)],
        DistanceRule::Harmonic,
    )
    .unwrap();
    let p = boundary.predict_gbknn_pp(&[0.0, 0.0]).unwrap();
    check(
        "equal distance, larger ball",
        close(&boundary.scores(&[0.0, 0.0]).unwrap(), &[1.0 - 1.0 / 6.0, 1.0 - 5.0 / 6.0]) && p.ball_id == BallId(1),
    );

    let single = BallClassifier::new(vec![ball(3, vec![0.0], 0.5, 2, 4)], DistanceRule::Harmonic).unwrap();
    check("single ball", single.predict_gbknn_pp(&[100.0]).unwrap().label == Label(4));

    let sd = BallClassifier::new(
        vec![ball(1, vec![0.0, 0.0], 2.0, 3, 0), ball(2, vec![5.0, 0.0], 0.5, 3, 1)],
        DistanceRule::Surface,
    )
    .unwrap();
    check("surface scores", close(&sd.scores(&[3.0, 0.0]).unwrap(), &[1.0, 1.5]));
    check("surface argmin", sd.predict_gbknn_original(&[3.0, 0.0]).unwrap().ball_id == BallId(1));
    check("inside beats outside", {
        let s = sd.scores(&[5.0, 0.0]).unwrap();
        close(&s, &[3.0, -0.5]) && sd.predict_gbknn_original(&[5.0, 0.0]).unwrap().ball_id == BallId(2)
    });
    let tie = BallClassifier::new(
        vec![ball(7, vec![-1.0], 0.5, 2, 1), ball(4, vec![1.0], 0.5, 2, 0)],
        DistanceRule::Surface,
    )
    .unwrap();
    check("surface tie to smaller id", tie.predict_gbknn_original(&[0.0]).unwrap().ball_id == BallId(4));
    check("rule mismatch rejected", hd.predict_gbknn_original(&[0.0, 0.0]).is_err());

    o.check(failures.is_empty());
    o.detail = if failures.is_empty() {
        "harmonic, boundary, single-ball, surface, interior and tie cases agree".into()
    } else {
        format!("failed: {}", failures.join(", "))
    };
    o
}

fn main() {
    let data = Data::load();
    for (d, rows) in [(&data.fourclass, 862), (&data.svmguide1, 7089)] {
        if let Some(d) = d {
            if d.len() != rows {
                println!("warning: {} has {} rows, expected {rows}", d.name(), d.len());
            }
        }
    }
    let strict = std::env::var("GBG_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: [fn(&Data) -> Outcome; 9] = [
        determinism,
        fourclass_accuracy,
        uci_accuracy,
        invariants,
        efficiency,
        noise_robustness,
        ablation,
        |_| wilcoxon_oracle(),
        |_| classifier_oracles(),
    ];
    let mut failed = 0;
    let mut missing = 0;
    for run in criteria {
        let o = run(&data);
        o.print();
        match o.status {
            Status::Pass => {}
            Status::Fail => failed += 1,
            Status::Missing => missing += 1,
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed, {missing} not evaluated (missing data)",
        9 - failed - missing
    );
    if failed > 0 || (strict && missing > 0) {
        std::process::exit(1);
    }
}
