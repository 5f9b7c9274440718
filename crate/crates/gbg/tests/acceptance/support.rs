use std::path::{Path, PathBuf};
use std::time::Instant;

use gbg::balls::BallFile;
use gbg::io::{load_dataset, load_libsvm_concat, LoadOptions};
use gbg_core::granulation::{granulate_by_method, GranulationConfig};
use gbg_core::{Dataset, GranulationResult, NormalizationParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A required dataset file is absent; the criterion was not evaluated.
    Missing,
}

pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
    pub info: Vec<String>,
}

impl Outcome {
    pub fn new(id: u8, title: &'static str) -> Self {
        Self {
            id,
            title,
            status: Status::Pass,
            detail: String::new(),
            info: Vec::new(),
        }
    }

    pub fn check(&mut self, ok: bool) {
        if !ok && self.status == Status::Pass {
            self.status = Status::Fail;
        }
    }

    pub fn missing(&mut self, what: &str) {
        if self.status != Status::Fail {
            self.status = Status::Missing;
        }
        self.info.push(format!("dataset missing: {what}"));
    }

    pub fn print(&self) {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Missing => "FAIL (not evaluated: dataset missing)",
        };
        println!("[{tag}] {}. {}: {}", self.id, self.title, self.detail);
        for line in &self.info {
            println!("        {line}");
        }
    }
}

pub fn data_dir() -> PathBuf {
    std::env::var_os("GBG_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn first_existing(stem: &str) -> Option<PathBuf> {
    let dir = data_dir();
    ["", ".libsvm", ".txt", ".csv"]
        .iter()
        .map(|ext| dir.join(format!("{stem}{ext}")))
        .find(|p| p.is_file())
}

pub fn csv(name: &str) -> Dataset {
    let p = data_dir().join(format!("{name}.csv"));
    load_dataset(&p, &LoadOptions::default())
        .unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn fourclass() -> Option<Dataset> {
    let p = first_existing("fourclass")?;
    load_dataset(&p, &LoadOptions::default()).ok()
}

/// svmguide1 train and test splits together (3089 + 4000 rows).
pub fn svmguide1() -> Option<Dataset> {
    let train = first_existing("svmguide1")?;
    if train.extension().is_some_and(|e| e == "csv") {
        return load_dataset(&train, &LoadOptions::default()).ok();
    }
    let test = data_dir().join("svmguide1.t");
    let d = if test.is_file() {
        load_libsvm_concat(&[&train, &test], None)
    } else {
        load_libsvm_concat(&[&train], None)
    };
    d.ok().map(|d| d.with_name("svmguide1"))
}

pub fn normalized(d: &Dataset) -> Dataset {
    NormalizationParams::fit(d).apply(d).expect("fresh dataset")
}

/// Canonical text of a result with the timing zeroed, for bitwise comparison.
pub fn fingerprint(r: &GranulationResult, d: &Dataset) -> String {
    let mut f = BallFile::from_result(r, d);
    f.counters.wall_time_seconds = 0.0;
    f.to_string()
}

/// Median wall time and the last result over `reps` granulations.
pub fn timed(d: &Dataset, cfg: &GranulationConfig, reps: usize) -> (f64, GranulationResult) {
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let t = Instant::now();
        let r = granulate_by_method(d, cfg).expect("granulation");
        times.push(t.elapsed().as_secs_f64());
        last = Some(r);
    }
    times.sort_by(f64::total_cmp);
    (times[reps / 2], last.expect("reps > 0"))
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
