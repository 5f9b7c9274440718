//! Line-delimited JSON ball-set files.
//!
//! A file is a header record, one record per ball, an outlier record (always
//! present, possibly an empty array) and a counter record, each on its own
//! line and tagged by `"type"`. Floats are written in shortest round-trip
//! form, so import followed by export reproduces a file byte for byte.

use std::fmt;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use gbg_core::granulation::GranulationConfig;
use gbg_core::{BallId, BallOrigin, Dataset, GranularBall, GranulationResult, Label};
use serde::{Deserialize, Serialize};

pub const FORMAT_NAME: &str = "gbg-balls";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum BallFileError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub dataset: String,
    pub samples: usize,
    pub dim: usize,
    pub label_names: Vec<String>,
    pub normalized: bool,
    pub config: GranulationConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub ball_id: BallId,
    pub center: Vec<f64>,
    pub radius: f64,
    pub size: usize,
    pub members: Vec<usize>,
    pub label: Label,
    pub purity: f64,
    pub generation: u32,
    pub origin: BallOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterRecord {
    pub iterations: usize,
    pub distance_evaluations: u64,
    pub balls_created: u32,
    pub wall_time_seconds: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Record {
    Header(Header),
    Ball(BallRecord),
    Outliers { indices: Vec<usize> },
    Counters(CounterRecord),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallFile {
    pub header: Header,
    pub balls: Vec<BallRecord>,
    pub outliers: Vec<usize>,
    pub counters: CounterRecord,
}

impl From<&GranularBall> for BallRecord {
    fn from(b: &GranularBall) -> Self {
        Self {
            ball_id: b.id,
            center: b.center.clone(),
            radius: b.radius,
            size: b.size(),
            members: b.members.clone(),
            label: b.label,
            purity: b.purity,
            generation: b.generation,
            origin: b.origin,
        }
    }
}

impl From<&BallRecord> for GranularBall {
    fn from(r: &BallRecord) -> Self {
        Self {
            id: r.ball_id,
            center: r.center.clone(),
            radius: r.radius,
            members: r.members.clone(),
            label: r.label,
            purity: r.purity,
            generation: r.generation,
            origin: r.origin,
        }
    }
}

impl BallFile {
    pub fn from_result(result: &GranulationResult, dataset: &Dataset) -> Self {
        Self {
            header: Header {
                format: FORMAT_NAME.into(),
                version: FORMAT_VERSION,
                dataset: dataset.name().into(),
                samples: dataset.len(),
                dim: dataset.dim(),
                label_names: dataset.label_names().to_vec(),
                normalized: dataset.is_normalized(),
                config: result.config.clone(),
            },
            balls: result.balls.iter().map(BallRecord::from).collect(),
            outliers: result.outliers.clone(),
            counters: CounterRecord {
                iterations: result.iterations,
                distance_evaluations: result.distance_evaluations,
                balls_created: result.balls_created,
                wall_time_seconds: result.wall_time.as_secs_f64(),
            },
        }
    }

    pub fn balls(&self) -> Vec<GranularBall> {
        self.balls.iter().map(GranularBall::from).collect()
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<(), BallFileError> {
        let mut line = |rec: &Record| -> Result<(), BallFileError> {
            serde_json::to_writer(&mut w, rec).map_err(|e| BallFileError::Json { line: 0, source: e })?;
            w.write_all(b"\n")?;
            Ok(())
        };
        line(&Record::Header(self.header.clone()))?;
        for b in &self.balls {
            line(&Record::Ball(b.clone()))?;
        }
        line(&Record::Outliers {
            indices: self.outliers.clone(),
        })?;
        line(&Record::Counters(self.counters.clone()))?;
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self, BallFileError> {
        let mut header = None;
        let mut balls = Vec::new();
        let mut outliers = None;
        let mut counters = None;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Record =
                serde_json::from_str(&line).map_err(|e| BallFileError::Json { line: i + 1, source: e })?;
            match rec {
                Record::Header(h) => {
                    if h.format != FORMAT_NAME || h.version != FORMAT_VERSION {
                        return Err(BallFileError::Schema(format!(
                            "unsupported format {} version {}",
                            h.format, h.version
                        )));
                    }
                    header = Some(h)
                }
                Record::Ball(b) => {
                    if b.size != b.members.len() {
                        return Err(BallFileError::Schema(format!(
                            "line {}: ball {} size {} but {} members",
                            i + 1,
                            b.ball_id,
                            b.size,
                            b.members.len()
                        )));
                    }
                    balls.push(b)
                }
                Record::Outliers { indices } => outliers = Some(indices),
                Record::Counters(c) => counters = Some(c),
            }
        }
        let missing = |what: &str| BallFileError::Schema(format!("missing {what} record"));
        Ok(Self {
            header: header.ok_or_else(|| missing("header"))?,
            balls,
            outliers: outliers.ok_or_else(|| missing("outliers"))?,
            counters: counters.ok_or_else(|| missing("counters"))?,
        })
    }

    pub fn load(path: &Path) -> Result<Self, BallFileError> {
        Self::read(std::io::BufReader::new(fs::File::open(path)?))
    }

    /// Writes to a sibling temporary file and renames it into place.
    pub fn save(&self, path: &Path) -> Result<(), BallFileError> {
        write_atomic(path, self.to_string().as_bytes())?;
        Ok(())
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

impl fmt::Display for BallFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = Vec::new();
        self.write(&mut buf).map_err(|_| fmt::Error)?;
        f.write_str(std::str::from_utf8(&buf).map_err(|_| fmt::Error)?)
    }
}
