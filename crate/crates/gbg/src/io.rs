//! CSV and LIBSVM dataset loaders.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gbg_core::Dataset;

pub use gbg_core::normalize::{fit_apply_minmax, NormalizationParams};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("label column {0} not found")]
    MissingLabelColumn(String),
    #[error("no data rows")]
    Empty,
    #[error(transparent)]
    Dataset(#[from] gbg_core::Error),
}

fn parse_err(line: u64, message: impl Into<String>) -> LoadError {
    LoadError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Libsvm,
}

impl Format {
    /// `.csv` files are CSV; anything else is taken to be LIBSVM.
    pub fn infer(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Libsvm,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "libsvm" | "svmlight" => Ok(Format::Libsvm),
            other => Err(format!("unknown format {other:?} (expected csv or libsvm)")),
        }
    }
}

/// Which CSV column holds the label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    /// Zero-based column index.
    Index(usize),
    /// Header name; requires a header row.
    Name(String),
}

impl FromStr for LabelColumn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "last" {
            Ok(LabelColumn::Last)
        } else if let Ok(i) = s.parse() {
            Ok(LabelColumn::Index(i))
        } else if s.is_empty() {
            Err("empty label column".into())
        } else {
            Ok(LabelColumn::Name(s.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadOptions {
    pub format: Option<Format>,
    pub has_header: bool,
    pub label_column: LabelColumn,
    /// LIBSVM dimensionality; inferred from the largest index when absent.
    pub dim: Option<usize>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            format: None,
            has_header: true,
            label_column: LabelColumn::Last,
            dim: None,
        }
    }
}

/// Maps raw label strings to dense ids. Labels that all parse as numbers
/// are ordered numerically, otherwise lexicographically.
fn encode_labels(raw: &[String]) -> (Vec<u32>, Vec<String>) {
    let mut names: Vec<String> = raw
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let numeric: Option<Vec<f64>> = names.iter().map(|n| n.parse::<f64>().ok()).collect();
    if let Some(values) = numeric {
        let mut paired: Vec<(f64, String)> = values.into_iter().zip(names).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        names = paired.into_iter().map(|(_, n)| n).collect();
    }
    let ids = raw
        .iter()
        .map(|r| names.iter().position(|n| n == r).expect("label collected") as u32)
        .collect();
    (ids, names)
}

fn build(features: Vec<Vec<f64>>, raw_labels: Vec<String>, name: &str) -> Result<Dataset, LoadError> {
    if features.is_empty() {
        return Err(LoadError::Empty);
    }
    let (ids, names) = encode_labels(&raw_labels);
    Ok(Dataset::from_rows(features, ids)?
        .with_name(name)
        .with_label_names(names))
}

fn parse_value(s: &str, line: u64, column: usize) -> Result<f64, LoadError> {
    let v: f64 = s
        .parse()
        .map_err(|_| parse_err(line, format!("column {column}: non-numeric value {s:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("column {column}: non-finite value {s:?}")));
    }
    Ok(v)
}

pub fn read_csv<R: Read>(reader: R, opts: &LoadOptions, name: &str) -> Result<Dataset, LoadError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(opts.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let label_col = match &opts.label_column {
        LabelColumn::Name(n) => {
            if !opts.has_header {
                return Err(LoadError::MissingLabelColumn(format!("{n:?} (no header row)")));
            }
            let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?;
            Some(
                headers
                    .iter()
                    .position(|h| h == n)
                    .ok_or_else(|| LoadError::MissingLabelColumn(format!("{n:?}")))?,
            )
        }
        LabelColumn::Index(i) => Some(*i),
        LabelColumn::Last => None,
    };

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let n = record.len();
        if *width.get_or_insert(n) != n {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {n}", width.unwrap_or(n)),
            ));
        }
        let col = label_col.unwrap_or(n - 1);
        if col >= n || n < 2 {
            return Err(LoadError::MissingLabelColumn(format!("{col} (row has {n} fields)")));
        }
        let mut row = Vec::with_capacity(n - 1);
        for (j, field) in record.iter().enumerate() {
            if j != col {
                row.push(parse_value(field, line, j)?);
            }
        }
        features.push(row);
        labels.push(record[col].to_string());
    }
    build(features, labels, name)
}

pub fn read_libsvm<R: BufRead>(reader: R, dim: Option<usize>, name: &str) -> Result<Dataset, LoadError> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| parse_err(line_no, e.to_string()))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("non-empty line");
        let mut row = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(line_no, format!("expected index:value, found {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad feature index {idx:?}")))?;
            if idx == 0 {
                return Err(parse_err(line_no, "feature indices are 1-based"));
            }
            if let Some(q) = dim {
                if idx > q {
                    return Err(parse_err(line_no, format!("feature index {idx} exceeds dimension {q}")));
                }
            }
            max_index = max_index.max(idx);
            row.push((idx, parse_value(val, line_no, idx)?));
        }
        rows.push(row);
        labels.push(label.to_string());
    }
    let q = dim.unwrap_or(max_index);
    let features = rows
        .into_iter()
        .map(|row| {
            let mut dense = vec![0.0; q];
            for (idx, v) in row {
                dense[idx - 1] = v;
            }
            dense
        })
        .collect();
    build(features, labels, name)
}

fn open(path: &Path) -> Result<File, LoadError> {
    File::open(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Loads one dataset file. Row order is preserved and sample indices are
/// the data-row positions starting at 0.
pub fn load_dataset(path: &Path, opts: &LoadOptions) -> Result<Dataset, LoadError> {
    let file = open(path)?;
    match opts.format.unwrap_or_else(|| Format::infer(path)) {
        Format::Csv => read_csv(file, opts, &stem(path)),
        Format::Libsvm => read_libsvm(BufReader::new(file), opts.dim, &stem(path)),
    }
}

/// Loads several LIBSVM files as one dataset (for example a train and test
/// split), sharing one label mapping and dimensionality.
pub fn load_libsvm_concat(paths: &[&Path], dim: Option<usize>) -> Result<Dataset, LoadError> {
    let mut text = String::new();
    for p in paths {
        open(p)?
            .read_to_string(&mut text)
            .map_err(|source| LoadError::Io {
                path: p.to_path_buf(),
                source,
            })?;
        if !text.ends_with('\n') {
            text.push('\n');
        }
    }
    let name = paths.first().map(|p| stem(p)).unwrap_or_default();
    read_libsvm(text.as_bytes(), dim, &name)
}
