//! `gbg` command-line interface.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use gbg_core::granulation::{granulate_by_method, GranulationConfig};
use gbg_core::{Dataset, Method, NormalizationParams, DEFAULT_SEED};

use crate::balls::{write_atomic, BallFile};
use crate::bench::{
    ablate, evaluate, format_ablation, format_failures, format_sections, noisy, AblationReport,
    BenchmarkReport, Factor, Failure, MethodKind, Row, Section, Settings,
};
use crate::io::{load_dataset, Format, LabelColumn, LoadOptions};
use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "gbg", version, about = "Granular-ball generation and classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a ball set from one dataset and write it as a ball file.
    Granulate(GranulateArgs),
    /// Cross-validate methods over datasets, noise rates and purity thresholds.
    Benchmark(BenchmarkArgs),
    /// Paired runs with attention or outlier detection switched off.
    Ablate(AblateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputOptions {
    /// Input format; inferred from the extension when omitted (.csv is CSV,
    /// anything else LIBSVM).
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
    /// CSV label column: "last", a zero-based index, or a header name.
    #[arg(long, default_value = "last", value_parser = parse_label_column)]
    pub label_column: LabelColumn,
    /// CSV files have no header row.
    #[arg(long)]
    pub no_header: bool,
    /// LIBSVM dimensionality (default: largest feature index).
    #[arg(long)]
    pub dim: Option<usize>,
}

impl InputOptions {
    fn load(&self, path: &Path) -> anyhow::Result<Dataset> {
        let opts = LoadOptions {
            format: self.format,
            has_header: !self.no_header,
            label_column: self.label_column.clone(),
            dim: self.dim,
        };
        load_dataset(path, &opts).with_context(|| format!("loading {}", path.display()))
    }
}

#[derive(Debug, Args)]
pub struct GranulateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub io: InputOptions,
    /// Purity threshold in (0, 1].
    #[arg(long, default_value_t = 1.0, value_parser = parse_purity)]
    pub purity: f64,
    #[arg(long, default_value = "gbg++", value_parser = parse_method)]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub kmeans_seed: u64,
    #[arg(long, default_value_t = 2)]
    pub kmeans_k: usize,
    #[arg(long)]
    pub no_am: bool,
    #[arg(long)]
    pub no_outlier_detection: bool,
    /// Min-max scale the features to [0, 1] before granulating.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, default_value_t = 10_000)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunOptions {
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Seed for fold assignment and label noise.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub kmeans_seed: u64,
    /// Label-noise rates, comma separated (e.g. 0.1,0.2,0.3,0.4).
    #[arg(long, value_delimiter = ',', value_parser = parse_rate)]
    pub noise: Vec<f64>,
    #[arg(long, default_value_t = 1.0, value_parser = parse_purity)]
    pub purity: f64,
    #[arg(long)]
    pub no_am: bool,
    #[arg(long)]
    pub no_outlier_detection: bool,
    /// Report file (JSON).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl RunOptions {
    fn settings(&self) -> Settings {
        Settings {
            folds: self.folds,
            seed: self.seed,
            purity: self.purity,
            enable_am: !self.no_am,
            enable_outlier_detection: !self.no_outlier_detection,
            kmeans_seed: self.kmeans_seed,
            ..Settings::default()
        }
    }

    fn noise_rates(&self) -> Vec<f64> {
        if self.noise.is_empty() {
            vec![0.0]
        } else {
            self.noise.clone()
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Dataset files (repeat the flag or separate with commas).
    #[arg(long, required = true, value_delimiter = ',')]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub io: InputOptions,
    /// Methods to compare: gbg++, kmeans, knn.
    #[arg(long, value_delimiter = ',', default_value = "gbg++,kmeans,knn", value_parser = parse_method_kind)]
    pub method: Vec<MethodKind>,
    /// Purity thresholds as start:end:step (e.g. 0.5:1.0:0.1).
    #[arg(long, value_parser = parse_sweep)]
    pub purity_sweep: Option<Sweep>,
    /// k values for the kNN baseline; accuracy is averaged over them.
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,7,9,11,13,15")]
    pub knn_k: Vec<usize>,
    #[command(flatten)]
    pub run: RunOptions,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long, required = true, value_delimiter = ',')]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub io: InputOptions,
    #[command(flatten)]
    pub run: RunOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep(pub Vec<f64>);

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_label_column(s: &str) -> Result<LabelColumn, String> {
    s.parse()
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: gbg_core::Error| e.to_string())
}

fn parse_method_kind(s: &str) -> Result<MethodKind, String> {
    s.parse()
}

fn parse_purity(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if p > 0.0 && p <= 1.0 {
        Ok(p)
    } else {
        Err(format!("purity must be in (0, 1], got {p}"))
    }
}

fn parse_rate(s: &str) -> Result<f64, String> {
    let r: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if (0.0..=1.0).contains(&r) {
        Ok(r)
    } else {
        Err(format!("noise rate must be in [0, 1], got {r}"))
    }
}

pub fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts[..] else {
        return Err(format!("expected start:end:step, got {s:?}"));
    };
    let num = |v: &str| v.parse::<f64>().map_err(|_| format!("not a number: {v:?}"));
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if !(step > 0.0) || b < a {
        return Err("sweep needs start <= end and a positive step".into());
    }
    let n = ((b - a) / step + 1e-9).floor() as usize + 1;
    // snap to 1e-9 so 0.1 steps give 0.7, not 0.7000000000000001
    let values: Vec<f64> = (0..n)
        .map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9)
        .collect();
    for &v in &values {
        parse_purity(&v.to_string())?;
    }
    Ok(Sweep(values))
}

/// Parses arguments, runs the command and maps the outcome to an exit code:
/// 0 when every requested run completed, 1 otherwise, 2 for usage errors.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether every run completed.
pub fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Granulate(a) => granulate(a).map(|_| true),
        Command::Benchmark(a) => benchmark(a),
        Command::Ablate(a) => ablation(a),
    }
}

fn granulate(a: GranulateArgs) -> anyhow::Result<()> {
    let mut data = a.io.load(&a.input)?;
    if a.normalize {
        data = NormalizationParams::fit(&data).apply(&data)?;
    }
    let config = GranulationConfig {
        purity_threshold: a.purity,
        method: a.method,
        enable_outlier_detection: !a.no_outlier_detection,
        enable_am: !a.no_am,
        kmeans_seed: a.kmeans_seed,
        kmeans_k: a.kmeans_k,
        max_iterations: a.max_iterations,
        ..GranulationConfig::default()
    };
    let result = granulate_by_method(&data, &config)?;
    BallFile::from_result(&result, &data)
        .save(&a.output)
        .with_context(|| format!("writing {}", a.output.display()))?;

    let min_purity = result.balls.iter().map(|b| b.purity).fold(f64::INFINITY, f64::min);
    println!("dataset               {} ({} samples, {} features)", data.name(), data.len(), data.dim());
    println!("method                {}", config.method);
    println!("balls                 {}", result.balls.len());
    println!("outliers              {}", result.outliers.len());
    println!("iterations            {}", result.iterations);
    println!("distance_evaluations  {}", result.distance_evaluations);
    println!("wall_time_seconds     {:.6}", result.wall_time.as_secs_f64());
    if min_purity.is_finite() {
        println!("min_purity            {min_purity}");
    }
    println!("output                {}", a.output.display());
    Ok(())
}

fn load_all(paths: &[PathBuf], io: &InputOptions) -> anyhow::Result<Vec<Dataset>> {
    if paths.is_empty() {
        bail!("no input datasets given");
    }
    paths.iter().map(|p| io.load(p)).collect()
}

fn write_report<T: serde::Serialize>(path: &Option<PathBuf>, report: &T) -> anyhow::Result<()> {
    if let Some(path) = path {
        let json = serde_json::to_string_pretty(report)?;
        write_atomic(path, json.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn benchmark(a: BenchmarkArgs) -> anyhow::Result<bool> {
    let datasets = load_all(&a.input, &a.io)?;
    let mut settings = a.run.settings();
    settings.knn_ks = a.knn_k.clone();
    let purities = a
        .purity_sweep
        .as_ref()
        .map_or_else(|| vec![settings.purity], |s| s.0.clone());
    let paths: Vec<&Path> = a.input.iter().map(PathBuf::as_path).collect();
    let mut manifest = RunManifest::start("benchmark", serde_json::to_value(&settings)?, &paths)?
        .seed("seed", settings.seed)
        .seed("kmeans_seed", settings.kmeans_seed);
    manifest.settings["methods"] = serde_json::to_value(&a.method)?;
    manifest.settings["noise"] = serde_json::to_value(a.run.noise_rates())?;
    manifest.settings["purity_sweep"] = serde_json::to_value(&purities)?;

    let mut sections = Vec::new();
    let mut failures = Vec::new();
    for &rate in &a.run.noise_rates() {
        for (pi, &purity) in purities.iter().enumerate() {
            let s = Settings {
                purity,
                ..settings.clone()
            };
            let mut section = Section {
                noise_rate: rate,
                purity,
                rows: Vec::new(),
                wilcoxon: Vec::new(),
            };
            for data in &datasets {
                let run_name = |m: MethodKind| format!("{} noise={rate} purity={purity}", m.as_str());
                let data = match noisy(data, rate, s.seed) {
                    Ok(d) => d,
                    Err(e) => {
                        failures.push(Failure {
                            dataset: data.name().into(),
                            run: format!("noise={rate}"),
                            error: e.to_string(),
                        });
                        continue;
                    }
                };
                for &m in &a.method {
                    // purity does not affect kNN; run it once per noise rate
                    if !m.uses_purity() && pi > 0 {
                        continue;
                    }
                    match evaluate(&data, m, &s) {
                        Ok(r) => section.rows.push(Row::new(m, &r)),
                        Err(e) => failures.push(Failure {
                            dataset: data.name().into(),
                            run: run_name(m),
                            error: e.to_string(),
                        }),
                    }
                }
            }
            section.add_wilcoxon(&a.method);
            sections.push(section);
        }
    }
    manifest.finish();

    print!("{}", format_sections(&sections));
    eprint!("{}", format_failures(&failures));
    let ok = failures.is_empty();
    write_report(
        &a.run.output,
        &BenchmarkReport {
            manifest,
            sections,
            failures,
        },
    )?;
    Ok(ok)
}

fn ablation(a: AblateArgs) -> anyhow::Result<bool> {
    let datasets = load_all(&a.input, &a.io)?;
    // the flags pick which factor to ablate; the paired run always has it on
    let mut factors = Vec::new();
    if a.run.no_am {
        factors.push(Factor::Am);
    }
    if a.run.no_outlier_detection {
        factors.push(Factor::OutlierDetection);
    }
    if factors.is_empty() {
        factors = vec![Factor::Am, Factor::OutlierDetection];
    }
    let settings = Settings {
        enable_am: true,
        enable_outlier_detection: true,
        ..a.run.settings()
    };
    let paths: Vec<&Path> = a.input.iter().map(PathBuf::as_path).collect();
    let mut manifest = RunManifest::start("ablate", serde_json::to_value(&settings)?, &paths)?
        .seed("seed", settings.seed);
    manifest.settings["factors"] = serde_json::to_value(&factors)?;
    manifest.settings["noise"] = serde_json::to_value(a.run.noise_rates())?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for data in &datasets {
        for &factor in &factors {
            for &rate in &a.run.noise_rates() {
                match ablate(data, factor, rate, &settings) {
                    Ok(r) => rows.push(r),
                    Err(e) => failures.push(Failure {
                        dataset: data.name().into(),
                        run: format!("{} noise={rate}", factor.as_str()),
                        error: e.to_string(),
                    }),
                }
            }
        }
    }
    manifest.finish();

    print!("{}", format_ablation(&rows));
    eprint!("{}", format_failures(&failures));
    let ok = failures.is_empty();
    write_report(
        &a.run.output,
        &AblationReport {
            manifest,
            rows,
            failures,
        },
    )?;
    Ok(ok)
}
