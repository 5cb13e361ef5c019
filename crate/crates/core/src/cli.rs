//! Command-line front end: `augment`, `bench`, `list-methods`, `describe`.
//!
//! Exit codes: 0 success, 2 unknown method, 3 I/O failure, 4 invalid
//! parameters, 5 baseline explicitly excluded from a benchmark.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{emit_reports, run_benchmark, BenchConfig, Classifier};
use crate::error::{Error, Result};
use crate::pipeline::{expand_with_jobs, list_methods, AugmentSpec, Method, MethodConfig, RunConfig};
use crate::series::{fit_normalizer, load_ucr_tsv, write_ucr_tsv, Split};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BASELINE_EXCLUDED: i32 = 5;
pub const SEED_ENV: &str = "TSAUG_SEED";

#[derive(Debug, Parser)]
#[command(name = "tsaug", version, about = "Time-series data augmentation and 1-NN benchmarking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize a training split and expand it with one augmentation method.
    Augment {
        #[arg(long)]
        input: PathBuf,
        /// Method id; see `list-methods`.
        #[arg(long, required_unless_present = "config")]
        method: Option<String>,
        /// JSON run config {dataset, method, params, factor, seed}.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        factor: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Parameter override as dotted key=value; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        output: PathBuf,
        /// Worker threads (0 = all cores). Output does not depend on it.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Augment, classify with 1-NN and write accuracy/ranking/residual reports.
    Bench {
        /// Training split; repeat once per dataset.
        #[arg(long, required = true)]
        train: Vec<PathBuf>,
        /// Test split, paired with `--train` by position.
        #[arg(long, required = true)]
        test: Vec<PathBuf>,
        /// `all` or a comma-separated list of method ids.
        #[arg(long, default_value = "all")]
        methods: String,
        /// Comma-separated method ids to drop from the run.
        #[arg(long, default_value = "")]
        exclude: String,
        #[arg(long, default_value = "dtw", value_parser = ["euclidean", "dtw"])]
        classifier: String,
        /// DTW band half-width as a fraction of the series length.
        #[arg(long, default_value_t = 0.1)]
        window: f64,
        #[arg(long, default_value_t = 4)]
        factor: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Print method ids with their categories.
    ListMethods,
    /// Print item count, class count, length and class histogram of a file.
    Describe {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Seed precedence: explicit flag, then `TSAUG_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(text) if !text.trim().is_empty() => text
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParam(format!("{SEED_ENV}=`{text}` is not an unsigned integer"))),
        _ => Ok(0),
    }
}

fn env_seed(flag: Option<u64>) -> Result<u64> {
    resolve_seed(flag, std::env::var(SEED_ENV).ok().as_deref())
}

fn parse_method_list(text: &str) -> Result<Vec<Method>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

fn sidecar(output: &Path, suffix: &str) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn split_of(path: &Path) -> Split {
    let stem = path.file_stem().map(|s| s.to_string_lossy().to_ascii_uppercase());
    match stem {
        Some(s) if s.ends_with("_TEST") => Split::Test,
        _ => Split::Train,
    }
}

pub fn describe(path: &Path) -> Result<String> {
    let ds = load_ucr_tsv(path, split_of(path))?;
    let length = ds
        .fixed_length()
        .map(|n| format!("length {n}"))
        .unwrap_or_else(|| "length variable".to_string());
    let mut out = format!("{} items, {} classes, {length}\n", ds.len(), ds.classes().len());
    for (label, count) in ds.class_counts() {
        out.push_str(&format!("  class {label}: {count}\n"));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn augment(
    input: &Path,
    method: Option<&str>,
    config: Option<&Path>,
    factor: Option<usize>,
    seed: Option<u64>,
    params: &[String],
    output: &Path,
    jobs: usize,
) -> Result<()> {
    let mut spec = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let doc = RunConfig::from_json(&text)?;
            let mut spec = doc.to_spec(0)?;
            if let Some(m) = method {
                spec.method = m.parse()?;
            }
            spec.seed = match seed {
                Some(s) => s,
                None if doc.seed.is_some() => spec.seed,
                None => env_seed(None)?,
            };
            spec
        }
        None => {
            let method: Method = method.unwrap_or_default().parse()?;
            AugmentSpec::new(method, env_seed(seed)?)
        }
    };
    if let Some(f) = factor {
        spec.factor = f;
    }
    spec.params.apply_assignments(params.iter().map(String::as_str))?;
    spec.params.validate()?;

    let raw = load_ucr_tsv(input, Split::Train)?;
    let norm = fit_normalizer(&raw);
    let train = raw.normalized(&norm).sanitized();
    let (out, log) = expand_with_jobs(&train, &spec, jobs)?;
    write_ucr_tsv(&out, output)?;
    log.write_jsonl_file(sidecar(output, ".runlog.jsonl"))?;

    let meta = serde_json::json!({
        "dataset": train.name(),
        "method": spec.method.id(),
        "seed": spec.seed,
        "factor": spec.factor,
        "params": spec.params,
        "normalization": norm,
        "originals_preserved": true,
        "input_items": train.len(),
        "output_items": out.len(),
        "fallbacks": log.fallback_count(),
    });
    let meta_path = sidecar(output, ".meta.json");
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
    std::fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))?;
    log::info!(
        "{}: {} -> {} items with {} (seed {})",
        output.display(),
        train.len(),
        out.len(),
        spec.method,
        spec.seed
    );
    Ok(())
}

enum BenchError {
    BaselineExcluded,
    Failed(Error),
}

impl From<Error> for BenchError {
    fn from(e: Error) -> Self {
        Self::Failed(e)
    }
}

#[allow(clippy::too_many_arguments)]
fn bench(
    train: &[PathBuf],
    test: &[PathBuf],
    methods: &str,
    exclude: &str,
    classifier: &str,
    window: f64,
    factor: usize,
    seed: Option<u64>,
    params: &[String],
    report: &Path,
    jobs: usize,
) -> std::result::Result<(), BenchError> {
    let excluded = parse_method_list(exclude)?;
    if excluded.contains(&Method::None) {
        return Err(BenchError::BaselineExcluded);
    }
    if train.len() != test.len() {
        return Err(Error::InvalidParam(format!(
            "{} --train files but {} --test files",
            train.len(),
            test.len()
        ))
        .into());
    }
    let selected = if methods.trim() == "all" {
        Method::ALL.to_vec()
    } else {
        parse_method_list(methods)?
    };
    if !(0.0..=1.0).contains(&window) {
        return Err(Error::InvalidParam("--window must be in [0, 1]".into()).into());
    }
    let mut cfg = BenchConfig {
        methods: selected.into_iter().filter(|m| !excluded.contains(m)).collect(),
        classifier: match classifier {
            "euclidean" => Classifier::Euclidean,
            _ => Classifier::Dtw { window_fraction: window },
        },
        factor,
        seed: env_seed(seed)?,
        params: MethodConfig::default(),
        jobs,
    };
    cfg.params.apply_assignments(params.iter().map(String::as_str))?;
    cfg.params.validate()?;

    let mut pairs = Vec::with_capacity(train.len());
    for (tr, te) in train.iter().zip(test) {
        pairs.push((load_ucr_tsv(tr, Split::Train)?, load_ucr_tsv(te, Split::Test)?));
    }
    let started = std::time::Instant::now();
    let result = run_benchmark(&pairs, &cfg)?;
    let run = serde_json::json!({
        "datasets": pairs.iter().map(|(t, _)| t.name()).collect::<Vec<_>>(),
        "config": cfg,
    });
    emit_reports(&result, &run, report)?;
    log::info!(
        "{} results written to {} in {:.1}s",
        result.results.len(),
        report.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn report_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 4 } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::ListMethods => {
            for m in list_methods() {
                println!("{}\t{}\t{}", m.id, m.category, m.branch);
            }
            EXIT_OK
        }
        Command::Describe { input } => match describe(&input) {
            Ok(text) => {
                print!("{text}");
                EXIT_OK
            }
            Err(e) => report_error(&e),
        },
        Command::Augment {
            input,
            method,
            config,
            factor,
            seed,
            params,
            output,
            jobs,
        } => match augment(
            &input,
            method.as_deref(),
            config.as_deref(),
            factor,
            seed,
            &params,
            &output,
            jobs,
        ) {
            Ok(()) => EXIT_OK,
            Err(e) => report_error(&e),
        },
        Command::Bench {
            train,
            test,
            methods,
            exclude,
            classifier,
            window,
            factor,
            seed,
            params,
            report,
            jobs,
        } => match bench(
            &train,
            &test,
            &methods,
            &exclude,
            &classifier,
            window,
            factor,
            seed,
            &params,
            &report,
            jobs,
        ) {
            Ok(()) => EXIT_OK,
            Err(BenchError::BaselineExcluded) => {
                eprintln!("error: the `none` baseline cannot be excluded; residuals are measured against it");
                EXIT_BASELINE_EXCLUDED
            }
            Err(BenchError::Failed(e)) => report_error(&e),
        },
    }
}
