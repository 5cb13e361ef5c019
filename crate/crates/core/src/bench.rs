//! 1-NN evaluation harness: accuracy, tie-aware method ranking, residuals
//! against the `none` baseline, and CSV/JSON report emission.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dtw::{dtw_distance_bounded, DtwParams, LocalCost};
use crate::error::{Error, Result};
use crate::pipeline::{expand_with_jobs, AugmentSpec, Method, MethodConfig};
use crate::series::{fit_normalizer, Dataset, Label};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Classifier {
    Euclidean,
    Dtw { window_fraction: f64 },
}

impl Default for Classifier {
    fn default() -> Self {
        Self::Dtw { window_fraction: 0.1 }
    }
}

/// Running max/min of a series over a window of half-width `r`.
struct Envelope {
    upper: Vec<f64>,
    lower: Vec<f64>,
}

impl Envelope {
    fn new(q: &[f64], r: usize) -> Self {
        let n = q.len();
        let mut upper = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(n);
        for i in 0..n {
            let w = &q[i.saturating_sub(r)..(i + r + 1).min(n)];
            upper.push(w.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            lower.push(w.iter().copied().fold(f64::INFINITY, f64::min));
        }
        Self { upper, lower }
    }

    /// Cost of `v` at position `i` against the envelope.
    #[inline]
    fn term(&self, i: usize, v: f64, cost: LocalCost) -> f64 {
        // At most one of the two excesses is positive.
        let d = (v - self.upper[i]).max(0.0) + (self.lower[i] - v).max(0.0);
        match cost {
            LocalCost::Squared => d * d,
            LocalCost::Absolute => d,
        }
    }
}

/// LB_Keogh: never exceeds the banded DTW distance between `c` and the
/// series the envelope was built from.
fn lb_keogh(c: &[f64], env: &Envelope, cost: LocalCost) -> f64 {
    match cost {
        LocalCost::Squared => c
            .iter()
            .zip(env.upper.iter().zip(&env.lower))
            .map(|(&v, (&u, &l))| {
                let d = (v - u).max(0.0) + (l - v).max(0.0);
                d * d
            })
            .sum(),
        LocalCost::Absolute => c
            .iter()
            .zip(env.upper.iter().zip(&env.lower))
            .map(|(&v, (&u, &l))| (v - u).max(0.0) + (l - v).max(0.0))
            .sum(),
    }
}

/// Writes `out[k] = sum of env terms of c[k..]`, with `out[n] = 0`.
fn lb_suffix(c: &[f64], env: &Envelope, cost: LocalCost, out: &mut [f64]) {
    let n = c.len();
    out[n] = 0.0;
    for k in (0..n).rev() {
        out[k] = out[k + 1] + env.term(k, c[k], cost);
    }
}

/// Keeps `(distance, index)` minimal, breaking distance ties by index.
fn improves(d: f64, idx: usize, best: (f64, usize)) -> bool {
    d < best.0 || (d == best.0 && idx < best.1)
}

/// Relative slack for comparisons between a bound and a DP total that sum
/// the same terms in different orders.
fn exceeds(bound: f64, best: f64) -> bool {
    bound > best + best * 1e-9
}

fn nearest_euclidean(query: &[f64], train: &[&[f64]]) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for (idx, c) in train.iter().enumerate() {
        let mut d = 0.0;
        for (a, b) in query.iter().zip(c.iter()) {
            d += (a - b) * (a - b);
            if d > best.0 {
                break;
            }
        }
        if improves(d, idx, best) {
            best = (d, idx);
        }
    }
    best.1
}

/// Equal-length banded DTW that abandons once a row's minimum plus
/// `rest[i]`, a lower bound on the cost of rows after `i`, exceeds `cutoff`.
///
/// Rows are stored shifted by one column: `row[k]` holds column `k - 1`, and
/// `row[0]` is a virtual column that is 0 only above the first cell.
fn dtw_cascade<F: Fn(f64, f64) -> f64>(
    x: &[f64],
    y: &[f64],
    r: usize,
    cost: F,
    cutoff: f64,
    rest: &[f64],
    scratch: &mut [Vec<f64>; 2],
) -> Option<f64> {
    let n = x.len();
    let [prev, cur] = scratch;
    prev.clear();
    prev.resize(n + 2, f64::INFINITY);
    cur.clear();
    cur.resize(n + 2, f64::INFINITY);
    prev[0] = 0.0;
    for i in 0..n {
        let lo = i.saturating_sub(r);
        let hi = (i + r).min(n - 1);
        cur[lo] = f64::INFINITY;
        let xi = x[i];
        let mut row_min = f64::INFINITY;
        for j in lo..=hi {
            let v = cost(xi, y[j]) + prev[j].min(prev[j + 1]).min(cur[j]);
            cur[j + 1] = v;
            row_min = row_min.min(v);
        }
        if row_min > cutoff || exceeds(row_min + rest[i], cutoff) {
            return None;
        }
        std::mem::swap(prev, cur);
    }
    Some(prev[n])
}

fn nearest_dtw(query: &[f64], train: &[&[f64]], envelopes: Option<&[Envelope]>, params: &DtwParams) -> usize {
    let n = query.len();
    let cost = params.local_cost;
    let mut best = (f64::INFINITY, usize::MAX);
    let Some(envelopes) = envelopes else {
        for (idx, c) in train.iter().enumerate() {
            let radius = params.radius(n, c.len());
            if let Some(d) = dtw_distance_bounded(query, c, radius, cost, best.0) {
                if improves(d, idx, best) {
                    best = (d, idx);
                }
            }
        }
        return best.1;
    };

    // Visit candidates by increasing bound so a close match is found early,
    // then stop at the first bound that exceeds the best distance.
    let r = params.radius(n, n);
    let q_env = Envelope::new(query, r);
    let mut order: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(idx, c)| (lb_keogh(c, &q_env, cost), idx))
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut fwd = vec![0.0; n + 1];
    let mut rev = vec![0.0; n + 1];
    let mut rest = vec![0.0; n];
    let mut scratch = [Vec::new(), Vec::new()];
    for (lb, idx) in order {
        if exceeds(lb, best.0) {
            break;
        }
        let c = train[idx];
        lb_suffix(query, &envelopes[idx], cost, &mut rev);
        if exceeds(rev[0], best.0) {
            continue;
        }
        lb_suffix(c, &q_env, cost, &mut fwd);
        // Row i covers query index i and candidate indices up to i + r;
        // everything beyond is still to be paid for.
        for (i, slot) in rest.iter_mut().enumerate() {
            *slot = fwd[(i + r + 1).min(n)].max(rev[i + 1]);
        }
        let found = match cost {
            LocalCost::Squared => dtw_cascade(query, c, r, |a, b| (a - b) * (a - b), best.0, &rest, &mut scratch),
            LocalCost::Absolute => dtw_cascade(query, c, r, |a, b| (a - b).abs(), best.0, &rest, &mut scratch),
        };
        if let Some(d) = found {
            if improves(d, idx, best) {
                best = (d, idx);
            }
        }
    }
    best.1
}

/// Labels each test item with its nearest training item's label. Exact:
/// pruning only skips candidates that provably cannot win.
pub fn knn1_classify(train: &Dataset, test: &Dataset, classifier: Classifier) -> Result<Vec<Label>> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    // Bitwise duplicates can never beat their first occurrence under the
    // lowest-index tie rule, so only first occurrences are searched.
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut origin = Vec::new();
    let mut refs: Vec<&[f64]> = Vec::new();
    for (idx, it) in train.items().iter().enumerate() {
        let key = it.series.values().iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            origin.push(idx);
            refs.push(it.series.values());
        }
    }
    if classifier == Classifier::Euclidean {
        for it in test.items() {
            for c in &refs {
                if c.len() != it.series.len() {
                    return Err(Error::LengthMismatch {
                        expected: it.series.len(),
                        actual: c.len(),
                    });
                }
            }
        }
    }
    let dtw_params = match classifier {
        Classifier::Dtw { window_fraction } => Some(DtwParams::banded(window_fraction)),
        Classifier::Euclidean => None,
    };
    // Bounds need one common length across both splits.
    let common = train.fixed_length().filter(|&n| test.items().iter().all(|it| it.series.len() == n));
    let envelopes: Option<Vec<Envelope>> = match (dtw_params, common) {
        (Some(p), Some(n)) => Some(refs.iter().map(|c| Envelope::new(c, p.radius(n, n))).collect()),
        _ => None,
    };
    let predictions = test
        .items()
        .par_iter()
        .map(|it| {
            let q = it.series.values();
            let idx = match &dtw_params {
                None => nearest_euclidean(q, &refs),
                Some(p) => nearest_dtw(q, &refs, envelopes.as_deref(), p),
            };
            train.items()[origin[idx]].label.clone()
        })
        .collect();
    Ok(predictions)
}

pub fn accuracy(predictions: &[Label], truth: &[Label]) -> Result<f64> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: predictions.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let correct = predictions.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / truth.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub dataset: String,
    pub method: String,
    pub accuracy: f64,
    pub runtime_secs: f64,
}

impl EvalResult {
    pub fn new(dataset: impl Into<String>, method: impl Into<String>, accuracy: f64) -> Self {
        Self {
            dataset: dataset.into(),
            method: method.into(),
            accuracy,
            runtime_secs: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub method: String,
    /// `(dataset, rank)` in dataset order of first appearance.
    pub ranks: Vec<(String, f64)>,
    pub average_rank: f64,
}

fn first_seen<'a>(values: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for v in values {
        if !out.iter().any(|o| o == v) {
            out.push(v.to_string());
        }
    }
    out
}

/// Ranks `accuracies` descending; equal values share their mean position.
pub fn tie_ranks(accuracies: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..accuracies.len()).collect();
    order.sort_by(|&a, &b| accuracies[b].total_cmp(&accuracies[a]));
    let mut ranks = vec![0.0; accuracies.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && accuracies[order[end]] == accuracies[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share their mean.
        let mean = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = mean;
        }
        start = end;
    }
    ranks
}

pub fn rank_methods(results: &[EvalResult]) -> Vec<RankEntry> {
    let datasets = first_seen(results.iter().map(|r| r.dataset.as_str()));
    let methods = first_seen(results.iter().map(|r| r.method.as_str()));
    let mut per_method: BTreeMap<&str, Vec<(String, f64)>> = BTreeMap::new();
    for ds in &datasets {
        let rows: Vec<&EvalResult> = results.iter().filter(|r| &r.dataset == ds).collect();
        let accs: Vec<f64> = rows.iter().map(|r| r.accuracy).collect();
        for (r, rank) in rows.iter().zip(tie_ranks(&accs)) {
            per_method.entry(r.method.as_str()).or_default().push((ds.clone(), rank));
        }
    }
    methods
        .iter()
        .map(|m| {
            let ranks = per_method.remove(m.as_str()).unwrap_or_default();
            let average_rank = ranks.iter().map(|(_, r)| r).sum::<f64>() / ranks.len().max(1) as f64;
            RankEntry {
                method: m.clone(),
                ranks,
                average_rank,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub dataset: String,
    pub method: String,
    pub accuracy: f64,
    pub baseline_accuracy: f64,
    /// `accuracy - baseline_accuracy`, as a fraction.
    pub residual: f64,
}

impl Residual {
    /// Residual in percentage points.
    pub fn points(&self) -> f64 {
        self.residual * 100.0
    }
}

pub fn residuals(results: &[EvalResult], baseline: &str) -> Result<Vec<Residual>> {
    let datasets = first_seen(results.iter().map(|r| r.dataset.as_str()));
    let mut out = Vec::with_capacity(results.len());
    for ds in &datasets {
        let base = results
            .iter()
            .find(|r| &r.dataset == ds && r.method == baseline)
            .ok_or_else(|| Error::MissingBaseline {
                baseline: baseline.to_string(),
                dataset: ds.clone(),
            })?
            .accuracy;
        for r in results.iter().filter(|r| &r.dataset == ds) {
            out.push(Residual {
                dataset: ds.clone(),
                method: r.method.clone(),
                accuracy: r.accuracy,
                baseline_accuracy: base,
                residual: r.accuracy - base,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub mean_accuracy: f64,
    /// Population standard deviation over datasets.
    pub std_accuracy: f64,
    pub average_rank: f64,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let k = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k;
    (mean, var.sqrt())
}

pub fn summarize(results: &[EvalResult], ranks: &[RankEntry]) -> Vec<MethodSummary> {
    ranks
        .iter()
        .map(|entry| {
            let accs: Vec<f64> = results
                .iter()
                .filter(|r| r.method == entry.method)
                .map(|r| r.accuracy)
                .collect();
            let (mean_accuracy, std_accuracy) = mean_std(&accs);
            MethodSummary {
                method: entry.method.clone(),
                mean_accuracy,
                std_accuracy,
                average_rank: entry.average_rank,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub results: Vec<EvalResult>,
    pub ranks: Vec<RankEntry>,
    pub residuals: Vec<Residual>,
    pub summary: Vec<MethodSummary>,
}

impl BenchReport {
    pub fn from_results(results: Vec<EvalResult>, baseline: &str) -> Result<Self> {
        let ranks = rank_methods(&results);
        let residuals = residuals(&results, baseline)?;
        let summary = summarize(&results, &ranks);
        Ok(Self {
            results,
            ranks,
            residuals,
            summary,
        })
    }

    pub fn accuracy_of(&self, dataset: &str, method: &str) -> Option<f64> {
        self.results
            .iter()
            .find(|r| r.dataset == dataset && r.method == method)
            .map(|r| r.accuracy)
    }
}

/// Shortest representation that parses back to the same value.
fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn write_file(dir: &Path, name: &str, body: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes the report set into `dir`. `run` is embedded verbatim in
/// `summary.json` and `run.json`; timings are never written, so reruns
/// produce identical bytes.
pub fn emit_reports(report: &BenchReport, run: &serde_json::Value, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    if report.results.is_empty() {
        return Err(Error::EmptyDataset);
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let datasets = first_seen(report.results.iter().map(|r| r.dataset.as_str()));
    let methods: Vec<&str> = report.ranks.iter().map(|r| r.method.as_str()).collect();
    let mut written = Vec::new();

    let mut acc = format!("dataset,{}\n", methods.join(","));
    for ds in &datasets {
        let cells: Vec<String> = methods
            .iter()
            .map(|m| report.accuracy_of(ds, m).map(fmt_num).unwrap_or_default())
            .collect();
        let _ = writeln!(acc, "{ds},{}", cells.join(","));
    }
    write_file(dir, "accuracy.csv", &acc, &mut written)?;

    let mut rank = format!("method,{},average_rank\n", datasets.join(","));
    for entry in &report.ranks {
        let cells: Vec<String> = datasets
            .iter()
            .map(|ds| {
                entry
                    .ranks
                    .iter()
                    .find(|(d, _)| d == ds)
                    .map(|(_, r)| fmt_num(*r))
                    .unwrap_or_default()
            })
            .collect();
        let _ = writeln!(rank, "{},{},{}", entry.method, cells.join(","), fmt_num(entry.average_rank));
    }
    write_file(dir, "ranking.csv", &rank, &mut written)?;

    let mut res = String::from("dataset,method,accuracy,baseline_accuracy,residual,residual_points\n");
    for r in &report.residuals {
        let _ = writeln!(
            res,
            "{},{},{},{},{},{:.2}",
            r.dataset,
            r.method,
            fmt_num(r.accuracy),
            fmt_num(r.baseline_accuracy),
            fmt_num(r.residual),
            r.points()
        );
    }
    write_file(dir, "residuals.csv", &res, &mut written)?;

    let mut heat = String::from("dataset,method,accuracy\n");
    for r in &report.results {
        let _ = writeln!(heat, "{},{},{}", r.dataset, r.method, fmt_num(r.accuracy));
    }
    write_file(dir, "heatmap_long.csv", &heat, &mut written)?;

    let summary = serde_json::json!({
        "std": "population",
        "run": run,
        "methods": report.summary,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_file(dir, "summary.json", &(text + "\n"), &mut written)?;

    let text = serde_json::to_string_pretty(run).expect("run metadata serializes");
    write_file(dir, "run.json", &(text + "\n"), &mut written)?;
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    pub classifier: Classifier,
    pub factor: usize,
    pub seed: u64,
    pub params: MethodConfig,
    #[serde(skip)]
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            classifier: Classifier::default(),
            factor: 4,
            seed: 0,
            params: MethodConfig::default(),
            jobs: 0,
        }
    }
}

/// Normalizes both splits with the train range, then zeroes missing values.
pub fn prepare(train: &Dataset, test: &Dataset) -> (Dataset, Dataset) {
    let params = fit_normalizer(train);
    (
        train.normalized(&params).sanitized(),
        test.normalized(&params).sanitized(),
    )
}

/// Runs every configured method (plus `none`, prepended when absent) on
/// every `(train, test)` pair.
pub fn run_benchmark(pairs: &[(Dataset, Dataset)], cfg: &BenchConfig) -> Result<BenchReport> {
    let mut methods = cfg.methods.clone();
    if !methods.contains(&Method::None) {
        methods.insert(0, Method::None);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidParam(format!("thread pool: {e}")))?;
    let mut results = Vec::new();
    for (train, test) in pairs {
        let (train, test) = prepare(train, test);
        let truth: Vec<Label> = test.items().iter().map(|it| it.label.clone()).collect();
        for &method in &methods {
            let started = Instant::now();
            let spec = AugmentSpec {
                method,
                params: cfg.params.clone(),
                factor: cfg.factor,
                seed: cfg.seed,
            };
            let (augmented, _) = expand_with_jobs(&train, &spec, cfg.jobs)?;
            let predictions = pool.install(|| knn1_classify(&augmented, &test, cfg.classifier))?;
            let mut result = EvalResult::new(train.name(), method.id(), accuracy(&predictions, &truth)?);
            result.runtime_secs = started.elapsed().as_secs_f64();
            log::info!(
                "{} {}: accuracy {:.4} ({:.1}s)",
                result.dataset,
                result.method,
                result.accuracy,
                result.runtime_secs
            );
            results.push(result);
        }
    }
    BenchReport::from_results(results, Method::None.id())
}
