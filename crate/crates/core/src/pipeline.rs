//! Method registry, run configuration and class-aware dataset expansion.
//!
//! Expansion keeps every original sample and appends `factor - 1`
//! augmented copies of each, grouped by original index. Each copy draws from
//! its own [`RandomStream`] lane `(sample, copy, method)`, so the output is
//! identical regardless of how many worker threads produced it.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dtw::DtwParams;
use crate::emd::{emd_augment, EmdParams};
use crate::error::{Error, Result};
use crate::freq::sfcc;
use crate::pattern::{
    dgw, dtw_merge, rgw, spawner, wdba, Aligner, ClassPool, GuidedParams, SpawnerParams, WdbaParams,
};
use crate::rng::{op_tag, Lane, RandomStream};
use crate::series::{Dataset, LabeledSeries, TimeSeries};
use crate::transform::{
    flip_rotation, jitter, magnitude_warp, permutation, random_permutation, scaling, time_warp,
    window_slice, window_warp, TransformDefaults,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    None,
    Jitter,
    Rotation,
    Scaling,
    MagnitudeWarp,
    Permutation,
    RandomPermutation,
    TimeWarp,
    WindowSlice,
    WindowWarp,
    Sfcc,
    Spawner,
    Wdba,
    Rgw,
    Rgws,
    Dgw,
    Dgws,
    DtwMerge,
    Emd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Baseline,
    Transformation,
    Pattern,
    Decomposition,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Baseline => "baseline",
            Self::Transformation => "transformation",
            Self::Pattern => "pattern",
            Self::Decomposition => "decomposition",
        })
    }
}

impl Method {
    pub const ALL: [Method; 19] = [
        Method::None,
        Method::Jitter,
        Method::Rotation,
        Method::Scaling,
        Method::MagnitudeWarp,
        Method::Permutation,
        Method::RandomPermutation,
        Method::TimeWarp,
        Method::WindowSlice,
        Method::WindowWarp,
        Method::Sfcc,
        Method::Spawner,
        Method::Wdba,
        Method::Rgw,
        Method::Rgws,
        Method::Dgw,
        Method::Dgws,
        Method::DtwMerge,
        Method::Emd,
    ];

    pub const fn id(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Jitter => "jitter",
            Self::Rotation => "rotation",
            Self::Scaling => "scaling",
            Self::MagnitudeWarp => "magnitude_warp",
            Self::Permutation => "permutation",
            Self::RandomPermutation => "random_permutation",
            Self::TimeWarp => "time_warp",
            Self::WindowSlice => "window_slice",
            Self::WindowWarp => "window_warp",
            Self::Sfcc => "sfcc",
            Self::Spawner => "spawner",
            Self::Wdba => "wdba",
            Self::Rgw => "rgw",
            Self::Rgws => "rgws",
            Self::Dgw => "dgw",
            Self::Dgws => "dgws",
            Self::DtwMerge => "dtw_merge",
            Self::Emd => "emd",
        }
    }

    pub const fn category(self) -> Category {
        match self {
            Self::None => Category::Baseline,
            Self::Jitter
            | Self::Rotation
            | Self::Scaling
            | Self::MagnitudeWarp
            | Self::Permutation
            | Self::RandomPermutation
            | Self::TimeWarp
            | Self::WindowSlice
            | Self::WindowWarp
            | Self::Sfcc => Category::Transformation,
            Self::Spawner
            | Self::Wdba
            | Self::Rgw
            | Self::Rgws
            | Self::Dgw
            | Self::Dgws
            | Self::DtwMerge => Category::Pattern,
            Self::Emd => Category::Decomposition,
        }
    }

    /// Finer grouping within a category: magnitude, time, frequency, ...
    pub const fn branch(self) -> &'static str {
        match self {
            Self::None => "-",
            Self::Jitter | Self::Rotation | Self::Scaling | Self::MagnitudeWarp => "magnitude",
            Self::Permutation
            | Self::RandomPermutation
            | Self::TimeWarp
            | Self::WindowSlice
            | Self::WindowWarp => "time",
            Self::Sfcc => "frequency",
            Self::Spawner | Self::Wdba => "magnitude",
            Self::Rgw | Self::Rgws | Self::Dgw | Self::Dgws | Self::DtwMerge => "time",
            Self::Emd => "decomposition",
        }
    }

    /// Methods that need a same-class partner from the training pool.
    pub const fn needs_partner(self) -> bool {
        matches!(
            self,
            Self::Sfcc
                | Self::Spawner
                | Self::Wdba
                | Self::Rgw
                | Self::Rgws
                | Self::Dgw
                | Self::Dgws
                | Self::DtwMerge
        )
    }

    pub fn supported_list() -> String {
        Self::ALL.iter().map(|m| m.id()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|m| m.id() == key)
            .ok_or_else(|| Error::UnknownMethod {
                name: s.to_string(),
                supported: Self::supported_list(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MethodInfo {
    pub id: &'static str,
    pub category: Category,
    pub branch: &'static str,
}

pub fn list_methods() -> Vec<MethodInfo> {
    Method::ALL
        .iter()
        .map(|m| MethodInfo {
            id: m.id(),
            category: m.category(),
            branch: m.branch(),
        })
        .collect()
}

/// Every tunable of every method, addressable by dotted keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub transform: TransformDefaults,
    pub sfcc_strata: usize,
    pub spawner: SpawnerParams,
    pub wdba: WdbaParams,
    pub guided_batch: usize,
    /// Descriptor width for rgws/dgws; `None` derives it from the series length.
    pub desc_window: Option<usize>,
    /// Band used by DTW inside the augmenters.
    pub dtw: DtwParams,
    pub emd_k: usize,
    pub emd: EmdParams,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            transform: TransformDefaults::default(),
            sfcc_strata: 4,
            spawner: SpawnerParams::default(),
            wdba: WdbaParams::default(),
            guided_batch: 5,
            desc_window: None,
            dtw: DtwParams::unconstrained(),
            emd_k: 2,
            emd: EmdParams::default(),
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParam(format!("{key}: cannot parse `{value}`")))
}

impl MethodConfig {
    pub const KEYS: [&'static str; 24] = [
        "jitter.sigma",
        "scaling.sigma",
        "magnitude_warp.sigma",
        "magnitude_warp.knots",
        "time_warp.sigma",
        "time_warp.knots",
        "permutation.segments",
        "random_permutation.segments",
        "window_slice.ratio",
        "window_warp.ratio",
        "window_warp.scales",
        "sfcc.strata",
        "spawner.sigma",
        "spawner.band",
        "wdba.group_size",
        "wdba.iterations",
        "dgw.batch",
        "shape.desc_window",
        "dtw.window",
        "dtw.cost",
        "emd.k",
        "emd.max_imfs",
        "emd.sd_threshold",
        "emd.max_sifts",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.transform;
        match key {
            "jitter.sigma" => t.jitter_sigma = parse_num(key, value)?,
            "scaling.sigma" => t.scale_sigma = parse_num(key, value)?,
            "magnitude_warp.sigma" => t.mag_warp_sigma = parse_num(key, value)?,
            "magnitude_warp.knots" => t.mag_warp_knots = parse_num(key, value)?,
            "time_warp.sigma" => t.time_warp_sigma = parse_num(key, value)?,
            "time_warp.knots" => t.time_warp_knots = parse_num(key, value)?,
            "permutation.segments" | "random_permutation.segments" => {
                t.perm_segments = parse_num(key, value)?
            }
            "window_slice.ratio" => t.slice_ratio = parse_num(key, value)?,
            "window_warp.ratio" => t.window_ratio = parse_num(key, value)?,
            "window_warp.scales" => {
                t.window_scales = value
                    .split(',')
                    .map(|v| parse_num(key, v))
                    .collect::<Result<Vec<f64>>>()?
            }
            "sfcc.strata" => self.sfcc_strata = parse_num(key, value)?,
            "spawner.sigma" => self.spawner.noise_sigma = parse_num(key, value)?,
            "spawner.band" => self.spawner.band = parse_num(key, value)?,
            "wdba.group_size" => self.wdba.group_size = parse_num(key, value)?,
            "wdba.iterations" => self.wdba.iterations = parse_num(key, value)?,
            "dgw.batch" => self.guided_batch = parse_num(key, value)?,
            "shape.desc_window" => {
                self.desc_window = if value.trim() == "auto" {
                    None
                } else {
                    Some(parse_num(key, value)?)
                }
            }
            "dtw.window" => self.dtw.window_fraction = parse_num(key, value)?,
            "dtw.cost" => {
                self.dtw.local_cost = match value.trim() {
                    "squared" => crate::dtw::LocalCost::Squared,
                    "absolute" => crate::dtw::LocalCost::Absolute,
                    other => {
                        return Err(Error::InvalidParam(format!(
                            "dtw.cost: expected squared|absolute, got `{other}`"
                        )))
                    }
                }
            }
            "emd.k" => self.emd_k = parse_num(key, value)?,
            "emd.max_imfs" => self.emd.max_imfs = parse_num(key, value)?,
            "emd.sd_threshold" => self.emd.sd_threshold = parse_num(key, value)?,
            "emd.max_sifts" => self.emd.max_sifts = parse_num(key, value)?,
            _ => {
                return Err(Error::InvalidParam(format!(
                    "unknown parameter `{key}` (known: {})",
                    Self::KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies `key=value` assignments in order.
    pub fn apply_assignments<'a>(&mut self, pairs: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for pair in pairs {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidParam(format!("expected key=value, got `{pair}`")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.transform.validate()?;
        if self.sfcc_strata < 1 {
            return Err(Error::InvalidParam("sfcc.strata must be >= 1".into()));
        }
        if self.spawner.noise_sigma.is_nan() || self.spawner.noise_sigma < 0.0 || !(0.0..=1.0).contains(&self.spawner.band) {
            return Err(Error::InvalidParam("spawner.sigma >= 0 and spawner.band in [0, 1] required".into()));
        }
        if self.wdba.group_size < 1 {
            return Err(Error::InvalidParam("wdba.group_size must be >= 1".into()));
        }
        if self.guided_batch < 1 {
            return Err(Error::InvalidParam("dgw.batch must be >= 1".into()));
        }
        if let Some(w) = self.desc_window {
            if w % 2 == 0 {
                return Err(Error::InvalidParam("shape.desc_window must be odd".into()));
            }
        }
        if !(0.0..=1.0).contains(&self.dtw.window_fraction) {
            return Err(Error::InvalidParam("dtw.window must be in [0, 1]".into()));
        }
        if self.emd.sd_threshold.is_nan() || self.emd.sd_threshold <= 0.0 || self.emd.max_sifts < 1 {
            return Err(Error::InvalidParam("emd.sd_threshold > 0 and emd.max_sifts >= 1 required".into()));
        }
        Ok(())
    }

    fn guided(&self, shape: bool) -> GuidedParams {
        GuidedParams {
            dtw: self.dtw,
            aligner: if shape {
                Aligner::Shape(self.desc_window)
            } else {
                Aligner::Dtw
            },
            batch: self.guided_batch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AugmentSpec {
    pub method: Method,
    pub params: MethodConfig,
    pub factor: usize,
    pub seed: u64,
}

impl AugmentSpec {
    pub fn new(method: Method, seed: u64) -> Self {
        Self {
            method,
            params: MethodConfig::default(),
            factor: 4,
            seed,
        }
    }
}

/// Run configuration document: `{dataset, method, params{..}, factor, seed}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub dataset: Option<String>,
    pub method: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default = "default_factor")]
    pub factor: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_factor() -> usize {
    4
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParam(format!("run config: {e}")))
    }

    /// Resolves into an [`AugmentSpec`], using `fallback_seed` when the
    /// document carries none.
    pub fn to_spec(&self, fallback_seed: u64) -> Result<AugmentSpec> {
        let method: Method = self.method.parse()?;
        let mut params = MethodConfig::default();
        for (k, v) in &self.params {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                other => other.to_string(),
            };
            params.set(k, &text)?;
        }
        Ok(AugmentSpec {
            method,
            params,
            factor: self.factor,
            seed: self.seed.unwrap_or(fallback_seed),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub method: String,
    pub seed: u64,
    pub sample_index: usize,
    pub copy_index: usize,
    pub lane: Lane,
    /// Training-pool indices the method drew on.
    pub references: Vec<usize>,
    pub fallbacks: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub records: Vec<SampleRecord>,
}

impl RunLog {
    pub fn fallback_count(&self) -> usize {
        self.records.iter().filter(|r| !r.fallbacks.is_empty()).count()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write_jsonl_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut buf = std::io::BufWriter::new(file);
        self.write_jsonl(&mut buf).map_err(|e| Error::io(path, e))?;
        buf.flush().map_err(|e| Error::io(path, e))
    }
}

struct Generated {
    series: TimeSeries,
    references: Vec<usize>,
    fallbacks: Vec<String>,
    warnings: Vec<String>,
}

impl Generated {
    fn plain(series: TimeSeries) -> Self {
        Self {
            series,
            references: Vec::new(),
            fallbacks: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

fn pick_partner(pool: &ClassPool, item: &LabeledSeries, index: usize, stream: &mut RandomStream) -> Result<usize> {
    let candidates = pool.candidates(&item.label, Some(index))?;
    Ok(candidates[stream.index(candidates.len())])
}

fn generate(
    method: Method,
    cfg: &MethodConfig,
    pool: &ClassPool,
    item: &LabeledSeries,
    index: usize,
    stream: &mut RandomStream,
) -> Result<Generated> {
    let x = &item.series;
    let t = &cfg.transform;
    if method.needs_partner() && pool.same_class(&item.label).len() < 2 {
        return Ok(Generated {
            series: x.clone(),
            references: Vec::new(),
            fallbacks: vec!["single-exemplar class; verbatim copy".into()],
            warnings: Vec::new(),
        });
    }
    let out = match method {
        Method::None => Generated::plain(x.clone()),
        Method::Jitter => Generated::plain(jitter(x, t.jitter_sigma, stream)?),
        Method::Rotation => Generated::plain(flip_rotation(x)),
        Method::Scaling => Generated::plain(scaling(x, t.scale_sigma, stream)?),
        Method::MagnitudeWarp => {
            Generated::plain(magnitude_warp(x, t.mag_warp_sigma, t.mag_warp_knots, stream)?)
        }
        Method::Permutation => Generated::plain(permutation(x, t.perm_segments.min(x.len()), stream)?),
        Method::RandomPermutation => {
            Generated::plain(random_permutation(x, t.perm_segments.min(x.len()), stream)?)
        }
        Method::TimeWarp => Generated::plain(time_warp(x, t.time_warp_sigma, t.time_warp_knots, stream)?),
        Method::WindowSlice => Generated::plain(window_slice(x, t.slice_ratio, stream)?),
        Method::WindowWarp => Generated::plain(window_warp(x, t.window_ratio, &t.window_scales, stream)?),
        Method::Sfcc => {
            let partner = pick_partner(pool, item, index, stream)?;
            let mut g = Generated::plain(sfcc(x, pool.series(partner), cfg.sfcc_strata, stream)?);
            g.references.push(partner);
            g
        }
        Method::Spawner => {
            let partner = pick_partner(pool, item, index, stream)?;
            let mut g = Generated::plain(spawner(x, pool.series(partner), &cfg.spawner, stream)?);
            g.references.push(partner);
            g
        }
        Method::DtwMerge => {
            let partner = pick_partner(pool, item, index, stream)?;
            let mut g = Generated::plain(dtw_merge(x, pool.series(partner), &cfg.dtw, stream)?);
            g.references.push(partner);
            g
        }
        Method::Wdba => {
            let others = pool.candidates(&item.label, Some(index))?;
            let picks: Vec<usize> = stream
                .sample_distinct(others.len(), cfg.wdba.group_size.saturating_sub(1))
                .into_iter()
                .map(|k| others[k])
                .collect();
            let mut group = vec![x.clone()];
            group.extend(picks.iter().map(|&i| pool.series(i).clone()));
            let params = WdbaParams {
                dtw: cfg.dtw,
                ..cfg.wdba
            };
            let mut g = Generated::plain(wdba(&group, &params, stream)?);
            g.references = picks;
            g
        }
        Method::Rgw | Method::Rgws | Method::Dgw | Method::Dgws => {
            let shape = matches!(method, Method::Rgws | Method::Dgws);
            let params = cfg.guided(shape);
            let out = if matches!(method, Method::Rgw | Method::Rgws) {
                rgw(x, pool, &item.label, Some(index), &params, stream)?
            } else {
                dgw(x, pool, &item.label, Some(index), &params, stream)?
            };
            let mut refs = vec![out.reference];
            refs.extend(out.consulted.iter().filter(|&&i| i != out.reference));
            Generated {
                series: out.series,
                references: refs,
                fallbacks: out.fallback.map(String::from).into_iter().collect(),
                warnings: Vec::new(),
            }
        }
        Method::Emd => {
            let out = emd_augment(x, cfg.emd_k, &cfg.emd);
            let mut g = Generated::plain(out.series);
            if out.unchanged {
                g.warnings.push("decomposition produced no IMF; input returned".into());
            }
            g
        }
    };
    Ok(out)
}

/// Expands `train` by `spec.factor`, using up to `jobs` worker threads
/// (`0` = rayon default). Output bytes do not depend on `jobs`.
pub fn expand_with_jobs(train: &Dataset, spec: &AugmentSpec, jobs: usize) -> Result<(Dataset, RunLog)> {
    if spec.factor < 1 {
        return Err(Error::InvalidParam("factor must be >= 1".into()));
    }
    spec.params.validate()?;
    let pool = ClassPool::from_dataset(train);
    let tag = op_tag(spec.method.id());
    let tasks: Vec<(usize, usize)> = (0..train.len())
        .flat_map(|s| (1..spec.factor).map(move |c| (s, c)))
        .collect();

    let work = |&(s, c): &(usize, usize)| -> Result<(LabeledSeries, SampleRecord)> {
        let item = &train.items()[s];
        let lane = Lane::new(s as u64, c as u64, tag);
        let mut stream = RandomStream::new(spec.seed, lane);
        let g = generate(spec.method, &spec.params, &pool, item, s, &mut stream)?;
        let record = SampleRecord {
            method: spec.method.id().to_string(),
            seed: spec.seed,
            sample_index: s,
            copy_index: c,
            lane,
            references: g.references,
            fallbacks: g.fallbacks,
            warnings: g.warnings,
        };
        Ok((LabeledSeries::new(g.series, item.label.clone()), record))
    };

    let generated: Vec<Result<(LabeledSeries, SampleRecord)>> = if jobs == 1 {
        tasks.iter().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParam(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(work).collect())
    };

    let mut items: Vec<LabeledSeries> = train.items().to_vec();
    let mut log = RunLog::default();
    for g in generated {
        let (item, record) = g?;
        for f in &record.fallbacks {
            log::warn!("sample {} copy {}: {f}", record.sample_index, record.copy_index);
        }
        items.push(item);
        log.records.push(record);
    }
    let out = Dataset::new(train.name(), train.split(), items)?;
    Ok((out, log))
}

pub fn expand(train: &Dataset, spec: &AugmentSpec) -> Result<(Dataset, RunLog)> {
    expand_with_jobs(train, spec, 1)
}
