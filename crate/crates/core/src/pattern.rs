//! Pattern-based augmenters built on DTW alignment: random and
//! discriminative guided warping (with plain or shape descriptors),
//! SPAWNER, weighted DBA and DTW-Merge.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dtw::{default_desc_window, dtw, dtw_through, shape_dtw, Alignment, DtwParams, WarpPath};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::series::{resample, Dataset, Label, TimeSeries};

/// Read-only per-class view of the training split.
#[derive(Debug, Clone)]
pub struct ClassPool {
    series: Vec<TimeSeries>,
    labels: Vec<Label>,
    by_class: BTreeMap<Label, Vec<usize>>,
}

impl ClassPool {
    pub fn from_dataset(ds: &Dataset) -> Self {
        let mut by_class: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
        for (i, it) in ds.items().iter().enumerate() {
            by_class.entry(it.label.clone()).or_default().push(i);
        }
        Self {
            series: ds.items().iter().map(|it| it.series.clone()).collect(),
            labels: ds.items().iter().map(|it| it.label.clone()).collect(),
            by_class,
        }
    }

    pub fn series(&self, index: usize) -> &TimeSeries {
        &self.series[index]
    }

    pub fn label(&self, index: usize) -> &Label {
        &self.labels[index]
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn same_class(&self, label: &Label) -> &[usize] {
        self.by_class.get(label).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn other_class(&self, label: &Label) -> Vec<usize> {
        (0..self.len()).filter(|&i| &self.labels[i] != label).collect()
    }

    /// Same-class members other than `exclude`. When the class holds only the
    /// excluded sample, that sample is returned as its own reference.
    pub fn candidates(&self, label: &Label, exclude: Option<usize>) -> Result<Vec<usize>> {
        let members = self.same_class(label);
        if members.is_empty() {
            return Err(Error::EmptyPool(label.to_string()));
        }
        let others: Vec<usize> = members.iter().copied().filter(|&i| Some(i) != exclude).collect();
        if others.is_empty() {
            Ok(members.to_vec())
        } else {
            Ok(others)
        }
    }
}

/// Output position `j` is the mean of every sample value aligned to it.
pub fn warp_to_reference(sample: &TimeSeries, reference_len: usize, path: &WarpPath) -> Result<TimeSeries> {
    if !path.is_valid_for(sample.len(), reference_len) {
        return Err(Error::PathMismatch);
    }
    let mut sum = vec![0.0; reference_len];
    let mut count = vec![0usize; reference_len];
    for &(i, j) in path.pairs() {
        sum[j] += sample.values()[i];
        count[j] += 1;
    }
    Ok(TimeSeries::new(
        sum.iter()
            .zip(&count)
            .map(|(s, &c)| if c == 1 { *s } else { s / c as f64 })
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aligner {
    Dtw,
    /// shapeDTW with the given odd descriptor width; `None` picks
    /// [`default_desc_window`] from the sample length.
    Shape(Option<usize>),
}

impl Aligner {
    pub fn align(&self, x: &TimeSeries, y: &TimeSeries, params: &DtwParams) -> Result<Alignment> {
        match *self {
            Self::Dtw => Ok(dtw(x, y, params)),
            Self::Shape(w) => {
                let w = w.unwrap_or_else(|| default_desc_window(x.len().max(y.len())));
                shape_dtw(x, y, w, params)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidedParams {
    pub dtw: DtwParams,
    pub aligner: Aligner,
    /// Same-class and other-class batch size for discriminative teacher selection.
    pub batch: usize,
}

impl Default for GuidedParams {
    fn default() -> Self {
        Self {
            dtw: DtwParams::unconstrained(),
            aligner: Aligner::Dtw,
            batch: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuidedOutput {
    pub series: TimeSeries,
    /// Pool index of the series the sample was warped onto.
    pub reference: usize,
    /// Pool indices consulted while choosing the reference.
    pub consulted: Vec<usize>,
    /// Set when the method could not run as configured and degraded.
    pub fallback: Option<&'static str>,
}

fn warp_onto(
    sample: &TimeSeries,
    reference: &TimeSeries,
    params: &GuidedParams,
) -> Result<TimeSeries> {
    let al = params.aligner.align(sample, reference, &params.dtw)?;
    let warped = warp_to_reference(sample, reference.len(), &al.path)?;
    if warped.len() == sample.len() {
        Ok(warped)
    } else {
        Ok(TimeSeries::new(resample(warped.values(), sample.len())))
    }
}

/// Random guided warping: warp the sample onto a uniformly drawn same-class
/// reference. `exclude` is the sample's own pool index, if it has one.
pub fn rgw(
    sample: &TimeSeries,
    pool: &ClassPool,
    label: &Label,
    exclude: Option<usize>,
    params: &GuidedParams,
    stream: &mut RandomStream,
) -> Result<GuidedOutput> {
    let candidates = pool.candidates(label, exclude)?;
    let reference = candidates[stream.index(candidates.len())];
    Ok(GuidedOutput {
        series: warp_onto(sample, pool.series(reference), params)?,
        reference,
        consulted: vec![reference],
        fallback: None,
    })
}

/// Index of the candidate maximising mean distance to the other-class batch
/// minus mean distance to the rest of the same-class batch. Ties keep the
/// earliest candidate.
pub fn select_teacher(same_dist: &[Vec<f64>], other_dist: &[Vec<f64>]) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (c, (same, other)) in same_dist.iter().zip(other_dist).enumerate() {
        let inter = other.iter().sum::<f64>() / other.len().max(1) as f64;
        let peers: Vec<f64> = same
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != c)
            .map(|(_, d)| *d)
            .collect();
        let intra = peers.iter().sum::<f64>() / peers.len().max(1) as f64;
        let score = inter - intra;
        if score > best.1 {
            best = (c, score);
        }
    }
    best.0
}

/// Discriminative guided warping. Falls back to [`rgw`] (flagged in the
/// output) when no other-class exemplar exists.
pub fn dgw(
    sample: &TimeSeries,
    pool: &ClassPool,
    label: &Label,
    exclude: Option<usize>,
    params: &GuidedParams,
    stream: &mut RandomStream,
) -> Result<GuidedOutput> {
    let candidates = pool.candidates(label, exclude)?;
    let others = pool.other_class(label);
    if others.is_empty() {
        let mut out = rgw(sample, pool, label, exclude, params, stream)?;
        out.fallback = Some("no other-class exemplars; used rgw");
        return Ok(out);
    }
    let batch = params.batch.max(1);
    let same: Vec<usize> = stream
        .sample_distinct(candidates.len(), batch)
        .into_iter()
        .map(|k| candidates[k])
        .collect();
    let other: Vec<usize> = stream
        .sample_distinct(others.len(), batch)
        .into_iter()
        .map(|k| others[k])
        .collect();

    let teacher = if same.len() == 1 {
        same[0]
    } else {
        let dist = |a: usize, b: usize| -> Result<f64> {
            Ok(params
                .aligner
                .align(pool.series(a), pool.series(b), &params.dtw)?
                .distance)
        };
        let mut same_dist = vec![vec![0.0; same.len()]; same.len()];
        for a in 0..same.len() {
            for b in a + 1..same.len() {
                let d = dist(same[a], same[b])?;
                same_dist[a][b] = d;
                same_dist[b][a] = d;
            }
        }
        let other_dist = same
            .iter()
            .map(|&c| other.iter().map(|&o| dist(c, o)).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        same[select_teacher(&same_dist, &other_dist)]
    };

    let mut consulted = same.clone();
    consulted.extend(&other);
    Ok(GuidedOutput {
        series: warp_onto(sample, pool.series(teacher), params)?,
        reference: teacher,
        consulted,
        fallback: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpawnerParams {
    pub noise_sigma: f64,
    pub band: f64,
}

impl Default for SpawnerParams {
    fn default() -> Self {
        Self {
            noise_sigma: 0.05,
            band: 0.1,
        }
    }
}

const SPAWNER_ATTEMPTS: usize = 10;

/// Elementwise mean of `x1` and `x2` along the banded DTW path forced through
/// `(waypoint, waypoint)`, resampled to the input length. No noise.
pub fn spawner_mean_path(x1: &TimeSeries, x2: &TimeSeries, band: f64, waypoint: usize) -> Result<TimeSeries> {
    let al = dtw_through(x1, x2, &DtwParams::banded(band), waypoint)?;
    let (a, b) = (x1.values(), x2.values());
    let mean: Vec<f64> = al
        .path
        .pairs()
        .iter()
        .map(|&(i, j)| if a[i] == b[j] { a[i] } else { 0.5 * (a[i] + b[j]) })
        .collect();
    Ok(TimeSeries::new(resample(&mean, x1.len())))
}

pub fn spawner(
    x1: &TimeSeries,
    x2: &TimeSeries,
    params: &SpawnerParams,
    stream: &mut RandomStream,
) -> Result<TimeSeries> {
    let n = x1.len();
    if x2.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: x2.len(),
        });
    }
    if n < 4 {
        return Err(Error::TooShort {
            required: 4,
            actual: n,
        });
    }
    if params.noise_sigma.is_nan() || params.noise_sigma < 0.0 {
        return Err(Error::InvalidParam("spawner.sigma must be >= 0".into()));
    }
    let mut mean = None;
    for _ in 0..SPAWNER_ATTEMPTS {
        let waypoint = stream.range_inclusive(1, n - 2);
        match spawner_mean_path(x1, x2, params.band, waypoint) {
            Ok(m) => {
                mean = Some(m);
                break;
            }
            Err(Error::NoAdmissiblePath(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let mean = mean.ok_or(Error::NoAdmissiblePath(SPAWNER_ATTEMPTS))?;
    if params.noise_sigma == 0.0 {
        return Ok(mean);
    }
    Ok(TimeSeries::new(
        mean.values()
            .iter()
            .map(|&v| v + stream.normal(0.0, params.noise_sigma))
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WdbaParams {
    pub iterations: usize,
    /// Members per synthetic sample (the sample itself included).
    pub group_size: usize,
    pub dtw: DtwParams,
}

impl Default for WdbaParams {
    fn default() -> Self {
        Self {
            iterations: 10,
            group_size: 5,
            dtw: DtwParams::unconstrained(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WdbaOutcome {
    pub barycenter: TimeSeries,
    /// Group index of the reference (initial barycenter).
    pub reference: usize,
    pub weights: Vec<f64>,
    /// Weighted objective `sum w(s) dtw(s, b)` before the first update and
    /// after each iteration.
    pub objective: Vec<f64>,
}

/// Average-selected-with-distance weights: `exp(ln 0.5 * d(s, ref) / d_nn)`.
pub fn asd_weights(group: &[TimeSeries], reference: usize, params: &DtwParams) -> Vec<f64> {
    if group.len() < 3 {
        return vec![1.0; group.len()];
    }
    let dists: Vec<f64> = group
        .iter()
        .enumerate()
        .map(|(k, s)| if k == reference { 0.0 } else { dtw(s, &group[reference], params).distance })
        .collect();
    let nearest = dists
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != reference)
        .map(|(_, d)| *d)
        .fold(f64::INFINITY, f64::min);
    // Duplicates of the reference make the nearest distance zero; scale by the
    // closest distinct member instead.
    let scale = if nearest > 0.0 {
        nearest
    } else {
        dists
            .iter()
            .copied()
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min)
    };
    if !scale.is_finite() {
        return vec![1.0; group.len()];
    }
    dists
        .iter()
        .map(|&d| (std::f64::consts::LN_2 * -d / scale).exp().max(f64::MIN_POSITIVE))
        .collect()
}

fn weighted_objective(group: &[TimeSeries], weights: &[f64], bary: &TimeSeries, params: &DtwParams) -> (f64, Vec<WarpPath>) {
    let mut total = 0.0;
    let mut paths = Vec::with_capacity(group.len());
    for (s, w) in group.iter().zip(weights) {
        let al = dtw(s, bary, params);
        total += w * al.distance;
        paths.push(al.path);
    }
    (total, paths)
}

pub fn wdba_traced(group: &[TimeSeries], params: &WdbaParams, stream: &mut RandomStream) -> Result<WdbaOutcome> {
    let first = group.first().ok_or(Error::EmptyDataset)?;
    let n = first.len();
    if let Some(bad) = group.iter().find(|s| s.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: bad.len(),
        });
    }
    let reference = stream.index(group.len());
    let weights = asd_weights(group, reference, &params.dtw);
    let mut bary = group[reference].clone();
    let (initial, mut paths) = weighted_objective(group, &weights, &bary, &params.dtw);
    let mut objective = vec![initial];
    for _ in 0..params.iterations {
        let mut num = vec![0.0; n];
        let mut den = vec![0.0; n];
        for ((s, w), path) in group.iter().zip(&weights).zip(&paths) {
            for &(i, j) in path.pairs() {
                num[j] += w * s.values()[i];
                den[j] += w;
            }
        }
        let next = TimeSeries::new(num.iter().zip(&den).map(|(a, b)| a / b).collect());
        let (value, next_paths) = weighted_objective(group, &weights, &next, &params.dtw);
        bary = next;
        paths = next_paths;
        objective.push(value);
    }
    Ok(WdbaOutcome {
        barycenter: bary,
        reference,
        weights,
        objective,
    })
}

pub fn wdba(group: &[TimeSeries], params: &WdbaParams, stream: &mut RandomStream) -> Result<TimeSeries> {
    Ok(wdba_traced(group, params, stream)?.barycenter)
}

/// Splices `x1` (path positions `< cut`, indexed by `i`) onto `x2` (positions
/// `>= cut`, indexed by `j`), collapsing repeated indices, then resamples to
/// the length of `x1`.
pub fn dtw_merge_at(x1: &TimeSeries, x2: &TimeSeries, path: &WarpPath, cut: usize) -> Result<TimeSeries> {
    if !path.is_valid_for(x1.len(), x2.len()) || cut > path.len() {
        return Err(Error::PathMismatch);
    }
    let pairs = path.pairs();
    let mut merged = Vec::with_capacity(pairs.len());
    let mut last_i = None;
    for &(i, _) in &pairs[..cut] {
        if last_i != Some(i) {
            merged.push(x1.values()[i]);
            last_i = Some(i);
        }
    }
    let mut last_j = None;
    for &(_, j) in &pairs[cut..] {
        if last_j != Some(j) {
            merged.push(x2.values()[j]);
            last_j = Some(j);
        }
    }
    Ok(TimeSeries::new(resample(&merged, x1.len())))
}

pub fn dtw_merge(x1: &TimeSeries, x2: &TimeSeries, params: &DtwParams, stream: &mut RandomStream) -> Result<TimeSeries> {
    if x1.len() < 2 || x2.len() < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: x1.len().min(x2.len()),
        });
    }
    let al = dtw(x1, x2, params);
    let cut = stream.range_inclusive(1, al.path.len() - 1);
    dtw_merge_at(x1, x2, &al.path, cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Lane;
    use crate::series::{LabeledSeries, Split};

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec())
    }

    fn noisy(n: usize, seed: u64) -> TimeSeries {
        let mut s = RandomStream::new(seed, Lane::new(0, 0, 9));
        TimeSeries::new(
            (0..n)
                .map(|i| (i as f64 * 0.3).sin() + s.normal(0.0, 0.3))
                .collect(),
        )
    }

    fn pool(rows: &[(&str, TimeSeries)]) -> ClassPool {
        let items = rows
            .iter()
            .map(|(l, s)| LabeledSeries::new(s.clone(), Label::new(*l)))
            .collect();
        ClassPool::from_dataset(&Dataset::new("p", Split::Train, items).unwrap())
    }

    fn within(y: &TimeSeries, lo: f64, hi: f64) -> bool {
        y.values().iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12)
    }

    #[test]
    fn warp_to_reference_examples() {
        let x = noisy(10, 1);
        assert_eq!(warp_to_reference(&x, 10, &WarpPath::diagonal(10)).unwrap(), x);
        let p = WarpPath::new(vec![(0, 0), (1, 0)], 2, 1).unwrap();
        assert_eq!(warp_to_reference(&ts(&[0.0, 0.0]), 1, &p).unwrap().values(), &[0.0]);
        let y = noisy(14, 2);
        let al = dtw(&x, &y, &DtwParams::default());
        let w = warp_to_reference(&x, 14, &al.path).unwrap();
        assert_eq!(w.len(), 14);
        assert!(within(&w, x.min(), x.max()));
        assert!(warp_to_reference(&x, 13, &al.path).is_err());
    }

    #[test]
    fn rgw_self_reference_is_identity() {
        let x = noisy(30, 3);
        let p = pool(&[("a", x.clone()), ("b", noisy(30, 4))]);
        let out = rgw(&x, &p, &Label::new("a"), Some(0), &GuidedParams::default(), &mut RandomStream::from_seed(1)).unwrap();
        assert_eq!(out.reference, 0);
        assert_eq!(out.series, x);
        assert!(rgw(&x, &p, &Label::new("zzz"), None, &GuidedParams::default(), &mut RandomStream::from_seed(1)).is_err());
    }

    #[test]
    fn rgw_excludes_sample_and_stays_in_range() {
        let x = noisy(30, 5);
        let p = pool(&[("a", x.clone()), ("a", noisy(30, 6)), ("a", noisy(30, 7)), ("b", noisy(30, 8))]);
        for seed in 0..20 {
            let out = rgw(&x, &p, &Label::new("a"), Some(0), &GuidedParams::default(), &mut RandomStream::from_seed(seed)).unwrap();
            assert!(out.reference == 1 || out.reference == 2);
            assert!(within(&out.series, x.min(), x.max()));
            assert_eq!(out.series.len(), 30);
        }
    }

    #[test]
    fn rgws_with_unit_descriptor_matches_rgw() {
        let x = noisy(25, 9);
        let p = pool(&[("a", noisy(25, 10)), ("a", noisy(25, 11)), ("b", noisy(25, 12))]);
        let plain = GuidedParams::default();
        let shape = GuidedParams {
            aligner: Aligner::Shape(Some(1)),
            ..plain
        };
        for seed in 0..5 {
            let a = rgw(&x, &p, &Label::new("a"), None, &plain, &mut RandomStream::from_seed(seed)).unwrap();
            let b = rgw(&x, &p, &Label::new("a"), None, &shape, &mut RandomStream::from_seed(seed)).unwrap();
            assert_eq!(a, b);
            let c = rgw(&x, &p, &Label::new("a"), None, &GuidedParams { aligner: Aligner::Shape(None), ..plain }, &mut RandomStream::from_seed(seed)).unwrap();
            let d = rgw(&x, &p, &Label::new("a"), None, &GuidedParams { aligner: Aligner::Shape(None), ..plain }, &mut RandomStream::from_seed(seed)).unwrap();
            assert_eq!(c, d);
        }
    }

    #[test]
    fn rgw_resamples_when_lengths_differ() {
        let x = noisy(20, 13);
        let p = pool(&[("a", noisy(31, 14))]);
        let out = rgw(&x, &p, &Label::new("a"), None, &GuidedParams::default(), &mut RandomStream::from_seed(0)).unwrap();
        assert_eq!(out.series.len(), 20);
        assert!(within(&out.series, x.min(), x.max()));
    }

    #[test]
    fn teacher_selection() {
        assert_eq!(select_teacher(&[vec![0.0]], &[vec![3.0, 1.0]]), 0);
        let same = vec![vec![0.0, 1.0, 4.0], vec![1.0, 0.0, 2.0], vec![4.0, 2.0, 0.0]];
        let other = vec![vec![5.0, 5.0], vec![6.0, 7.0], vec![6.0, 6.0]];
        let chosen = select_teacher(&same, &other);
        assert_eq!(chosen, 1);
        let scale = |m: &Vec<Vec<f64>>| m.iter().map(|r| r.iter().map(|v| v * 3.7).collect()).collect::<Vec<Vec<f64>>>();
        assert_eq!(select_teacher(&scale(&same), &scale(&other)), chosen);
    }

    #[test]
    fn dgw_single_candidate_and_fallback() {
        let x = noisy(20, 15);
        let cand = noisy(20, 16);
        let p = pool(&[("a", cand.clone()), ("b", noisy(20, 17)), ("b", noisy(20, 18))]);
        let out = dgw(&x, &p, &Label::new("a"), None, &GuidedParams::default(), &mut RandomStream::from_seed(2)).unwrap();
        assert_eq!(out.reference, 0);
        assert!(out.fallback.is_none());

        let only_a = pool(&[("a", cand), ("a", noisy(20, 19))]);
        let out = dgw(&x, &only_a, &Label::new("a"), None, &GuidedParams::default(), &mut RandomStream::from_seed(2)).unwrap();
        assert!(out.fallback.is_some());
    }

    #[test]
    fn dgw_teacher_equal_to_sample_is_identity() {
        let x = noisy(20, 20);
        let p = pool(&[("a", x.clone()), ("b", noisy(20, 21))]);
        let out = dgw(&x, &p, &Label::new("a"), Some(0), &GuidedParams::default(), &mut RandomStream::from_seed(3)).unwrap();
        assert_eq!(out.series, x);
    }

    #[test]
    fn dgw_picks_the_most_discriminative_candidate() {
        // Class "a" members: two near the sample's shape and one far outlier
        // sitting close to class "b".
        let base: Vec<f64> = (0..24).map(|i| (i as f64 * 0.5).sin()).collect();
        let a1 = TimeSeries::new(base.iter().map(|v| v + 0.01).collect());
        let a2 = TimeSeries::new(base.iter().map(|v| v - 0.01).collect());
        let b = TimeSeries::new(base.iter().map(|v| -v).collect());
        let outlier = TimeSeries::new(base.iter().map(|v| -v + 0.05).collect());
        let p = pool(&[("a", a1), ("a", a2), ("a", outlier), ("b", b)]);
        let params = GuidedParams { batch: 3, ..Default::default() };
        let out = dgw(&TimeSeries::new(base), &p, &Label::new("a"), None, &params, &mut RandomStream::from_seed(4)).unwrap();
        assert!(out.reference == 0 || out.reference == 1);
        assert!(out.consulted.iter().all(|&i| i < 4));
    }

    #[test]
    fn spawner_examples() {
        let x = noisy(40, 22);
        let zero_noise = SpawnerParams { noise_sigma: 0.0, ..Default::default() };
        for seed in 0..10 {
            let y = spawner(&x, &x, &zero_noise, &mut RandomStream::from_seed(seed)).unwrap();
            for (a, b) in x.values().iter().zip(y.values()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        let x2 = noisy(40, 23);
        let lo = x.min().min(x2.min());
        let hi = x.max().max(x2.max());
        for seed in 0..10 {
            let y = spawner(&x, &x2, &zero_noise, &mut RandomStream::from_seed(seed)).unwrap();
            assert_eq!(y.len(), 40);
            assert!(within(&y, lo, hi));
            let noisy_out = spawner(&x, &x2, &SpawnerParams::default(), &mut RandomStream::from_seed(seed)).unwrap();
            assert_eq!(noisy_out.len(), 40);
        }
        assert!(spawner(&ts(&[1.0, 2.0, 3.0]), &ts(&[1.0, 2.0, 3.0]), &zero_noise, &mut RandomStream::from_seed(0)).is_err());
        assert!(spawner(&x, &noisy(41, 1), &zero_noise, &mut RandomStream::from_seed(0)).is_err());
    }

    #[test]
    fn wdba_fixed_points() {
        let x = noisy(20, 24);
        let group = vec![x.clone(); 5];
        for iters in [0, 1, 10] {
            let params = WdbaParams { iterations: iters, ..Default::default() };
            assert_eq!(wdba(&group, &params, &mut RandomStream::from_seed(1)).unwrap(), x);
        }
        assert_eq!(wdba(std::slice::from_ref(&x), &WdbaParams::default(), &mut RandomStream::from_seed(1)).unwrap(), x);
        assert!(wdba(&[], &WdbaParams::default(), &mut RandomStream::from_seed(1)).is_err());
        assert!(wdba(&[x, noisy(21, 1)], &WdbaParams::default(), &mut RandomStream::from_seed(1)).is_err());
    }

    #[test]
    fn wdba_weights_and_monotone_objective() {
        let group: Vec<TimeSeries> = (0..5).map(|k| noisy(30, 100 + k)).collect();
        let out = wdba_traced(&group, &WdbaParams::default(), &mut RandomStream::from_seed(7)).unwrap();
        assert_eq!(out.weights[out.reference], 1.0);
        assert!(out.weights.iter().all(|&w| w > 0.0 && w <= 1.0));
        assert!(out.weights.iter().any(|&w| w == 0.5 || w < 1.0));
        assert_eq!(out.objective.len(), 11);
        assert!(out.objective.windows(2).all(|w| w[1] <= w[0]));
        assert!(out.objective[10] < out.objective[0]);
    }

    #[test]
    fn asd_nearest_member_gets_half_weight() {
        let group: Vec<TimeSeries> = (0..4).map(|k| noisy(15, 200 + k)).collect();
        let w = asd_weights(&group, 0, &DtwParams::default());
        let nearest = w[1..].iter().copied().fold(0.0, f64::max);
        assert!((nearest - 0.5).abs() < 1e-12);
        assert_eq!(asd_weights(&group[..2], 0, &DtwParams::default()), vec![1.0, 1.0]);
        let dup = vec![group[0].clone(), group[0].clone(), group[1].clone()];
        let w = asd_weights(&dup, 0, &DtwParams::default());
        assert_eq!(w[1], 1.0);
        assert!((w[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dtw_merge_examples() {
        let x = noisy(30, 25);
        for seed in 0..10 {
            let y = dtw_merge(&x, &x, &DtwParams::default(), &mut RandomStream::from_seed(seed)).unwrap();
            for (a, b) in x.values().iter().zip(y.values()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        let x2 = noisy(30, 26);
        let al = dtw(&x, &x2, &DtwParams::default());
        let at_start = dtw_merge_at(&x, &x2, &al.path, 0).unwrap();
        assert_eq!(at_start, x2);
        let at_end = dtw_merge_at(&x, &x2, &al.path, al.path.len()).unwrap();
        assert_eq!(at_end, x);
        let lo = x.min().min(x2.min());
        let hi = x.max().max(x2.max());
        for seed in 0..10 {
            let y = dtw_merge(&x, &x2, &DtwParams::default(), &mut RandomStream::from_seed(seed)).unwrap();
            assert_eq!(y.len(), 30);
            assert!(within(&y, lo, hi));
        }
    }
}
