//! Series and dataset types, UCR ingestion, the [-1, 1] rescale and the
//! missing-value rule, plus the interpolation helpers shared by augmenters.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::spline::NaturalSpline;

/// An ordered, non-empty sequence of real samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    /// Panics on an empty vector; use [`TimeSeries::try_new`] for untrusted input.
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "a time series needs at least one sample");
        Self { values }
    }

    pub fn try_new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooShort {
                required: 1,
                actual: 0,
            });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl From<Vec<f64>> for TimeSeries {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Class identifier, kept verbatim as it appears in the source file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label(pub String);

impl Label {
    pub fn new(s: impl Into<String>) -> Self {
        Self(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub series: TimeSeries,
    pub label: Label,
}

impl LabeledSeries {
    pub fn new(series: TimeSeries, label: Label) -> Self {
        Self { series, label }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    split: Split,
    items: Vec<LabeledSeries>,
    classes: Vec<Label>,
    fixed_length: Option<usize>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, split: Split, items: Vec<LabeledSeries>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut classes: Vec<Label> = items.iter().map(|it| it.label.clone()).collect();
        sort_labels(&mut classes);
        classes.dedup();
        let first = items[0].series.len();
        let fixed_length = items
            .iter()
            .all(|it| it.series.len() == first)
            .then_some(first);
        Ok(Self {
            name: name.into(),
            split,
            items,
            classes,
            fixed_length,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn items(&self) -> &[LabeledSeries] {
        &self.items
    }

    pub fn into_items(self) -> Vec<LabeledSeries> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Distinct labels, numerically ordered when every label parses as a number.
    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn fixed_length(&self) -> Option<usize> {
        self.fixed_length
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.items.iter().map(|it| it.series.len()).collect()
    }

    /// Item count per class, in [`Dataset::classes`] order.
    pub fn class_counts(&self) -> Vec<(Label, usize)> {
        let mut counts: BTreeMap<&Label, usize> = BTreeMap::new();
        for it in &self.items {
            *counts.entry(&it.label).or_default() += 1;
        }
        self.classes
            .iter()
            .map(|c| (c.clone(), counts.get(c).copied().unwrap_or(0)))
            .collect()
    }

    /// Applies `f` to every series, keeping labels and metadata.
    pub fn map_series(&self, mut f: impl FnMut(&TimeSeries) -> TimeSeries) -> Self {
        let items = self
            .items
            .iter()
            .map(|it| LabeledSeries::new(f(&it.series), it.label.clone()))
            .collect();
        Self::new(self.name.clone(), self.split, items).expect("mapping preserves item count")
    }

    pub fn sanitized(&self) -> Self {
        self.map_series(sanitize)
    }

    pub fn normalized(&self, params: &NormalizationParams) -> Self {
        self.map_series(|s| apply_normalizer(s, params))
    }
}

fn sort_labels(labels: &mut [Label]) {
    let numeric: Option<Vec<f64>> = labels.iter().map(|l| l.0.trim().parse().ok()).collect();
    match numeric {
        Some(_) => labels.sort_by(|a, b| {
            let x: f64 = a.0.trim().parse().unwrap();
            let y: f64 = b.0.trim().parse().unwrap();
            x.total_cmp(&y).then_with(|| a.cmp(b))
        }),
        None => labels.sort(),
    }
}

fn is_missing_token(tok: &str) -> bool {
    tok.is_empty() || tok.eq_ignore_ascii_case("nan") || tok == "?"
}

fn dataset_name(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    for suffix in ["_TRAIN", "_TEST", "_train", "_test"] {
        if let Some(base) = stem.strip_suffix(suffix) {
            return base.to_string();
        }
    }
    stem
}

/// Reads a UCR-format file: one series per line, label first, tab separated.
/// Comma- or whitespace-separated rows are accepted as well. `NaN` tokens and
/// empty fields are kept as NaN so that [`sanitize`] can zero them later.
pub fn load_ucr_tsv(path: impl AsRef<Path>, split: Split) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let items = parse_ucr(&text, path)?;
    if items.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    Dataset::new(dataset_name(path), split, items)
}

pub(crate) fn parse_ucr(text: &str, path: &Path) -> Result<Vec<LabeledSeries>> {
    let mut items = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields: Vec<&str> = if line.contains('\t') {
            line.split('\t').collect()
        } else if line.contains(',') {
            line.split(',').collect()
        } else {
            line.split_whitespace().collect()
        };
        // A trailing separator is not a missing sample.
        while fields.len() > 1 && fields.last().is_some_and(|f| f.trim().is_empty()) {
            fields.pop();
        }
        let malformed = |reason: String| Error::MalformedRow {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason,
        };
        let label = fields[0].trim();
        if label.is_empty() {
            return Err(malformed("missing label".into()));
        }
        if fields.len() < 2 {
            return Err(malformed("no samples after the label".into()));
        }
        let values = fields[1..]
            .iter()
            .map(|f| {
                let tok = f.trim();
                if is_missing_token(tok) {
                    Ok(f64::NAN)
                } else {
                    tok.parse::<f64>()
                        .map_err(|_| malformed(format!("non-numeric value `{tok}`")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        items.push(LabeledSeries::new(TimeSeries::new(values), Label::new(label)));
    }
    Ok(items)
}

/// Formats like C's `%.17g`: enough digits to round-trip any `f64`.
pub fn format_g17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "Infinity".into()
        } else {
            "-Infinity".into()
        };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_ucr<W: Write>(dataset: &Dataset, mut out: W) -> std::io::Result<()> {
    let mut line = String::new();
    for it in dataset.items() {
        line.clear();
        line.push_str(it.label.as_str());
        for &v in it.series.values() {
            line.push('\t');
            line.push_str(&format_g17(v));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn write_ucr_tsv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    write_ucr(dataset, &mut buf).map_err(|e| Error::io(path, e))?;
    buf.flush().map_err(|e| Error::io(path, e))
}

/// Replaces every missing or non-finite sample with zero.
pub fn sanitize(series: &TimeSeries) -> TimeSeries {
    TimeSeries::new(
        series
            .values()
            .iter()
            .map(|&v| if v.is_finite() { v } else { 0.0 })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub train_min: f64,
    pub train_max: f64,
}

/// Global extrema over every finite training sample. Missing samples are
/// ignored here; they are zeroed after rescaling.
pub fn fit_normalizer(train: &Dataset) -> NormalizationParams {
    let (lo, hi) = train
        .items()
        .iter()
        .flat_map(|it| it.series.values())
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        return NormalizationParams {
            train_min: 0.0,
            train_max: 0.0,
        };
    }
    NormalizationParams {
        train_min: lo,
        train_max: hi,
    }
}

/// `y = 2 (x - min) / (max - min) - 1`; a degenerate range maps to zeros.
pub fn apply_normalizer(series: &TimeSeries, params: &NormalizationParams) -> TimeSeries {
    let span = params.train_max - params.train_min;
    let values = series
        .values()
        .iter()
        .map(|&x| {
            if span == 0.0 {
                if x.is_finite() {
                    0.0
                } else {
                    x
                }
            } else {
                2.0 * (x - params.train_min) / span - 1.0
            }
        })
        .collect();
    TimeSeries::new(values)
}

/// Piecewise-linear value of `x` at fractional position `pos` in `[0, n-1]`.
#[inline]
pub(crate) fn sample_at(x: &[f64], pos: f64) -> f64 {
    let n = x.len();
    if n == 1 || pos <= 0.0 {
        return x[0];
    }
    if pos >= (n - 1) as f64 {
        return x[n - 1];
    }
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if frac == 0.0 {
        x[i]
    } else {
        x[i] + frac * (x[i + 1] - x[i])
    }
}

/// Resamples a slice to `m >= 1` points evenly spaced over `[0, n-1]`.
pub(crate) fn resample(x: &[f64], m: usize) -> Vec<f64> {
    debug_assert!(!x.is_empty() && m >= 1);
    let n = x.len();
    if m == n {
        return x.to_vec();
    }
    if m == 1 {
        return vec![x[0]];
    }
    let step = (n - 1) as f64 / (m - 1) as f64;
    let mut out: Vec<f64> = (0..m).map(|k| sample_at(x, k as f64 * step)).collect();
    out[m - 1] = x[n - 1];
    out
}

pub fn linear_resample(series: &TimeSeries, m: usize) -> Result<TimeSeries> {
    if m == 0 {
        return Err(Error::InvalidParam("resample target length must be >= 1".into()));
    }
    Ok(TimeSeries::new(resample(series.values(), m)))
}

/// Linear interpolation of the points `(xp, fp)` at `x`, clamping outside
/// the range. `xp` must be non-decreasing.
pub(crate) fn interp(x: f64, xp: &[f64], fp: &[f64]) -> f64 {
    let n = xp.len();
    if x <= xp[0] {
        return fp[0];
    }
    if x >= xp[n - 1] {
        return fp[n - 1];
    }
    let hi = xp.partition_point(|&v| v <= x);
    let lo = hi - 1;
    let dx = xp[hi] - xp[lo];
    if dx <= 0.0 {
        return fp[hi];
    }
    let t = (x - xp[lo]) / dx;
    if t == 0.0 {
        fp[lo]
    } else {
        fp[lo] + t * (fp[hi] - fp[lo])
    }
}

/// A smooth random curve around 1: a natural cubic spline through
/// `knots + 2` evenly spaced anchors with values drawn from N(1, sigma^2).
pub fn smooth_random_curve(
    n: usize,
    knots: usize,
    sigma: f64,
    stream: &mut RandomStream,
) -> Result<TimeSeries> {
    if n < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: n,
        });
    }
    if knots < 1 {
        return Err(Error::InvalidParam("knots must be >= 1".into()));
    }
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::InvalidParam(format!("sigma must be >= 0, got {sigma}")));
    }
    let anchors = knots + 2;
    let span = (n - 1) as f64;
    let xs: Vec<f64> = (0..anchors)
        .map(|k| span * k as f64 / (anchors - 1) as f64)
        .collect();
    let ys: Vec<f64> = (0..anchors).map(|_| stream.normal(1.0, sigma)).collect();
    Ok(TimeSeries::new(NaturalSpline::new(xs, ys).eval_grid(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Lane;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec())
    }

    fn parse(text: &str) -> Result<Vec<LabeledSeries>> {
        parse_ucr(text, Path::new("mem.tsv"))
    }

    #[test]
    fn parses_tab_comma_and_space_rows() {
        let items = parse("1\t0.5\t1.5\n2,3,4\n3 0.0 1.0\n").unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[0].series.values(), &[0.5, 1.5]);
        assert_eq!(items[1].label.as_str(), "2");
        assert_eq!(items[2].series.values(), &[0.0, 1.0]);
    }

    #[test]
    fn single_line_gives_one_item() {
        let items = parse("1 0.0 1.0").unwrap();
        let ds = Dataset::new("x", Split::Train, items).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.classes().len(), 1);
        assert_eq!(ds.fixed_length(), Some(2));
    }

    #[test]
    fn missing_markers_become_nan() {
        let items = parse("1\t1.0\tNaN\t\t3.0\n").unwrap();
        let v = items[0].series.values();
        assert_eq!(v.len(), 4);
        assert!(v[1].is_nan() && v[2].is_nan());
    }

    #[test]
    fn rejects_garbage() {
        let err = parse("1\t0.5\tabc\n").unwrap_err();
        assert!(matches!(err, Error::MalformedRow { line: 1, .. }));
        assert!(parse("1\n").is_err());
    }

    #[test]
    fn empty_and_missing_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.tsv");
        fs::write(&p, "\n\n").unwrap();
        assert!(matches!(load_ucr_tsv(&p, Split::Train), Err(Error::EmptyFile(_))));
        assert!(matches!(
            load_ucr_tsv(dir.path().join("nope.tsv"), Split::Train),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn variable_length_has_no_fixed_length() {
        let items = parse("1\t1\t2\t3\n2\t1\t2\n").unwrap();
        let ds = Dataset::new("v", Split::Train, items).unwrap();
        assert_eq!(ds.fixed_length(), None);
        assert_eq!(ds.lengths(), vec![3, 2]);
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let items = parse("10\t1\n2\t1\n-1\t1\n2\t3\n").unwrap();
        let ds = Dataset::new("v", Split::Train, items).unwrap();
        let names: Vec<&str> = ds.classes().iter().map(Label::as_str).collect();
        assert_eq!(names, ["-1", "2", "10"]);
        assert_eq!(ds.class_counts()[1].1, 2);
    }

    #[test]
    fn dataset_name_strips_split_suffix() {
        assert_eq!(dataset_name(Path::new("/a/CBF_TRAIN.tsv")), "CBF");
        assert_eq!(dataset_name(Path::new("x.tsv")), "x");
    }

    #[test]
    fn sanitize_examples() {
        let nan = f64::NAN;
        assert_eq!(sanitize(&ts(&[1.0, nan, 3.0])).values(), &[1.0, 0.0, 3.0]);
        assert_eq!(sanitize(&ts(&[1.0, 2.0])).values(), &[1.0, 2.0]);
        assert_eq!(sanitize(&ts(&[nan, nan])).values(), &[0.0, 0.0]);
        assert_eq!(sanitize(&ts(&[f64::INFINITY])).values(), &[0.0]);
    }

    fn dataset(rows: &[&[f64]]) -> Dataset {
        let items = rows
            .iter()
            .map(|r| LabeledSeries::new(ts(r), Label::new("1")))
            .collect();
        Dataset::new("d", Split::Train, items).unwrap()
    }

    #[test]
    fn fit_normalizer_examples() {
        let p = fit_normalizer(&dataset(&[&[0.0, 10.0, 3.0]]));
        assert_eq!((p.train_min, p.train_max), (0.0, 10.0));
        let p = fit_normalizer(&dataset(&[&[5.0, 5.0], &[5.0]]));
        assert_eq!((p.train_min, p.train_max), (5.0, 5.0));
        let p = fit_normalizer(&dataset(&[&[-2.0, 0.0], &[0.0, 4.0]]));
        assert_eq!((p.train_min, p.train_max), (-2.0, 4.0));
        let p = fit_normalizer(&dataset(&[&[f64::NAN, 1.0, 2.0]]));
        assert_eq!((p.train_min, p.train_max), (1.0, 2.0));
    }

    #[test]
    fn apply_normalizer_examples() {
        let p = NormalizationParams {
            train_min: 0.0,
            train_max: 10.0,
        };
        assert_eq!(apply_normalizer(&ts(&[0.0, 5.0, 10.0]), &p).values(), &[-1.0, 0.0, 1.0]);
        let flat = NormalizationParams {
            train_min: 5.0,
            train_max: 5.0,
        };
        assert_eq!(apply_normalizer(&ts(&[5.0, 5.0]), &flat).values(), &[0.0, 0.0]);
    }

    #[test]
    fn linear_resample_examples() {
        assert_eq!(linear_resample(&ts(&[0.0, 1.0]), 3).unwrap().values(), &[0.0, 0.5, 1.0]);
        let x = ts(&[0.3, -1.0, 2.0, 7.5]);
        assert_eq!(linear_resample(&x, 4).unwrap(), x);
        assert_eq!(linear_resample(&ts(&[0.0, 2.0, 4.0, 6.0]), 2).unwrap().values(), &[0.0, 6.0]);
        assert!(linear_resample(&x, 0).is_err());
        assert_eq!(linear_resample(&ts(&[4.0]), 3).unwrap().values(), &[4.0, 4.0, 4.0]);
    }

    #[test]
    fn g17_formatting_round_trips() {
        assert_eq!(format_g17(0.0), "0");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(-0.5), "-0.5");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_g17(1e20), "1e+20");
        for v in [std::f64::consts::PI, -1.2345e-300, 6.02e23, 0.3333333333333333] {
            assert_eq!(format_g17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn writer_emits_tab_separated_rows() {
        let items = parse("1\t0.5\t1.5\n2\t-3\t4\n").unwrap();
        let ds = Dataset::new("w", Split::Train, items).unwrap();
        let mut buf = Vec::new();
        write_ucr(&ds, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1\t0.5\t1.5\n2\t-3\t4\n");
    }

    #[test]
    fn smooth_curve_zero_sigma_is_flat() {
        let mut s = RandomStream::from_seed(1);
        let c = smooth_random_curve(50, 4, 0.0, &mut s).unwrap();
        assert!(c.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn smooth_curve_is_deterministic() {
        let lane = Lane::new(4, 2, 99);
        let a = smooth_random_curve(64, 4, 0.2, &mut RandomStream::new(7, lane)).unwrap();
        let b = smooth_random_curve(64, 4, 0.2, &mut RandomStream::new(7, lane)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn smooth_curve_anchor_spread_matches_sigma() {
        // With one knot the anchors sit at 0, (n-1)/2, n-1, i.e. on grid points 0, 2, 4.
        let sigma = 0.2;
        let mut samples = Vec::with_capacity(300_000);
        for lane in 0..100_000u64 {
            let mut s = RandomStream::new(11, Lane::new(lane, 0, 1));
            let c = smooth_random_curve(5, 1, sigma, &mut s).unwrap();
            samples.extend([c.values()[0], c.values()[2], c.values()[4]]);
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let sd = (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert_abs_diff_eq!(mean, 1.0, epsilon = 0.01);
        assert!((sd - sigma).abs() / sigma < 0.02, "sd = {sd}");
    }

    proptest! {
        #[test]
        fn normalizer_maps_train_extrema_to_unit(rows in prop::collection::vec(
            prop::collection::vec(-1e3f64..1e3, 1..20), 1..6)) {
            let rows_ref: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
            let ds = dataset(&rows_ref);
            let p = fit_normalizer(&ds);
            prop_assume!(p.train_max > p.train_min);
            let out = ds.normalized(&p);
            let all: Vec<f64> = out.items().iter().flat_map(|it| it.series.values().to_vec()).collect();
            let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((lo + 1.0).abs() <= 1e-12);
            prop_assert!((hi - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn resample_is_exact_on_progressions(a in -100f64..100.0, d in -10f64..10.0,
                                             n in 2usize..40, m in 2usize..40) {
            let x: Vec<f64> = (0..n).map(|i| a + d * i as f64).collect();
            let y = resample(&x, m);
            prop_assert_eq!(y[0], x[0]);
            prop_assert_eq!(y[m - 1], x[n - 1]);
            let step = (y[m - 1] - y[0]) / (m - 1) as f64;
            for (k, v) in y.iter().enumerate() {
                prop_assert!((v - (y[0] + step * k as f64)).abs() <= 1e-9 * (1.0 + a.abs() + d.abs() * n as f64));
            }
        }

        #[test]
        fn sanitize_is_idempotent(v in prop::collection::vec(
            prop_oneof![Just(f64::NAN), Just(f64::INFINITY), -1e6f64..1e6], 1..50)) {
            let once = sanitize(&TimeSeries::new(v));
            prop_assert_eq!(sanitize(&once), once.clone());
            prop_assert!(once.values().iter().all(|x| x.is_finite()));
        }
    }
}
