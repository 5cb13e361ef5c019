//! Transformation-based augmenters acting on a single series: the magnitude
//! family (jitter, rotation, scaling, magnitude warping) and the time family
//! (permutations, time warping, window slicing and window warping).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::series::{interp, resample, smooth_random_curve, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformDefaults {
    pub jitter_sigma: f64,
    pub scale_sigma: f64,
    pub mag_warp_sigma: f64,
    pub mag_warp_knots: usize,
    pub time_warp_sigma: f64,
    pub time_warp_knots: usize,
    pub perm_segments: usize,
    pub slice_ratio: f64,
    pub window_ratio: f64,
    pub window_scales: Vec<f64>,
}

impl Default for TransformDefaults {
    fn default() -> Self {
        Self {
            jitter_sigma: 0.03,
            scale_sigma: 0.1,
            mag_warp_sigma: 0.2,
            mag_warp_knots: 4,
            time_warp_sigma: 0.2,
            time_warp_knots: 4,
            perm_segments: 4,
            slice_ratio: 0.9,
            window_ratio: 0.1,
            window_scales: vec![0.5, 2.0],
        }
    }
}

impl TransformDefaults {
    pub fn validate(&self) -> Result<()> {
        let sigmas = [
            ("jitter.sigma", self.jitter_sigma),
            ("scaling.sigma", self.scale_sigma),
            ("magnitude_warp.sigma", self.mag_warp_sigma),
            ("time_warp.sigma", self.time_warp_sigma),
        ];
        for (key, v) in sigmas {
            check_sigma(key, v)?;
        }
        if self.mag_warp_knots < 1 || self.time_warp_knots < 1 {
            return Err(Error::InvalidParam("knots must be >= 1".into()));
        }
        if self.perm_segments < 1 {
            return Err(Error::InvalidParam("permutation.segments must be >= 1".into()));
        }
        if !(self.slice_ratio > 0.0 && self.slice_ratio <= 1.0) {
            return Err(Error::InvalidParam("window_slice.ratio must be in (0, 1]".into()));
        }
        if !(self.window_ratio > 0.0 && self.window_ratio < 1.0) {
            return Err(Error::InvalidParam("window_warp.ratio must be in (0, 1)".into()));
        }
        if self.window_scales.is_empty() || self.window_scales.iter().any(|s| s.is_nan() || *s <= 0.0) {
            return Err(Error::InvalidParam("window_warp.scales must be positive".into()));
        }
        Ok(())
    }
}

fn check_sigma(key: &str, sigma: f64) -> Result<()> {
    if sigma >= 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("{key} must be a finite value >= 0, got {sigma}")))
    }
}

pub fn jitter(x: &TimeSeries, sigma: f64, stream: &mut RandomStream) -> Result<TimeSeries> {
    check_sigma("jitter.sigma", sigma)?;
    if sigma == 0.0 {
        return Ok(x.clone());
    }
    Ok(TimeSeries::new(
        x.values().iter().map(|&v| v + stream.normal(0.0, sigma)).collect(),
    ))
}

/// Sign inversion; the univariate stand-in for sensor rotation.
pub fn flip_rotation(x: &TimeSeries) -> TimeSeries {
    TimeSeries::new(x.values().iter().map(|&v| -v).collect())
}

pub fn draw_scale_factor(sigma: f64, stream: &mut RandomStream) -> f64 {
    stream.normal(1.0, sigma)
}

pub fn scale_by(x: &TimeSeries, factor: f64) -> TimeSeries {
    TimeSeries::new(x.values().iter().map(|&v| v * factor).collect())
}

pub fn scaling(x: &TimeSeries, sigma: f64, stream: &mut RandomStream) -> Result<TimeSeries> {
    check_sigma("scaling.sigma", sigma)?;
    if sigma == 0.0 {
        return Ok(x.clone());
    }
    Ok(scale_by(x, draw_scale_factor(sigma, stream)))
}

pub fn magnitude_warp(
    x: &TimeSeries,
    sigma: f64,
    knots: usize,
    stream: &mut RandomStream,
) -> Result<TimeSeries> {
    check_sigma("magnitude_warp.sigma", sigma)?;
    let curve = smooth_random_curve(x.len(), knots, sigma, stream)?;
    Ok(TimeSeries::new(
        x.values().iter().zip(curve.values()).map(|(v, c)| v * c).collect(),
    ))
}

fn check_segments(n: usize, segments: usize) -> Result<()> {
    if segments < 1 || segments > n {
        return Err(Error::InvalidParam(format!(
            "segments must be in 1..={n}, got {segments}"
        )));
    }
    Ok(())
}

/// Concatenates the blocks delimited by `bounds` (start offsets, ascending,
/// first = 0) in the given `order`.
fn emit_blocks(x: &[f64], bounds: &[usize], order: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    for &b in order {
        let start = bounds[b];
        let end = bounds.get(b + 1).copied().unwrap_or(x.len());
        out.extend_from_slice(&x[start..end]);
    }
    out
}

/// Equal blocks of `n / segments` samples, the remainder joining the last block,
/// emitted in `order`.
pub fn permute_blocks(x: &TimeSeries, segments: usize, order: &[usize]) -> Result<TimeSeries> {
    check_segments(x.len(), segments)?;
    let mut seen = vec![false; segments];
    if order.len() != segments || order.iter().any(|&o| o >= segments || std::mem::replace(&mut seen[o], true)) {
        return Err(Error::InvalidParam("order must be a permutation of the segments".into()));
    }
    let width = x.len() / segments;
    let bounds: Vec<usize> = (0..segments).map(|s| s * width).collect();
    Ok(TimeSeries::new(emit_blocks(x.values(), &bounds, order)))
}

pub fn permutation(x: &TimeSeries, segments: usize, stream: &mut RandomStream) -> Result<TimeSeries> {
    check_segments(x.len(), segments)?;
    let mut order: Vec<usize> = (0..segments).collect();
    stream.shuffle(&mut order);
    permute_blocks(x, segments, &order)
}

/// Permutation with `segments - 1` distinct random split points.
pub fn random_permutation(
    x: &TimeSeries,
    segments: usize,
    stream: &mut RandomStream,
) -> Result<TimeSeries> {
    let n = x.len();
    check_segments(n, segments)?;
    if segments == 1 {
        return Ok(x.clone());
    }
    let bounds = draw_split_bounds(n, segments, stream);
    let mut order: Vec<usize> = (0..segments).collect();
    stream.shuffle(&mut order);
    Ok(TimeSeries::new(emit_blocks(x.values(), &bounds, &order)))
}

/// Block start offsets for `segments` random blocks over `n` samples. Split
/// points come from `1..n` without replacement, so no block is empty.
pub(crate) fn draw_split_bounds(n: usize, segments: usize, stream: &mut RandomStream) -> Vec<usize> {
    let mut bounds: Vec<usize> = stream
        .sample_distinct(n - 1, segments - 1)
        .into_iter()
        .map(|p| p + 1)
        .collect();
    bounds.push(0);
    bounds.sort_unstable();
    bounds
}

/// Warped timestamps from a speed curve: cumulative speed rescaled to `[0, n-1]`.
pub(crate) fn warped_timestamps(speed: &[f64]) -> Vec<f64> {
    let n = speed.len();
    let mut t = Vec::with_capacity(n);
    let mut acc = 0.0;
    t.push(0.0);
    for w in speed.windows(2) {
        acc += 0.5 * (w[0] + w[1]);
        t.push(acc);
    }
    let scale = (n - 1) as f64 / acc;
    for v in t.iter_mut() {
        *v *= scale;
    }
    t[n - 1] = (n - 1) as f64;
    t
}

pub fn time_warp(
    x: &TimeSeries,
    sigma: f64,
    knots: usize,
    stream: &mut RandomStream,
) -> Result<TimeSeries> {
    check_sigma("time_warp.sigma", sigma)?;
    if sigma == 0.0 {
        // Uniform speed; skip the curve so the identity is exact.
        if x.len() < 2 {
            return Err(Error::TooShort {
                required: 2,
                actual: x.len(),
            });
        }
        return Ok(x.clone());
    }
    let speed: Vec<f64> = smooth_random_curve(x.len(), knots, sigma, stream)?
        .into_values()
        .into_iter()
        .map(|c| c.max(1e-3))
        .collect();
    let stamps = warped_timestamps(&speed);
    let xv = x.values();
    Ok(TimeSeries::new(
        (0..x.len()).map(|j| interp(j as f64, &stamps, xv)).collect(),
    ))
}

fn window_len(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64).ceil() as usize).min(n)
}

/// Extracts `x[start..start+len]` and stretches it back to the full length.
pub fn slice_window(x: &TimeSeries, start: usize, len: usize) -> Result<TimeSeries> {
    if len < 2 || start + len > x.len() {
        return Err(Error::InvalidParam(format!(
            "window [{start}, {}) is degenerate for length {}",
            start + len,
            x.len()
        )));
    }
    Ok(TimeSeries::new(resample(&x.values()[start..start + len], x.len())))
}

pub fn window_slice(x: &TimeSeries, slice_ratio: f64, stream: &mut RandomStream) -> Result<TimeSeries> {
    if !(slice_ratio > 0.0 && slice_ratio <= 1.0) {
        return Err(Error::InvalidParam("window_slice.ratio must be in (0, 1]".into()));
    }
    let n = x.len();
    let w = window_len(n, slice_ratio);
    if w < 2 {
        return Err(Error::InvalidParam(format!(
            "slice window of {w} samples is degenerate"
        )));
    }
    let start = stream.range_inclusive(0, n - w);
    slice_window(x, start, w)
}

/// Rescales `x[start..start+len]` by `scale`, splices it back and resamples
/// the result to the original length.
pub fn warp_window(x: &TimeSeries, start: usize, len: usize, scale: f64) -> Result<TimeSeries> {
    let n = x.len();
    if len < 2 || start + len > n {
        return Err(Error::InvalidParam(format!(
            "window [{start}, {}) is degenerate for length {n}",
            start + len
        )));
    }
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidParam(format!("window scale must be > 0, got {scale}")));
    }
    let xv = x.values();
    let warped_len = ((len as f64 * scale).round() as usize).max(2);
    let mut spliced = Vec::with_capacity(n - len + warped_len);
    spliced.extend_from_slice(&xv[..start]);
    spliced.extend(resample(&xv[start..start + len], warped_len));
    spliced.extend_from_slice(&xv[start + len..]);
    Ok(TimeSeries::new(resample(&spliced, n)))
}

pub fn window_warp(
    x: &TimeSeries,
    window_ratio: f64,
    scales: &[f64],
    stream: &mut RandomStream,
) -> Result<TimeSeries> {
    if !(window_ratio > 0.0 && window_ratio < 1.0) {
        return Err(Error::InvalidParam("window_warp.ratio must be in (0, 1)".into()));
    }
    if scales.is_empty() {
        return Err(Error::InvalidParam("window_warp.scales is empty".into()));
    }
    let n = x.len();
    let w = window_len(n, window_ratio);
    if w < 2 {
        return Err(Error::InvalidParam(format!(
            "warp window of {w} samples is degenerate"
        )));
    }
    let scale = scales[stream.index(scales.len())];
    let start = stream.range_inclusive(0, n - w);
    warp_window(x, start, w, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Lane;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec())
    }

    fn stream(seed: u64) -> RandomStream {
        RandomStream::new(seed, Lane::new(1, 2, 3))
    }

    fn ramp(n: usize) -> TimeSeries {
        TimeSeries::new((0..n).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect())
    }

    fn sorted(v: &[f64]) -> Vec<f64> {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn jitter_zero_sigma_is_identity() {
        let x = ramp(30);
        assert_eq!(jitter(&x, 0.0, &mut stream(1)).unwrap(), x);
        assert!(jitter(&x, -1.0, &mut stream(1)).is_err());
    }

    #[test]
    fn jitter_noise_spread_matches_sigma() {
        let sigma = 0.03;
        let x = TimeSeries::new(vec![0.25; 100_000]);
        let y = jitter(&x, sigma, &mut stream(2)).unwrap();
        let d: Vec<f64> = y.values().iter().map(|v| v - 0.25).collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let sd = (d.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / d.len() as f64).sqrt();
        assert!((sd - sigma).abs() / sigma < 0.02, "sd = {sd}");
    }

    #[test]
    fn jitter_is_deterministic() {
        let x = ramp(40);
        assert_eq!(
            jitter(&x, 0.1, &mut stream(3)).unwrap(),
            jitter(&x, 0.1, &mut stream(3)).unwrap()
        );
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(flip_rotation(&ts(&[1.0, -2.0, 3.0])).values(), &[-1.0, 2.0, -3.0]);
        let z = ts(&[0.0, 0.0]);
        assert_eq!(flip_rotation(&z).values(), z.values());
        let x = ramp(10);
        assert_eq!(flip_rotation(&flip_rotation(&x)), x);
    }

    #[test]
    fn scaling_examples() {
        let x = ramp(12);
        assert_eq!(scaling(&x, 0.0, &mut stream(4)).unwrap(), x);
        assert_eq!(scale_by(&ts(&[1.0, 2.0]), 2.0).values(), &[2.0, 4.0]);

        let mut s = stream(5);
        let factor = draw_scale_factor(0.1, &mut s.clone());
        let y = scaling(&x, 0.1, &mut s).unwrap();
        for (a, b) in x.values().iter().zip(y.values()) {
            if *a != 0.0 {
                assert!((b / a - factor).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn magnitude_warp_examples() {
        let x = ramp(50);
        assert_eq!(magnitude_warp(&x, 0.0, 4, &mut stream(6)).unwrap(), x);
        let zeros = TimeSeries::new(vec![0.0; 20]);
        assert_eq!(magnitude_warp(&zeros, 0.2, 4, &mut stream(6)).unwrap(), zeros);

        let ones = TimeSeries::new(vec![1.0; 50]);
        let curve = smooth_random_curve(50, 4, 0.2, &mut stream(7)).unwrap();
        let y = magnitude_warp(&ones, 0.2, 4, &mut stream(7)).unwrap();
        assert_eq!(y, curve);
    }

    #[test]
    fn permutation_examples() {
        let x = ts(&[0., 1., 2., 3., 4., 5., 6., 7.]);
        let y = permute_blocks(&x, 4, &[2, 0, 3, 1]).unwrap();
        assert_eq!(y.values(), &[4., 5., 0., 1., 6., 7., 2., 3.]);
        // [a b c d e f g h] -> [c d a b g h e f]
        let y = permute_blocks(&x, 4, &[1, 0, 3, 2]).unwrap();
        assert_eq!(y.values(), &[2., 3., 0., 1., 6., 7., 4., 5.]);
        assert_eq!(permutation(&x, 1, &mut stream(8)).unwrap(), x);
        assert!(permutation(&x, 9, &mut stream(8)).is_err());
        assert!(permute_blocks(&x, 2, &[0, 0]).is_err());
    }

    #[test]
    fn permutation_remainder_joins_last_block() {
        let x = ts(&[0., 1., 2., 3., 4., 5., 6.]);
        let y = permute_blocks(&x, 3, &[2, 1, 0]).unwrap();
        assert_eq!(y.values(), &[4., 5., 6., 2., 3., 0., 1.]);
    }

    #[test]
    fn random_permutation_examples() {
        let x = ramp(16);
        assert_eq!(random_permutation(&x, 1, &mut stream(9)).unwrap(), x);
        assert!(random_permutation(&x, 17, &mut stream(9)).is_err());
        let all = ramp(5);
        let y = random_permutation(&all, 5, &mut stream(10)).unwrap();
        assert_eq!(sorted(y.values()), sorted(all.values()));
    }

    #[test]
    fn random_permutation_segments_are_nonempty() {
        for trial in 0..10_000u64 {
            let mut s = RandomStream::new(trial, Lane::new(0, 0, 1));
            let n = 4 + (trial as usize % 20);
            let segments = 1 + (trial as usize % n);
            let bounds = draw_split_bounds(n, segments, &mut s);
            assert_eq!(bounds.len(), segments);
            assert_eq!(bounds[0], 0);
            let mut ends = bounds[1..].to_vec();
            ends.push(n);
            for (start, end) in bounds.iter().zip(&ends) {
                assert!(end > start, "empty block in {bounds:?} for n = {n}");
            }
        }
    }

    #[test]
    fn time_warp_examples() {
        let x = ramp(40);
        assert_eq!(time_warp(&x, 0.0, 4, &mut stream(11)).unwrap(), x);
        let y = time_warp(&x, 0.2, 4, &mut stream(11)).unwrap();
        assert_eq!(y.values()[0], x.values()[0]);
        assert_eq!(y.values()[39], x.values()[39]);
        assert!(y.values().iter().all(|&v| v >= x.min() && v <= x.max()));
    }

    #[test]
    fn time_warp_survives_large_sigma() {
        let x = ramp(64);
        for seed in 0..50 {
            let y = time_warp(&x, 3.0, 4, &mut stream(seed)).unwrap();
            assert!(y.values().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn warped_timestamps_are_monotone_and_anchored() {
        let t = warped_timestamps(&[1.0, 3.0, 0.001, 2.0, 1.0]);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[4], 4.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn window_slice_examples() {
        let x = ramp(30);
        assert_eq!(window_slice(&x, 1.0, &mut stream(12)).unwrap(), x);
        let y = slice_window(&x, 3, 27).unwrap();
        assert_eq!(y.values()[0], x.values()[3]);
        assert_eq!(y.values()[29], x.values()[29]);
        let y = window_slice(&x, 0.9, &mut stream(13)).unwrap();
        assert!(y.values().iter().all(|&v| v >= x.min() && v <= x.max()));
        assert!(window_slice(&ts(&[1.0, 2.0]), 0.4, &mut stream(13)).is_err());
    }

    #[test]
    fn window_warp_examples() {
        let x = ramp(30);
        assert_eq!(window_warp(&x, 0.1, &[1.0], &mut stream(14)).unwrap(), x);
        for seed in 0..20 {
            let y = window_warp(&x, 0.1, &[0.5, 2.0], &mut stream(seed)).unwrap();
            assert_eq!(y.len(), 30);
            assert!(y.values().iter().all(|&v| v >= x.min() && v <= x.max()));
        }
        assert!(window_warp(&ts(&[1.0, 2.0, 3.0]), 0.1, &[2.0], &mut stream(1)).is_err());
    }

    #[test]
    fn defaults_validate() {
        TransformDefaults::default().validate().unwrap();
        let bad = TransformDefaults {
            slice_ratio: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn every_transform_preserves_length(
            v in prop::collection::vec(-5f64..5.0, 24..80),
            seed in any::<u64>(),
        ) {
            let x = TimeSeries::new(v);
            let n = x.len();
            let d = TransformDefaults::default();
            let mut s = RandomStream::from_seed(seed);
            prop_assert_eq!(jitter(&x, d.jitter_sigma, &mut s).unwrap().len(), n);
            prop_assert_eq!(flip_rotation(&x).len(), n);
            prop_assert_eq!(scaling(&x, d.scale_sigma, &mut s).unwrap().len(), n);
            prop_assert_eq!(magnitude_warp(&x, d.mag_warp_sigma, d.mag_warp_knots, &mut s).unwrap().len(), n);
            prop_assert_eq!(permutation(&x, d.perm_segments, &mut s).unwrap().len(), n);
            prop_assert_eq!(random_permutation(&x, d.perm_segments, &mut s).unwrap().len(), n);
            prop_assert_eq!(time_warp(&x, d.time_warp_sigma, d.time_warp_knots, &mut s).unwrap().len(), n);
            prop_assert_eq!(window_slice(&x, d.slice_ratio, &mut s).unwrap().len(), n);
            prop_assert_eq!(window_warp(&x, d.window_ratio, &d.window_scales, &mut s).unwrap().len(), n);
        }

        #[test]
        fn permutations_preserve_multiset(
            v in prop::collection::vec(-5f64..5.0, 1..60),
            segs in 1usize..8,
            seed in any::<u64>(),
        ) {
            let x = TimeSeries::new(v);
            prop_assume!(segs <= x.len());
            let mut s = RandomStream::from_seed(seed);
            let a = permutation(&x, segs, &mut s).unwrap();
            let b = random_permutation(&x, segs, &mut s).unwrap();
            prop_assert_eq!(sorted(a.values()), sorted(x.values()));
            prop_assert_eq!(sorted(b.values()), sorted(x.values()));
        }
    }
}
