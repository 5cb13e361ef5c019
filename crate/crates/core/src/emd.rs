//! Empirical mode decomposition by spline-envelope sifting, and the
//! leading-IMF recombination used as an augmenter.

use serde::{Deserialize, Serialize};

use crate::series::TimeSeries;
use crate::spline::NaturalSpline;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmdParams {
    pub max_imfs: usize,
    pub sd_threshold: f64,
    pub max_sifts: usize,
}

impl Default for EmdParams {
    fn default() -> Self {
        Self {
            max_imfs: 10,
            sd_threshold: 0.3,
            max_sifts: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImfSet {
    /// Highest frequency first.
    pub imfs: Vec<TimeSeries>,
    pub residual: TimeSeries,
    /// Sift count spent on each IMF.
    pub sifts: Vec<usize>,
}

impl ImfSet {
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residual.values().to_vec();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf.values()) {
                *o += v;
            }
        }
        out
    }

    pub fn zero_crossing_counts(&self) -> Vec<usize> {
        self.imfs.iter().map(|s| zero_crossings(s.values())).collect()
    }
}

/// Strict local extrema by three-point comparison. A flat run counts once,
/// at its midpoint, when both neighbours lie on the same side. Runs touching
/// either end of the series are never extrema.
pub fn find_extrema(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let n = x.len();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    if n < 3 {
        return (maxima, minima);
    }
    // Runs of equal values: (start, end inclusive).
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || x[i] != x[start] {
            runs.push((start, i - 1));
            start = i;
        }
    }
    for w in runs.windows(3) {
        let (prev, cur, next) = (w[0], w[1], w[2]);
        let (a, v, b) = (x[prev.0], x[cur.0], x[next.0]);
        let mid = (cur.0 + cur.1) / 2;
        if v > a && v > b {
            maxima.push(mid);
        } else if v < a && v < b {
            minima.push(mid);
        }
    }
    (maxima, minima)
}

pub fn zero_crossings(x: &[f64]) -> usize {
    let mut count = 0;
    let mut last_sign = 0i8;
    for &v in x {
        let s = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 {
            if last_sign != 0 && s != last_sign {
                count += 1;
            }
            last_sign = s;
        }
    }
    count
}

/// Envelope through the given extrema, with the two outermost extrema on each
/// side mirrored about the series endpoints to tame spline end swings.
fn envelope(x: &[f64], idx: &[usize]) -> Vec<f64> {
    let n = x.len();
    let right = 2.0 * (n - 1) as f64;
    let k = idx.len().min(2);
    let mut xs = Vec::with_capacity(idx.len() + 2 * k);
    let mut ys = Vec::with_capacity(idx.len() + 2 * k);
    for &i in idx[..k].iter().rev() {
        xs.push(-(i as f64));
        ys.push(x[i]);
    }
    for &i in idx {
        xs.push(i as f64);
        ys.push(x[i]);
    }
    for &i in idx[idx.len() - k..].iter().rev() {
        xs.push(right - i as f64);
        ys.push(x[i]);
    }
    NaturalSpline::new(xs, ys).eval_grid(n)
}

fn is_imf(h: &[f64]) -> bool {
    let (maxima, minima) = find_extrema(h);
    (maxima.len() + minima.len()).abs_diff(zero_crossings(h)) <= 1
}

fn has_envelopes(x: &[f64]) -> bool {
    let (maxima, minima) = find_extrema(x);
    maxima.len() >= 2 && minima.len() >= 2
}

/// Sifts one IMF out of `r`. Returns `None` when `r` has too few extrema.
fn sift(r: &[f64], params: &EmdParams) -> Option<(Vec<f64>, usize)> {
    let mut h = r.to_vec();
    let mut sifts = 0;
    while sifts < params.max_sifts {
        let (maxima, minima) = find_extrema(&h);
        if maxima.len() < 2 || minima.len() < 2 {
            break;
        }
        let upper = envelope(&h, &maxima);
        let lower = envelope(&h, &minima);
        let mut change = 0.0;
        let mut energy = 0.0;
        for t in 0..h.len() {
            let mean = 0.5 * (upper[t] + lower[t]);
            energy += h[t] * h[t];
            change += mean * mean;
            h[t] -= mean;
        }
        sifts += 1;
        let sd = if energy > 0.0 { change / energy } else { 0.0 };
        if sd < params.sd_threshold && is_imf(&h) {
            break;
        }
    }
    (sifts > 0).then_some((h, sifts))
}

pub fn emd(x: &TimeSeries, params: &EmdParams) -> ImfSet {
    let mut residual = x.values().to_vec();
    let mut imfs = Vec::new();
    let mut sifts = Vec::new();
    if x.len() >= 4 {
        while imfs.len() < params.max_imfs && has_envelopes(&residual) {
            let Some((imf, used)) = sift(&residual, params) else {
                break;
            };
            for (r, v) in residual.iter_mut().zip(&imf) {
                *r -= v;
            }
            imfs.push(TimeSeries::new(imf));
            sifts.push(used);
        }
    }
    let set = ImfSet {
        imfs,
        residual: TimeSeries::new(residual),
        sifts,
    };
    let zc = set.zero_crossing_counts();
    if zc.windows(2).any(|w| w[1] > w[0]) {
        log::debug!("IMF zero-crossing counts not monotone: {zc:?}");
    }
    set
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmdAugmentOutput {
    pub series: TimeSeries,
    pub imfs_used: usize,
    /// True when the decomposition produced no IMF and the input was returned.
    pub unchanged: bool,
}

/// Sum of the first `k` IMFs (residual excluded).
pub fn emd_augment(x: &TimeSeries, k: usize, params: &EmdParams) -> EmdAugmentOutput {
    let set = emd(x, params);
    if set.imfs.is_empty() {
        return EmdAugmentOutput {
            series: x.clone(),
            imfs_used: 0,
            unchanged: true,
        };
    }
    let used = k.min(set.imfs.len());
    let mut out = vec![0.0; x.len()];
    for imf in &set.imfs[..used] {
        for (o, v) in out.iter_mut().zip(imf.values()) {
            *o += v;
        }
    }
    EmdAugmentOutput {
        series: TimeSeries::new(out),
        imfs_used: used,
        unchanged: false,
    }
}
