//! Dynamic time warping with a Sakoe-Chiba band, shapeDTW over raw
//! subsequence descriptors, and an exhaustive-enumeration oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalCost {
    #[default]
    Squared,
    Absolute,
}

impl LocalCost {
    #[inline]
    pub fn eval(self, a: f64, b: f64) -> f64 {
        let d = a - b;
        match self {
            Self::Squared => d * d,
            Self::Absolute => d.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtwParams {
    /// Band half-width as a fraction of `max(n, m)`; 1 means unconstrained.
    pub window_fraction: f64,
    pub local_cost: LocalCost,
}

impl Default for DtwParams {
    fn default() -> Self {
        Self::unconstrained()
    }
}

impl DtwParams {
    pub const fn unconstrained() -> Self {
        Self {
            window_fraction: 1.0,
            local_cost: LocalCost::Squared,
        }
    }

    pub const fn banded(window_fraction: f64) -> Self {
        Self {
            window_fraction,
            local_cost: LocalCost::Squared,
        }
    }

    /// Half-width in samples, widened to `|n - m|` so a path always exists.
    pub fn radius(&self, n: usize, m: usize) -> usize {
        let w = self.window_fraction.clamp(0.0, 1.0);
        let r = (w * n.max(m) as f64).floor() as usize;
        r.max(n.abs_diff(m))
    }
}

/// Monotone alignment between indices of two series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WarpPath {
    pairs: Vec<(usize, usize)>,
}

impl WarpPath {
    /// Validates the step pattern and the endpoints for lengths `n`, `m`.
    pub fn new(pairs: Vec<(usize, usize)>, n: usize, m: usize) -> Result<Self> {
        let path = Self { pairs };
        if path.is_valid_for(n, m) {
            Ok(path)
        } else {
            Err(Error::PathMismatch)
        }
    }

    pub fn diagonal(n: usize) -> Self {
        Self {
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_valid_for(&self, n: usize, m: usize) -> bool {
        if n == 0 || m == 0 {
            return false;
        }
        let (Some(&first), Some(&last)) = (self.pairs.first(), self.pairs.last()) else {
            return false;
        };
        first == (0, 0)
            && last == (n - 1, m - 1)
            && self.pairs.windows(2).all(|w| {
                let di = w[1].0.wrapping_sub(w[0].0);
                let dj = w[1].1.wrapping_sub(w[0].1);
                matches!((di, dj), (1, 0) | (0, 1) | (1, 1))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub distance: f64,
    pub path: WarpPath,
}

/// Full-matrix DTW over an arbitrary local cost restricted to `|i - j| <= radius`.
/// Backtracking prefers the diagonal, then the vertical `(i-1, j)`, then the
/// horizontal `(i, j-1)` predecessor on ties.
pub(crate) fn align_by<F>(n: usize, m: usize, radius: usize, cost: F) -> Alignment
where
    F: Fn(usize, usize) -> f64,
{
    debug_assert!(n >= 1 && m >= 1 && radius >= n.abs_diff(m));
    let inf = f64::INFINITY;
    let mut acc = vec![inf; n * m];
    for i in 0..n {
        let lo = i.saturating_sub(radius);
        let hi = (i + radius).min(m - 1);
        for j in lo..=hi {
            let c = cost(i, j);
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let diag = if i > 0 && j > 0 { acc[(i - 1) * m + j - 1] } else { inf };
                let up = if i > 0 { acc[(i - 1) * m + j] } else { inf };
                let left = if j > 0 { acc[i * m + j - 1] } else { inf };
                diag.min(up).min(left)
            };
            acc[i * m + j] = c + best;
        }
    }

    let mut pairs = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n - 1, m - 1);
    pairs.push((i, j));
    while i > 0 || j > 0 {
        if i == 0 {
            j -= 1;
        } else if j == 0 {
            i -= 1;
        } else {
            let diag = acc[(i - 1) * m + j - 1];
            let up = acc[(i - 1) * m + j];
            let left = acc[i * m + j - 1];
            if diag <= up && diag <= left {
                i -= 1;
                j -= 1;
            } else if up <= left {
                i -= 1;
            } else {
                j -= 1;
            }
        }
        pairs.push((i, j));
    }
    pairs.reverse();
    Alignment {
        distance: acc[n * m - 1],
        path: WarpPath { pairs },
    }
}

pub fn dtw(x: &TimeSeries, y: &TimeSeries, params: &DtwParams) -> Alignment {
    let (xv, yv) = (x.values(), y.values());
    let radius = params.radius(xv.len(), yv.len());
    let lc = params.local_cost;
    align_by(xv.len(), yv.len(), radius, |i, j| lc.eval(xv[i], yv[j]))
}

/// DTW forced through `(waypoint, waypoint)`: the prefix and suffix problems
/// share that cell. Both series must be at least `waypoint + 1` long.
pub fn dtw_through(
    x: &TimeSeries,
    y: &TimeSeries,
    params: &DtwParams,
    waypoint: usize,
) -> Result<Alignment> {
    let (xv, yv) = (x.values(), y.values());
    let (n, m) = (xv.len(), yv.len());
    if waypoint >= n || waypoint >= m {
        return Err(Error::InvalidParam(format!(
            "waypoint {waypoint} outside {n}x{m} grid"
        )));
    }
    let radius = params.radius(n, m);
    let (tail_n, tail_m) = (n - waypoint, m - waypoint);
    if tail_n.abs_diff(tail_m) > radius {
        return Err(Error::NoAdmissiblePath(1));
    }
    let lc = params.local_cost;
    let head = align_by(waypoint + 1, waypoint + 1, radius, |i, j| lc.eval(xv[i], yv[j]));
    let tail = align_by(tail_n, tail_m, radius, |i, j| {
        lc.eval(xv[i + waypoint], yv[j + waypoint])
    });
    let shared = lc.eval(xv[waypoint], yv[waypoint]);
    let mut pairs = head.path.pairs;
    pairs.extend(
        tail.path
            .pairs
            .iter()
            .skip(1)
            .map(|&(i, j)| (i + waypoint, j + waypoint)),
    );
    Ok(Alignment {
        distance: head.distance + tail.distance - shared,
        path: WarpPath { pairs },
    })
}

/// Distance-only banded DTW that gives up once every cell of a row exceeds
/// `cutoff`. Returns `None` when abandoned; a returned value is exact.
pub fn dtw_distance_bounded(
    x: &[f64],
    y: &[f64],
    radius: usize,
    local_cost: LocalCost,
    cutoff: f64,
) -> Option<f64> {
    let (n, m) = (x.len(), y.len());
    let radius = radius.max(n.abs_diff(m));
    let inf = f64::INFINITY;
    let mut prev = vec![inf; m];
    let mut cur = vec![inf; m];
    for (i, &xi) in x.iter().enumerate() {
        let lo = i.saturating_sub(radius);
        let hi = (i + radius).min(m - 1);
        let mut row_min = inf;
        if lo > 0 {
            cur[lo - 1] = inf;
        }
        for j in lo..=hi {
            let c = local_cost.eval(xi, y[j]);
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let diag = if j > 0 { prev[j - 1] } else { inf };
                let left = if j > lo { cur[j - 1] } else { inf };
                diag.min(prev[j]).min(left)
            };
            let v = c + best;
            cur[j] = v;
            row_min = row_min.min(v);
        }
        if hi + 1 < m {
            cur[hi + 1] = inf;
        }
        if row_min > cutoff {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Some(prev[m - 1])
}

pub const ORACLE_MAX_LEN: usize = 8;

/// Exact DTW by enumerating every admissible monotone path.
pub fn dtw_bruteforce(x: &TimeSeries, y: &TimeSeries, params: &DtwParams) -> Result<f64> {
    let (xv, yv) = (x.values(), y.values());
    let (n, m) = (xv.len(), yv.len());
    if n > ORACLE_MAX_LEN || m > ORACLE_MAX_LEN {
        return Err(Error::OracleTooLarge {
            limit: ORACLE_MAX_LEN,
            n,
            m,
        });
    }
    let radius = params.radius(n, m);
    let lc = params.local_cost;

    fn walk(
        i: usize,
        j: usize,
        acc: f64,
        ctx: &(&[f64], &[f64], usize, LocalCost),
        best: &mut f64,
    ) {
        let (xv, yv, radius, lc) = *ctx;
        if i.abs_diff(j) > radius {
            return;
        }
        let acc = acc + lc.eval(xv[i], yv[j]);
        if i + 1 == xv.len() && j + 1 == yv.len() {
            *best = best.min(acc);
            return;
        }
        if i + 1 < xv.len() && j + 1 < yv.len() {
            walk(i + 1, j + 1, acc, ctx, best);
        }
        if i + 1 < xv.len() {
            walk(i + 1, j, acc, ctx, best);
        }
        if j + 1 < yv.len() {
            walk(i, j + 1, acc, ctx, best);
        }
    }

    let mut best = f64::INFINITY;
    walk(0, 0, 0.0, &(xv, yv, radius, lc), &mut best);
    Ok(best)
}

/// `max(3, round(0.1 n))`, bumped to the next odd number.
pub fn default_desc_window(n: usize) -> usize {
    let w = ((0.1 * n as f64).round() as usize).max(3);
    if w % 2 == 0 {
        w + 1
    } else {
        w
    }
}

fn check_desc_window(w: usize) -> Result<()> {
    if w == 0 || w % 2 == 0 {
        return Err(Error::InvalidParam(format!(
            "descriptor window must be odd and >= 1, got {w}"
        )));
    }
    Ok(())
}

fn edge_padded(x: &[f64], half: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() + 2 * half);
    out.extend(std::iter::repeat(x[0]).take(half));
    out.extend_from_slice(x);
    out.extend(std::iter::repeat(x[x.len() - 1]).take(half));
    out
}

/// Raw-subsequence descriptors centred on each sample, edges replicated.
pub fn shape_descriptors(x: &TimeSeries, desc_window: usize) -> Result<Vec<Vec<f64>>> {
    check_desc_window(desc_window)?;
    let padded = edge_padded(x.values(), desc_window / 2);
    Ok(padded.windows(desc_window).map(<[f64]>::to_vec).collect())
}

/// DTW over descriptor space. The local cost sums the per-element cost
/// across each descriptor pair (squared Euclidean for the default cost).
pub fn shape_dtw(
    x: &TimeSeries,
    y: &TimeSeries,
    desc_window: usize,
    params: &DtwParams,
) -> Result<Alignment> {
    check_desc_window(desc_window)?;
    let half = desc_window / 2;
    let xp = edge_padded(x.values(), half);
    let yp = edge_padded(y.values(), half);
    let (n, m) = (x.len(), y.len());
    let lc = params.local_cost;
    Ok(align_by(n, m, params.radius(n, m), |i, j| {
        xp[i..i + desc_window]
            .iter()
            .zip(&yp[j..j + desc_window])
            .map(|(a, b)| lc.eval(*a, *b))
            .sum()
    }))
}
