//! Real-input DFT helpers and stratified Fourier coefficient combination (SFCC).

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::series::TimeSeries;

/// Non-redundant half of a real signal's spectrum: bins `0..=n/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpectrum {
    coeffs: Vec<Complex64>,
    n: usize,
}

impl HalfSpectrum {
    pub fn new(coeffs: Vec<Complex64>, n: usize) -> Result<Self> {
        if n == 0 || coeffs.len() != n / 2 + 1 {
            return Err(Error::LengthMismatch {
                expected: n / 2 + 1,
                actual: coeffs.len(),
            });
        }
        Ok(Self { coeffs, n })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Length of the time-domain signal.
    pub fn signal_len(&self) -> usize {
        self.n
    }

    pub fn bins(&self) -> usize {
        self.coeffs.len()
    }

    fn self_conjugate_bins(&self) -> impl Iterator<Item = usize> {
        let nyquist = (self.n % 2 == 0 && self.n > 1).then_some(self.n / 2);
        std::iter::once(0).chain(nyquist)
    }
}

pub fn rdft(x: &TimeSeries) -> HalfSpectrum {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.truncate(n / 2 + 1);
    let mut spec = HalfSpectrum { coeffs: buf, n };
    // These bins are real for real input; drop rounding residue.
    for b in spec.self_conjugate_bins().collect::<Vec<_>>() {
        spec.coeffs[b].im = 0.0;
    }
    spec
}

pub fn irdft(spec: &HalfSpectrum) -> Result<TimeSeries> {
    let n = spec.n;
    let scale = spec
        .coeffs
        .iter()
        .map(|c| c.norm())
        .fold(1.0f64, f64::max);
    for b in spec.self_conjugate_bins() {
        if spec.coeffs[b].im.abs() > 1e-9 * scale {
            return Err(Error::NotHermitian { bin: b });
        }
    }
    let mut full = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in spec.coeffs.iter().enumerate() {
        full[k] = *c;
        if k != 0 && n - k != k {
            full[n - k] = c.conj();
        }
    }
    for b in spec.self_conjugate_bins() {
        full[b].im = 0.0;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut full);
    let inv = 1.0 / n as f64;
    Ok(TimeSeries::new(full.iter().map(|c| c.re * inv).collect()))
}

/// Contiguous band boundaries: `strata` equal-width bands over `bins`, the
/// remainder joining the last band. Returns band start offsets.
pub fn band_starts(bins: usize, strata: usize) -> Vec<usize> {
    let strata = strata.clamp(1, bins);
    let width = bins / strata;
    (0..strata).map(|s| s * width).collect()
}

/// Assembles a spectrum band by band, taking band `b` from `second` when
/// `from_second[b]` is set and from `first` otherwise.
pub fn combine_bands(
    first: &HalfSpectrum,
    second: &HalfSpectrum,
    from_second: &[bool],
) -> Result<HalfSpectrum> {
    if first.n != second.n {
        return Err(Error::LengthMismatch {
            expected: first.n,
            actual: second.n,
        });
    }
    let starts = band_starts(first.bins(), from_second.len());
    let mut coeffs = first.coeffs.clone();
    for (b, &start) in starts.iter().enumerate() {
        let end = starts.get(b + 1).copied().unwrap_or(first.bins());
        if from_second[b] {
            coeffs[start..end].copy_from_slice(&second.coeffs[start..end]);
        }
    }
    Ok(HalfSpectrum { coeffs, n: first.n })
}

/// SFCC: each frequency band of the child comes whole from one of the two
/// parents, chosen uniformly.
pub fn sfcc(
    x1: &TimeSeries,
    x2: &TimeSeries,
    strata: usize,
    stream: &mut RandomStream,
) -> Result<TimeSeries> {
    if x1.len() != x2.len() {
        return Err(Error::LengthMismatch {
            expected: x1.len(),
            actual: x2.len(),
        });
    }
    if strata < 1 {
        return Err(Error::InvalidParam("sfcc.strata must be >= 1".into()));
    }
    let a = rdft(x1);
    let b = rdft(x2);
    let bands = band_starts(a.bins(), strata).len();
    let picks: Vec<bool> = (0..bands).map(|_| stream.coin()).collect();
    irdft(&combine_bands(&a, &b, &picks)?)
}
