//! Scalar descriptors of a power spectrum.
//!
//! Every function that divides by total power returns `None` for an all-zero
//! spectrum.

use crate::error::{Error, Result};
use crate::signal::{FeatureMap, FeatureValue};
use crate::spectral::Spectrum;

/// Power-weighted mean frequency.
pub fn mnf(s: &Spectrum) -> FeatureValue {
    weighted_mean(&s.freqs, &s.power)
}

fn weighted_mean(freqs: &[f64], power: &[f64]) -> FeatureValue {
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let moment: f64 = freqs.iter().zip(power).map(|(f, p)| f * p).sum();
    Some(moment / total)
}

/// First grid frequency at which cumulative power reaches half the total.
pub fn mdf(s: &Spectrum) -> FeatureValue {
    median_frequency(&s.freqs, &s.power)
}

fn median_frequency(freqs: &[f64], power: &[f64]) -> FeatureValue {
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let half = total / 2.0;
    let mut cumulative = 0.0;
    for (f, p) in freqs.iter().zip(power) {
        cumulative += p;
        if cumulative >= half {
            return Some(*f);
        }
    }
    freqs.last().copied()
}

/// Variance of frequency about the mean frequency, weighted by power (Hz²).
pub fn vcf(s: &Spectrum) -> FeatureValue {
    frequency_variance(&s.freqs, &s.power)
}

fn frequency_variance(freqs: &[f64], power: &[f64]) -> FeatureValue {
    let centre = weighted_mean(freqs, power)?;
    let total: f64 = power.iter().sum();
    let spread: f64 = freqs
        .iter()
        .zip(power)
        .map(|(f, p)| p * (f - centre).powi(2))
        .sum();
    Some(spread / total)
}

pub fn stdf(s: &Spectrum) -> FeatureValue {
    vcf(s).map(f64::sqrt)
}

/// Share of power within `±ratio * fs / 2` of the strongest bin.
pub fn psr(s: &Spectrum, int_limit_ratio: f64) -> Result<FeatureValue> {
    if !(int_limit_ratio > 0.0 && int_limit_ratio <= 1.0) {
        return Err(Error::invalid(
            "int_limit_ratio",
            format!("must lie in (0, 1], got {int_limit_ratio}"),
        ));
    }
    let total = s.power_sum();
    if !(total > 0.0) {
        return Ok(None);
    }
    let peak = argmax(&s.power);
    let centre = s.freqs[peak];
    let half_width = int_limit_ratio * s.fs / 2.0;
    let near: f64 = s
        .freqs
        .iter()
        .zip(&s.power)
        .filter(|(f, _)| (*f - centre).abs() <= half_width)
        .map(|(_, p)| p)
        .sum();
    Ok(Some(near / total))
}

/// Key used for [`psr`] results, e.g. `psr_0.01`.
pub fn psr_key(int_limit_ratio: f64) -> String {
    format!("psr_{int_limit_ratio}")
}

/// First index of the maximum.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, p) in v.iter().enumerate() {
        if *p > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakResult {
    pub freq: f64,
    pub height: f64,
    /// Full width at half height (Hz).
    pub width: f64,
}

/// Up to `n_peaks` local maxima (strictly above both neighbours), tallest
/// first. Equal heights keep ascending-frequency order.
pub fn peaks(s: &Spectrum, n_peaks: usize) -> Result<Vec<PeakResult>> {
    if n_peaks == 0 {
        return Err(Error::invalid("n_peaks", "must be at least 1"));
    }
    let p = &s.power;
    if p.len() < 3 {
        return Ok(Vec::new());
    }
    let mut maxima: Vec<usize> = (1..p.len() - 1)
        .filter(|&i| p[i] > p[i - 1] && p[i] > p[i + 1])
        .collect();
    maxima.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
    Ok(maxima
        .into_iter()
        .take(n_peaks)
        .map(|i| PeakResult {
            freq: s.freqs[i],
            height: p[i],
            width: half_height_width(s, i),
        })
        .collect())
}

fn half_height_width(s: &Spectrum, i: usize) -> f64 {
    let p = &s.power;
    let f = &s.freqs;
    let half = p[i] / 2.0;
    let crossing = |lo: usize, hi: usize| {
        // Linear interpolation of the half-height level between two bins.
        f[lo] + (half - p[lo]) / (p[hi] - p[lo]) * (f[hi] - f[lo])
    };

    let mut j = i;
    while j > 0 && p[j] > half {
        j -= 1;
    }
    let left = if p[j] <= half {
        crossing(j, j + 1)
    } else {
        f[0]
    };

    let mut k = i;
    while k + 1 < p.len() && p[k] > half {
        k += 1;
    }
    let right = if p[k] <= half {
        crossing(k, k - 1)
    } else {
        f[p.len() - 1]
    };

    right - left
}

/// Keys and values for a [`peaks`] call; missing peaks become undefined.
pub fn peak_features(
    s: &Spectrum,
    n_peaks: usize,
    height: bool,
    width: bool,
) -> Result<FeatureMap> {
    let found = peaks(s, n_peaks)?;
    let mut out = FeatureMap::new();
    for i in 0..n_peaks {
        let peak = found.get(i);
        out.insert(format!("peak_freq_{}", i + 1), peak.map(|p| p.freq));
        if height {
            out.insert(format!("peak_height_{}", i + 1), peak.map(|p| p.height));
        }
        if width {
            out.insert(format!("peak_width_{}", i + 1), peak.map(|p| p.width));
        }
    }
    Ok(out)
}

pub fn peak_keys(n_peaks: usize, height: bool, width: bool) -> Vec<String> {
    let mut keys = Vec::new();
    for i in 1..=n_peaks {
        keys.push(format!("peak_freq_{i}"));
        if height {
            keys.push(format!("peak_height_{i}"));
        }
        if width {
            keys.push(format!("peak_width_{i}"));
        }
    }
    keys
}

/// Frequency band `[low, high]` in Hz, bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    pub low: f64,
    pub high: f64,
}

impl BandSpec {
    pub fn new(low: f64, high: f64) -> Self {
        BandSpec { low, high }
    }

    /// Checks `0 <= low < high <= nyquist`.
    pub fn validate(&self, nyquist: f64) -> Result<()> {
        if !(self.low >= 0.0 && self.low < self.high) {
            return Err(Error::invalid(
                "band",
                format!("need 0 <= low < high, got [{}, {}]", self.low, self.high),
            ));
        }
        if self.high > nyquist {
            return Err(Error::invalid(
                "band",
                format!(
                    "band [{}, {}] Hz exceeds the Nyquist frequency {nyquist} Hz",
                    self.low, self.high
                ),
            ));
        }
        Ok(())
    }

    /// Column key, e.g. `band_key("power")` gives `power_[1,7]Hz`.
    pub fn key(&self, prefix: &str) -> String {
        format!("{prefix}_[{},{}]Hz", self.low, self.high)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandFeatures {
    /// Integrated power in the band, `sum(P) * df`.
    pub power: FeatureValue,
    /// Population standard deviation of the power values in the band.
    pub std: FeatureValue,
    pub mnf: FeatureValue,
    pub mdf: FeatureValue,
}

pub fn band_features(s: &Spectrum, band: &BandSpec) -> Result<BandFeatures> {
    band.validate(s.fs / 2.0)?;
    let (freqs, power): (Vec<f64>, Vec<f64>) = s
        .freqs
        .iter()
        .zip(&s.power)
        .filter(|(f, _)| **f >= band.low && **f <= band.high)
        .map(|(f, p)| (*f, *p))
        .unzip();
    if freqs.is_empty() {
        return Ok(BandFeatures {
            power: None,
            std: None,
            mnf: None,
            mdf: None,
        });
    }
    let n = power.len() as f64;
    let sum: f64 = power.iter().sum();
    let mean = sum / n;
    let var = power.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / n;
    Ok(BandFeatures {
        power: Some(sum * s.df()),
        std: Some(var.sqrt()),
        mnf: weighted_mean(&freqs, &power),
        mdf: median_frequency(&freqs, &power),
    })
}
