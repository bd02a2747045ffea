//! Time-domain descriptors computed directly on the sample sequence.
//!
//! Moments use population (divide-by-N) conventions: `skewness` is the
//! Fisher-Pearson g1 and `kurtosis` is excess kurtosis. Both are undefined
//! for constant input.

use crate::error::Result;
use crate::signal::{require_complete, require_len, FeatureMap, FeatureValue};

use super::{median_sorted, sorted};

/// Keys emitted by [`basic_stats`], in order.
pub const BASIC_STATS_KEYS: [&str; 11] = [
    "mean", "max", "min", "median", "std", "skewness", "kurtosis", "p2p", "rms", "mad", "mns",
];

fn check(op: &'static str, x: &[f64]) -> Result<()> {
    require_len(op, x, 2)?;
    require_complete(op, x)
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn max(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn min(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn median(x: &[f64]) -> f64 {
    median_sorted(&sorted(x))
}

/// Central moment of order `k` about `mean`.
fn central_moment(x: &[f64], mean: f64, k: i32) -> f64 {
    x.iter().map(|v| (v - mean).powi(k)).sum::<f64>() / x.len() as f64
}

pub fn std(x: &[f64]) -> f64 {
    central_moment(x, mean(x), 2).sqrt()
}

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|v| *v == x[0])
}

pub fn skewness(x: &[f64]) -> FeatureValue {
    if is_constant(x) {
        return None;
    }
    let m = mean(x);
    let m2 = central_moment(x, m, 2);
    Some(central_moment(x, m, 3) / m2.powf(1.5))
}

pub fn kurtosis(x: &[f64]) -> FeatureValue {
    if is_constant(x) {
        return None;
    }
    let m = mean(x);
    let m2 = central_moment(x, m, 2);
    Some(central_moment(x, m, 4) / (m2 * m2) - 3.0)
}

pub fn p2p(x: &[f64]) -> f64 {
    max(x) - min(x)
}

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Median absolute deviation about the median.
pub fn mad(x: &[f64]) -> f64 {
    let med = median(x);
    let dev: Vec<f64> = x.iter().map(|v| (v - med).abs()).collect();
    median(&dev)
}

/// Mean of the first differences.
pub fn mns(x: &[f64]) -> f64 {
    let diffs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    mean(&diffs)
}

/// Median of the absolute first differences.
pub fn mds(x: &[f64]) -> f64 {
    let diffs: Vec<f64> = x.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    median(&diffs)
}

/// Computes a single named statistic from [`BASIC_STATS_KEYS`].
pub fn stat(name: &str, x: &[f64]) -> Result<FeatureValue> {
    check("time-domain feature", x)?;
    Ok(match name {
        "mean" => Some(mean(x)),
        "max" => Some(max(x)),
        "min" => Some(min(x)),
        "median" => Some(median(x)),
        "std" => Some(std(x)),
        "skewness" => skewness(x),
        "kurtosis" => kurtosis(x),
        "p2p" => Some(p2p(x)),
        "rms" => Some(rms(x)),
        "mad" => Some(mad(x)),
        "mns" => Some(mns(x)),
        "mds" => Some(mds(x)),
        other => {
            return Err(crate::Error::invalid(
                "name",
                format!("unknown time-domain statistic `{other}`"),
            ))
        }
    })
}

pub fn basic_stats(x: &[f64]) -> Result<FeatureMap> {
    check("basic_stats", x)?;
    BASIC_STATS_KEYS
        .iter()
        .map(|k| stat(k, x).map(|v| (k.to_string(), v)))
        .collect()
}

/// Number of sign changes between consecutive samples. Zero-valued samples
/// are skipped, so a crossing through a run of zeros counts once. With
/// `center` the mean is subtracted first.
pub fn zcr(x: &[f64], center: bool) -> Result<usize> {
    check("zcr", x)?;
    let offset = if center { mean(x) } else { 0.0 };
    let mut crossings = 0;
    let mut last_positive: Option<bool> = None;
    for v in x.iter().map(|v| v - offset) {
        if v == 0.0 {
            continue;
        }
        let positive = v > 0.0;
        if last_positive.is_some_and(|p| p != positive) {
            crossings += 1;
        }
        last_positive = Some(positive);
    }
    Ok(crossings)
}
