//! Shannon (histogram), sample, permutation and spectral entropy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{require_complete, require_len, FeatureValue};
use crate::spectral::Spectrum;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogBase {
    #[serde(rename = "e")]
    E,
    #[default]
    #[serde(rename = "2")]
    Two,
}

impl LogBase {
    pub fn log(self, v: f64) -> f64 {
        match self {
            LogBase::E => v.ln(),
            LogBase::Two => v.log2(),
        }
    }
}

/// `-sum(p log p)` over the strictly positive probabilities, in order.
fn shannon(probabilities: impl Iterator<Item = f64>, base: LogBase) -> f64 {
    let h: f64 = probabilities
        .filter(|p| *p > 0.0)
        .map(|p| p * base.log(p))
        .sum();
    // Avoid returning -0.0 for degenerate distributions.
    if h == 0.0 {
        0.0
    } else {
        -h
    }
}

/// Default histogram size, `ceil(sqrt(n))`.
pub fn default_bins(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).max(1)
}

/// Shannon entropy of an equal-width histogram over `[min, max]`. The
/// maximum value falls in the last bin; constant input fills a single bin.
pub fn entropy(x: &[f64], bins: Option<usize>, base: LogBase) -> Result<f64> {
    require_len("entropy", x, 1)?;
    require_complete("entropy", x)?;
    let bins = bins.unwrap_or_else(|| default_bins(x.len()));
    if bins == 0 {
        return Err(Error::invalid("bins", "must be at least 1"));
    }
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0usize; bins];
    if hi > lo {
        let width = (hi - lo) / bins as f64;
        for v in x {
            let idx = ((v - lo) / width).floor() as usize;
            counts[idx.min(bins - 1)] += 1;
        }
    } else {
        counts[0] = x.len();
    }
    let n = x.len() as f64;
    Ok(shannon(counts.iter().map(|&c| c as f64 / n), base))
}

/// Template match counts for sample entropy: `(B, A)` where `B` counts pairs
/// of length-`m` templates within Chebyshev distance `r` and `A` the pairs
/// that still match when extended to `m + 1`. Both use the first `n - m`
/// templates and exclude self-matches.
pub fn template_matches(x: &[f64], m: usize, r: f64) -> (u64, u64) {
    let n_templates = x.len() - m;
    let mut b = 0u64;
    let mut a = 0u64;
    for i in 0..n_templates {
        for j in i + 1..n_templates {
            if (0..m).all(|k| (x[i + k] - x[j + k]).abs() <= r) {
                b += 1;
                if (x[i + m] - x[j + m]).abs() <= r {
                    a += 1;
                }
            }
        }
    }
    (b, a)
}

/// Sample entropy `-ln(A / B)`. `r = None` uses `0.2 * std(x)`.
///
/// Returns `None` when no length-`m` template pairs match or when none of
/// the matches survive extension (infinite estimate).
pub fn sample_entropy(x: &[f64], m: usize, r: Option<f64>) -> Result<FeatureValue> {
    if m == 0 {
        return Err(Error::invalid(
            "m",
            "embedding dimension must be at least 1",
        ));
    }
    require_len("sample_entropy", x, m + 2)?;
    require_complete("sample_entropy", x)?;
    let r = match r {
        Some(r) if r > 0.0 && r.is_finite() => r,
        Some(r) => {
            return Err(Error::invalid(
                "r",
                format!("tolerance must be positive, got {r}"),
            ))
        }
        None => 0.2 * super::time::std(x),
    };
    let (b, a) = template_matches(x, m, r);
    if b == 0 || a == 0 {
        return Ok(None);
    }
    Ok(Some(-(a as f64 / b as f64).ln()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermEntropyParams {
    pub order: usize,
    pub delay: usize,
    pub normalize: bool,
    pub base: LogBase,
}

impl Default for PermEntropyParams {
    fn default() -> Self {
        PermEntropyParams {
            order: 3,
            delay: 1,
            normalize: false,
            base: LogBase::Two,
        }
    }
}

/// Ordinal pattern of `order` samples spaced `delay` apart starting at
/// `start`: the sample positions sorted by value, ties by position.
pub fn ordinal_pattern(x: &[f64], start: usize, order: usize, delay: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..order).collect();
    idx.sort_by(|&a, &b| x[start + a * delay].total_cmp(&x[start + b * delay]));
    idx
}

/// Bandt-Pompe permutation entropy.
pub fn perm_entropy(x: &[f64], params: &PermEntropyParams) -> Result<f64> {
    let PermEntropyParams {
        order,
        delay,
        normalize,
        base,
    } = *params;
    if order < 2 {
        return Err(Error::invalid("order", "must be at least 2"));
    }
    if order > 12 {
        return Err(Error::invalid("order", "must be at most 12"));
    }
    if delay == 0 {
        return Err(Error::invalid("delay", "must be at least 1"));
    }
    let span = (order - 1) * delay;
    require_len("perm_entropy", x, span + 2)?;
    require_complete("perm_entropy", x)?;

    let n_windows = x.len() - span;
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for start in 0..n_windows {
        *counts
            .entry(ordinal_pattern(x, start, order, delay))
            .or_default() += 1;
    }
    let total = n_windows as f64;
    let h = shannon(counts.values().map(|&c| c as f64 / total), base);
    if normalize {
        let factorial: f64 = (1..=order).map(|k| k as f64).product();
        Ok(h / base.log(factorial))
    } else {
        Ok(h)
    }
}

/// Shannon entropy of the normalized power distribution. Normalization
/// divides by `log(#bins)`.
pub fn spectral_entropy(s: &Spectrum, normalize: bool, base: LogBase) -> FeatureValue {
    let total = s.power_sum();
    if !(total > 0.0) {
        return None;
    }
    let h = shannon(s.power.iter().map(|p| p / total), base);
    if normalize {
        Some(h / base.log(s.len() as f64))
    } else {
        Some(h)
    }
}
