//! Outlier masking. Removed samples become missing (`NaN`) so the time base
//! stays uniform; [`super::interpolate`] repairs them.

use crate::error::{Error, Result};
use crate::features::{quantile_sorted, sorted};

/// Masks samples outside `[low, high]`.
pub fn rm_outlier(x: &[f64], low: f64, high: f64) -> Result<Vec<f64>> {
    if !(low < high) {
        return Err(Error::invalid(
            "low",
            format!("need low < high, got {low} >= {high}"),
        ));
    }
    Ok(x.iter()
        .map(|&v| if v < low || v > high { f64::NAN } else { v })
        .collect())
}

/// Masks samples strictly outside the `[low_q, high_q]` quantile range of
/// the non-missing samples. Quantiles interpolate linearly between order
/// statistics.
pub fn rm_outliers_quantile(x: &[f64], low_q: f64, high_q: f64) -> Result<Vec<f64>> {
    if !(0.0 <= low_q && low_q < high_q && high_q <= 1.0) {
        return Err(Error::invalid(
            "low_q",
            format!("need 0 <= low_q < high_q <= 1, got {low_q}, {high_q}"),
        ));
    }
    let present: Vec<f64> = x.iter().copied().filter(|v| !v.is_nan()).collect();
    if present.is_empty() {
        return Ok(x.to_vec());
    }
    let s = sorted(&present);
    let (lo, hi) = (quantile_sorted(&s, low_q), quantile_sorted(&s, high_q));
    Ok(x.iter()
        .map(|&v| if v < lo || v > hi { f64::NAN } else { v })
        .collect())
}
