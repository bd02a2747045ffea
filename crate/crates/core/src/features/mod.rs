//! Feature functions: time-domain statistics, spectral descriptors, entropy
//! measures and stationary-wavelet features.

pub mod entropy;
pub mod freq;
pub mod time;
pub mod wavelet;

/// Sorted copy using IEEE total ordering.
pub(crate) fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Median of an already sorted, non-empty slice.
pub(crate) fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Quantile by linear interpolation between order statistics of a sorted,
/// non-empty slice (`h = (n - 1) q`).
pub(crate) fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}
