use std::collections::HashMap;

pub fn population_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n
}

/// Sample entropy counted over explicit template vectors, every ordered
/// pair of distinct templates.
pub fn sampen_oracle(x: &[f64], m: usize, r: f64) -> Option<f64> {
    let n = x.len();
    let templates =
        |len: usize| -> Vec<Vec<f64>> { (0..n - m).map(|i| x[i..i + len].to_vec()).collect() };
    let count = |t: &[Vec<f64>]| -> u64 {
        let mut c = 0;
        for i in 0..t.len() {
            for j in 0..t.len() {
                if i != j {
                    let d = t[i]
                        .iter()
                        .zip(&t[j])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    if d <= r {
                        c += 1;
                    }
                }
            }
        }
        c
    };
    let b = count(&templates(m));
    let a = count(&templates(m + 1));
    if a == 0 || b == 0 {
        None
    } else {
        Some(-((a as f64) / (b as f64)).ln())
    }
}

/// Permutation entropy from rank vectors (rank of each position within its
/// window) counted in a hash map.
pub fn permen_oracle(x: &[f64], order: usize, delay: usize) -> f64 {
    let n_windows = x.len() - (order - 1) * delay;
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for s in 0..n_windows {
        let w: Vec<f64> = (0..order).map(|k| x[s + k * delay]).collect();
        let ranks: Vec<usize> = (0..order)
            .map(|i| {
                (0..order)
                    .filter(|&j| w[j] < w[i] || (w[j] == w[i] && j < i))
                    .count()
            })
            .collect();
        *counts.entry(ranks).or_default() += 1;
    }
    -counts
        .values()
        .map(|&c| {
            let p = c as f64 / n_windows as f64;
            p * p.log2()
        })
        .sum::<f64>()
}
pub fn atrous_oracle(x: &[f64], h: &[f64], dilation: usize) -> Vec<f64> {
    let m = x.len() as isize;
    (0..m)
        .map(|n| {
            h.iter()
                .enumerate()
                .map(|(t, c)| c * x[(n - (t * dilation) as isize).rem_euclid(m) as usize])
                .sum()
        })
        .collect()
}

/// Second-order lowpass `(b, a)` from the bilinear transform with
/// prewarped cutoff, written out by hand.
pub fn biquad_lowpass(fc: f64, fs: f64) -> ([f64; 3], [f64; 3]) {
    let k = (std::f64::consts::PI * fc / fs).tan();
    let norm = 1.0 + std::f64::consts::SQRT_2 * k + k * k;
    let b0 = k * k / norm;
    (
        [b0, 2.0 * b0, b0],
        [
            1.0,
            2.0 * (k * k - 1.0) / norm,
            (1.0 - std::f64::consts::SQRT_2 * k + k * k) / norm,
        ],
    )
}
