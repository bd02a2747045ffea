//! Stationary (undecimated, "à trous") wavelet transform and per-level
//! features.
//!
//! Level `k` filters the level `k - 1` approximation with the analysis pair
//! upsampled by `2^(k-1)`, using circular convolution. Inputs whose length
//! is not a multiple of `2^levels` are extended symmetrically first, and
//! every coefficient array is cut back to the input length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{require_complete, FeatureMap, FeatureValue};
use crate::spectral::periodogram;

use super::entropy::{self, LogBase, PermEntropyParams};
use super::{freq, time};

const HAAR: [f64; 2] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
];

const DB2: [f64; 4] = [
    -0.129_409_522_551_260_38,
    0.224_143_868_042_013_4,
    0.836_516_303_737_807_9,
    0.482_962_913_144_534_14,
];

const DB4: [f64; 8] = [
    -0.010_597_401_785_069_032,
    0.032_883_011_666_885_2,
    0.030_841_381_835_560_764,
    -0.187_034_811_719_093_08,
    -0.027_983_769_416_859_854,
    0.630_880_767_929_858_9,
    0.714_846_570_552_915_6,
    0.230_377_813_308_896_5,
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wavelet {
    Haar,
    Db2,
    #[default]
    Db4,
}

impl Wavelet {
    /// Orthonormal low-pass analysis filter.
    pub fn dec_lo(self) -> &'static [f64] {
        match self {
            Wavelet::Haar => &HAAR,
            Wavelet::Db2 => &DB2,
            Wavelet::Db4 => &DB4,
        }
    }

    /// Quadrature-mirror high-pass analysis filter,
    /// `g[k] = (-1)^(k+1) h[L-1-k]`.
    pub fn dec_hi(self) -> Vec<f64> {
        let lo = self.dec_lo();
        let len = lo.len();
        (0..len)
            .map(|k| {
                let v = lo[len - 1 - k];
                if k % 2 == 0 {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwtDecomposition {
    pub wavelet: Wavelet,
    pub levels: usize,
    /// `approx[k]` is the level `k + 1` approximation.
    pub approx: Vec<Vec<f64>>,
    /// `detail[k]` is the level `k + 1` detail.
    pub detail: Vec<Vec<f64>>,
}

/// `min(4, floor(log2 n))`.
pub fn default_levels(n: usize) -> usize {
    if n < 2 {
        return 0;
    }
    (usize::BITS - 1 - n.leading_zeros()).min(4) as usize
}

/// Circular convolution with `filter` upsampled by `step`.
fn atrous(input: &[f64], filter: &[f64], step: usize) -> Vec<f64> {
    let m = input.len();
    (0..m)
        .map(|n| {
            filter
                .iter()
                .enumerate()
                .map(|(t, h)| h * input[(n + m - (t * step) % m) % m])
                .sum()
        })
        .collect()
}

/// `atrous` for a high-pass filter, whose taps sum to zero. Each tap is
/// applied to the difference from the current sample, so flat stretches give
/// exact zeros instead of rounding residue.
fn atrous_highpass(input: &[f64], filter: &[f64], step: usize) -> Vec<f64> {
    let m = input.len();
    (0..m)
        .map(|n| {
            filter
                .iter()
                .enumerate()
                .map(|(t, h)| h * (input[(n + m - (t * step) % m) % m] - input[n]))
                .sum()
        })
        .collect()
}

pub fn swt(x: &[f64], wavelet: Wavelet, levels: Option<usize>) -> Result<SwtDecomposition> {
    require_complete("swt", x)?;
    let levels = levels.unwrap_or_else(|| default_levels(x.len()));
    if levels == 0 {
        return Err(Error::invalid(
            "levels",
            "need at least one decomposition level",
        ));
    }
    if levels >= usize::BITS as usize || x.len() < 1 << levels {
        return Err(Error::TooShort {
            op: "swt",
            needed: 1usize.checked_shl(levels as u32).unwrap_or(usize::MAX),
            got: x.len(),
        });
    }
    let n = x.len();
    let block = 1usize << levels;
    let padded_len = n.div_ceil(block) * block;
    let mut current: Vec<f64> = x.to_vec();
    current.extend(x.iter().rev().take(padded_len - n));

    let lo = wavelet.dec_lo();
    let hi = wavelet.dec_hi();
    let mut approx = Vec::with_capacity(levels);
    let mut detail = Vec::with_capacity(levels);
    for level in 0..levels {
        let step = 1 << level;
        let mut d = atrous_highpass(&current, &hi, step);
        let a = atrous(&current, lo, step);
        d.truncate(n);
        detail.push(d);
        approx.push(a[..n].to_vec());
        current = a;
    }
    Ok(SwtDecomposition {
        wavelet,
        levels,
        approx,
        detail,
    })
}

/// Sub-features computed on each detail level and on the final
/// approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwtFeature {
    /// Mean frequency of the coefficient periodogram.
    Mnf,
    /// Power spectrum ratio (`int_limit_ratio = 0.01`).
    Psr,
    /// Frequency of the tallest periodogram peak.
    Peak,
    /// Median of absolute first differences.
    Mds,
    /// Mean of first differences.
    Mns,
    /// Histogram Shannon entropy (default bins, base 2).
    See,
    /// Permutation entropy (order 3, delay 1).
    #[serde(alias = "perm-ent")]
    PermEnt,
    /// Level energy over total energy of all emitted levels.
    Nse,
}

impl SwtFeature {
    pub const ALL: [SwtFeature; 8] = [
        SwtFeature::Mnf,
        SwtFeature::Psr,
        SwtFeature::Peak,
        SwtFeature::Mds,
        SwtFeature::Mns,
        SwtFeature::See,
        SwtFeature::PermEnt,
        SwtFeature::Nse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SwtFeature::Mnf => "mnf",
            SwtFeature::Psr => "psr",
            SwtFeature::Peak => "peak",
            SwtFeature::Mds => "mds",
            SwtFeature::Mns => "mns",
            SwtFeature::See => "see",
            SwtFeature::PermEnt => "perm_ent",
            SwtFeature::Nse => "nse",
        }
    }
}

/// Level labels in output order: `d1..d{levels}` then `a{levels}`.
fn level_labels(levels: usize) -> Vec<String> {
    let mut labels: Vec<String> = (1..=levels).map(|k| format!("d{k}")).collect();
    labels.push(format!("a{levels}"));
    labels
}

pub fn swt_feature_keys(levels: usize, selected: &[SwtFeature]) -> Vec<String> {
    level_labels(levels)
        .iter()
        .flat_map(|label| {
            selected
                .iter()
                .map(move |f| format!("swt_{label}_{}", f.name()))
        })
        .collect()
}

fn level_feature(feature: SwtFeature, c: &[f64], fs: f64, nse: FeatureValue) -> FeatureValue {
    let spectral = || periodogram(c, fs).ok();
    match feature {
        SwtFeature::Mnf => spectral().and_then(|s| freq::mnf(&s)),
        SwtFeature::Psr => spectral().and_then(|s| freq::psr(&s, 0.01).ok().flatten()),
        SwtFeature::Peak => spectral()
            .and_then(|s| freq::peaks(&s, 1).ok())
            .and_then(|p| p.first().map(|p| p.freq)),
        SwtFeature::Mds => Some(time::mds(c)),
        SwtFeature::Mns => Some(time::mns(c)),
        SwtFeature::See => entropy::entropy(c, None, LogBase::Two).ok(),
        SwtFeature::PermEnt => entropy::perm_entropy(c, &PermEntropyParams::default()).ok(),
        SwtFeature::Nse => nse,
    }
}

/// Decomposes `x` and evaluates `selected` on every detail level and the
/// last approximation. Keys are `swt_d{k}_{name}` and `swt_a{levels}_{name}`.
pub fn swt_features(
    x: &[f64],
    fs: f64,
    wavelet: Wavelet,
    levels: Option<usize>,
    selected: &[SwtFeature],
) -> Result<FeatureMap> {
    let dec = swt(x, wavelet, levels)?;
    let mut arrays: Vec<&[f64]> = dec.detail.iter().map(Vec::as_slice).collect();
    arrays.push(&dec.approx[dec.levels - 1]);

    let energies: Vec<f64> = arrays
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum())
        .collect();
    let total: f64 = energies.iter().sum();

    let mut out = FeatureMap::new();
    for (label, (c, energy)) in level_labels(dec.levels)
        .iter()
        .zip(arrays.iter().zip(&energies))
    {
        let nse = (total > 0.0).then(|| energy / total);
        for &feature in selected {
            out.insert(
                format!("swt_{label}_{}", feature.name()),
                level_feature(feature, c, fs, nse),
            );
        }
    }
    Ok(out)
}
