//! Built-in feature steps: a name plus parameters, resolved to concrete
//! feature functions and column keys.

use std::collections::HashMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::features::entropy::{self, LogBase, PermEntropyParams};
use crate::features::freq::{self, BandSpec};
use crate::features::time::{self, BASIC_STATS_KEYS};
use crate::features::wavelet::{self, SwtFeature, Wavelet};
use crate::signal::{FeatureMap, Signal};
use crate::spectral::{periodogram, welch, Spectrum, WelchParams, Window};

/// Every feature name accepted in a feature set.
pub const FEATURE_NAMES: &[&str] = &[
    "mean",
    "max",
    "min",
    "median",
    "std",
    "skewness",
    "kurtosis",
    "p2p",
    "rms",
    "mad",
    "mns",
    "mds",
    "basic_stats",
    "zcr",
    "entropy",
    "sample_entropy",
    "perm_entropy",
    "spectral_entropy",
    "mnf",
    "mdf",
    "stdf",
    "vcf",
    "psr",
    "peaks",
    "band_power",
    "band_std",
    "band_mnf",
    "band_mdf",
    "swt_features",
];

/// Closest vocabulary entry to `name`, if any is reasonably close.
pub fn nearest_name<'a>(name: &str, vocabulary: &[&'a str]) -> Option<&'a str> {
    vocabulary
        .iter()
        .map(|v| (strsim::damerau_levenshtein(name, v), *v))
        .filter(|(d, v)| *d <= 2.max(v.len() / 3))
        .min_by_key(|(d, _)| *d)
        .map(|(_, v)| v)
}

pub fn unknown_feature_message(name: &str) -> String {
    match nearest_name(name, FEATURE_NAMES) {
        Some(near) => format!("unknown feature: {name} (did you mean `{near}`?)"),
        None => format!("unknown feature: {name}"),
    }
}

/// Which PSD estimate a frequency feature reads.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SpectrumSelector {
    #[default]
    Periodogram,
    Welch(WelchParams),
}

type SpectrumKey = (u8, Option<usize>, u64, Window);

impl SpectrumSelector {
    pub fn compute(&self, signal: &Signal) -> Result<Spectrum> {
        match self {
            SpectrumSelector::Periodogram => periodogram(&signal.samples, signal.fs),
            SpectrumSelector::Welch(p) => welch(&signal.samples, signal.fs, p),
        }
    }

    fn key(&self) -> SpectrumKey {
        match self {
            SpectrumSelector::Periodogram => (0, None, 0, Window::Rectangular),
            SpectrumSelector::Welch(p) => (1, p.nperseg, p.overlap_ratio.to_bits(), p.window),
        }
    }

    fn validate(&self) -> Result<()> {
        if let SpectrumSelector::Welch(p) = self {
            if let Some(n) = p.nperseg {
                if n < 4 {
                    return Err(Error::invalid(
                        "nperseg",
                        format!("must be at least 4, got {n}"),
                    ));
                }
            }
            if !(0.0..1.0).contains(&p.overlap_ratio) {
                return Err(Error::invalid(
                    "overlap",
                    format!("must lie in [0, 1), got {}", p.overlap_ratio),
                ));
            }
        }
        Ok(())
    }
}

/// Spectra of one signal, each estimated at most once.
#[derive(Default)]
pub struct SpectrumCache {
    entries: HashMap<SpectrumKey, std::result::Result<Spectrum, String>>,
    computed: usize,
}

impl SpectrumCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, selector: &SpectrumSelector, signal: &Signal) -> Result<&Spectrum> {
        let computed = &mut self.computed;
        let entry = self.entries.entry(selector.key()).or_insert_with(|| {
            *computed += 1;
            selector.compute(signal).map_err(|e| e.to_string())
        });
        entry.as_ref().map_err(|msg| Error::Record(msg.clone()))
    }

    /// Number of spectrum estimates actually computed.
    pub fn computed(&self) -> usize {
        self.computed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    Power,
    Std,
    Mnf,
    Mdf,
}

impl BandKind {
    fn prefix(self) -> &'static str {
        match self {
            BandKind::Power => "power",
            BandKind::Std => "std",
            BandKind::Mnf => "mnf",
            BandKind::Mdf => "mdf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralFeature {
    Mnf,
    Mdf,
    Stdf,
    Vcf,
    Psr {
        int_limit_ratio: f64,
    },
    Peaks {
        n_peaks: usize,
        height: bool,
        width: bool,
    },
    Band {
        kind: BandKind,
        band: BandSpec,
    },
    Entropy {
        normalize: bool,
        base: LogBase,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureStep {
    /// One statistic from the time-domain set (`mean`, `std`, ...).
    Stat(&'static str),
    BasicStats,
    Zcr {
        center: bool,
    },
    Entropy {
        bins: Option<usize>,
        base: LogBase,
    },
    SampleEntropy {
        m: usize,
        r: Option<f64>,
    },
    PermEntropy(PermEntropyParams),
    Swt {
        wavelet: Wavelet,
        levels: usize,
        features: Vec<SwtFeature>,
    },
    Spectral {
        spectrum: SpectrumSelector,
        feature: SpectralFeature,
    },
}

/// Decomposition depth used when a `swt_features` step does not set one;
/// fixed so the column set does not depend on record length.
pub const DEFAULT_SWT_LEVELS: usize = 4;

impl FeatureStep {
    pub fn spectral(spectrum: SpectrumSelector, feature: SpectralFeature) -> Self {
        FeatureStep::Spectral { spectrum, feature }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FeatureStep::Stat(name) => name,
            FeatureStep::BasicStats => "basic_stats",
            FeatureStep::Zcr { .. } => "zcr",
            FeatureStep::Entropy { .. } => "entropy",
            FeatureStep::SampleEntropy { .. } => "sample_entropy",
            FeatureStep::PermEntropy(_) => "perm_entropy",
            FeatureStep::Swt { .. } => "swt_features",
            FeatureStep::Spectral { feature, .. } => match feature {
                SpectralFeature::Mnf => "mnf",
                SpectralFeature::Mdf => "mdf",
                SpectralFeature::Stdf => "stdf",
                SpectralFeature::Vcf => "vcf",
                SpectralFeature::Psr { .. } => "psr",
                SpectralFeature::Peaks { .. } => "peaks",
                SpectralFeature::Band { kind, .. } => match kind {
                    BandKind::Power => "band_power",
                    BandKind::Std => "band_std",
                    BandKind::Mnf => "band_mnf",
                    BandKind::Mdf => "band_mdf",
                },
                SpectralFeature::Entropy { .. } => "spectral_entropy",
            },
        }
    }

    /// Output keys, known without looking at any data.
    pub fn keys(&self) -> Vec<String> {
        match self {
            FeatureStep::BasicStats => BASIC_STATS_KEYS.iter().map(|k| k.to_string()).collect(),
            FeatureStep::Swt {
                levels, features, ..
            } => wavelet::swt_feature_keys(*levels, features),
            FeatureStep::Spectral { feature, .. } => match feature {
                SpectralFeature::Psr { int_limit_ratio } => vec![freq::psr_key(*int_limit_ratio)],
                SpectralFeature::Peaks {
                    n_peaks,
                    height,
                    width,
                } => freq::peak_keys(*n_peaks, *height, *width),
                SpectralFeature::Band { kind, band } => vec![band.key(kind.prefix())],
                _ => vec![self.name().to_string()],
            },
            _ => vec![self.name().to_string()],
        }
    }

    /// Parameter checks. With `fs` known, bands are checked against Nyquist.
    pub fn validate(&self, fs: Option<f64>) -> Result<()> {
        match self {
            FeatureStep::Stat(_) | FeatureStep::BasicStats | FeatureStep::Zcr { .. } => Ok(()),
            FeatureStep::Entropy { bins, .. } => match bins {
                Some(0) => Err(Error::invalid("bins", "must be at least 1")),
                _ => Ok(()),
            },
            FeatureStep::SampleEntropy { m, r } => {
                if *m == 0 {
                    return Err(Error::invalid(
                        "m",
                        "embedding dimension must be at least 1",
                    ));
                }
                match r {
                    Some(r) if !(*r > 0.0 && r.is_finite()) => Err(Error::invalid(
                        "r",
                        format!("tolerance must be positive, got {r}"),
                    )),
                    _ => Ok(()),
                }
            }
            FeatureStep::PermEntropy(p) => {
                if !(2..=12).contains(&p.order) {
                    return Err(Error::invalid(
                        "order",
                        format!("must lie in 2..=12, got {}", p.order),
                    ));
                }
                if p.delay == 0 {
                    return Err(Error::invalid("delay", "must be at least 1"));
                }
                Ok(())
            }
            FeatureStep::Swt { levels, .. } => {
                if *levels == 0 {
                    return Err(Error::invalid("levels", "must be at least 1"));
                }
                Ok(())
            }
            FeatureStep::Spectral { spectrum, feature } => {
                spectrum.validate()?;
                match feature {
                    SpectralFeature::Psr { int_limit_ratio } => {
                        if !(*int_limit_ratio > 0.0 && *int_limit_ratio <= 1.0) {
                            return Err(Error::invalid(
                                "int_limit_ratio",
                                format!("must lie in (0, 1], got {int_limit_ratio}"),
                            ));
                        }
                    }
                    SpectralFeature::Peaks { n_peaks: 0, .. } => {
                        return Err(Error::invalid("n_peaks", "must be at least 1"));
                    }
                    SpectralFeature::Band { band, .. } => {
                        band.validate(fs.map_or(f64::INFINITY, |fs| fs / 2.0))?;
                    }
                    _ => {}
                }
                Ok(())
            }
        }
    }

    pub fn compute(&self, signal: &Signal, cache: &mut SpectrumCache) -> Result<FeatureMap> {
        let x = &signal.samples;
        let single = |v| FeatureMap::from_iter([(self.keys().remove(0), v)]);
        match self {
            FeatureStep::Stat(name) => Ok(single(time::stat(name, x)?)),
            FeatureStep::BasicStats => time::basic_stats(x),
            FeatureStep::Zcr { center } => Ok(single(Some(time::zcr(x, *center)? as f64))),
            FeatureStep::Entropy { bins, base } => {
                Ok(single(Some(entropy::entropy(x, *bins, *base)?)))
            }
            FeatureStep::SampleEntropy { m, r } => Ok(single(entropy::sample_entropy(x, *m, *r)?)),
            FeatureStep::PermEntropy(p) => Ok(single(Some(entropy::perm_entropy(x, p)?))),
            FeatureStep::Swt {
                wavelet,
                levels,
                features,
            } => wavelet::swt_features(x, signal.fs, *wavelet, Some(*levels), features),
            FeatureStep::Spectral { spectrum, feature } => {
                let s = cache.get(spectrum, signal)?;
                Ok(match feature {
                    SpectralFeature::Mnf => single(freq::mnf(s)),
                    SpectralFeature::Mdf => single(freq::mdf(s)),
                    SpectralFeature::Stdf => single(freq::stdf(s)),
                    SpectralFeature::Vcf => single(freq::vcf(s)),
                    SpectralFeature::Psr { int_limit_ratio } => {
                        single(freq::psr(s, *int_limit_ratio)?)
                    }
                    SpectralFeature::Peaks {
                        n_peaks,
                        height,
                        width,
                    } => freq::peak_features(s, *n_peaks, *height, *width)?,
                    SpectralFeature::Band { kind, band } => {
                        let b = freq::band_features(s, band)?;
                        single(match kind {
                            BandKind::Power => b.power,
                            BandKind::Std => b.std,
                            BandKind::Mnf => b.mnf,
                            BandKind::Mdf => b.mdf,
                        })
                    }
                    SpectralFeature::Entropy { normalize, base } => {
                        single(entropy::spectral_entropy(s, *normalize, *base))
                    }
                })
            }
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_m() -> usize {
    2
}

fn default_order() -> usize {
    3
}

fn default_delay() -> usize {
    1
}

fn default_ratio() -> f64 {
    0.01
}

fn default_n_peaks() -> usize {
    1
}

fn default_overlap() -> f64 {
    0.5
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoArgs {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZcrArgs {
    #[serde(default)]
    center: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntropyArgs {
    #[serde(default)]
    bins: Option<usize>,
    #[serde(default)]
    base: LogBase,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleEntropyArgs {
    #[serde(default = "default_m")]
    m: usize,
    #[serde(default)]
    r: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PermEntropyArgs {
    #[serde(default = "default_order")]
    order: usize,
    #[serde(default = "default_delay")]
    delay: usize,
    #[serde(default)]
    normalize: bool,
    #[serde(default)]
    base: LogBase,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SwtArgs {
    #[serde(default)]
    wavelet: Wavelet,
    #[serde(default)]
    levels: Option<usize>,
    #[serde(default)]
    features: Option<Vec<SwtFeature>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PsrArgs {
    #[serde(default = "default_ratio")]
    int_limit_ratio: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PeaksArgs {
    #[serde(default = "default_n_peaks")]
    n_peaks: usize,
    #[serde(default = "default_true")]
    height: bool,
    #[serde(default = "default_true")]
    width: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BandArgs {
    low: f64,
    high: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralEntropyArgs {
    #[serde(default)]
    normalize: bool,
    #[serde(default)]
    base: LogBase,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum SpectrumName {
    Ps,
    Welch,
}

fn args<T: DeserializeOwned>(
    map: Map<String, Value>,
    name: &str,
) -> std::result::Result<T, String> {
    serde_json::from_value(Value::Object(map)).map_err(|e| format!("feature `{name}`: {e}"))
}

/// Removes the spectrum selector fields (`spectrum`, `nperseg`, `overlap`,
/// `window`) from a step object.
fn take_selector(
    map: &mut Map<String, Value>,
    name: &str,
) -> std::result::Result<SpectrumSelector, String> {
    let field = |map: &mut Map<String, Value>, key: &str| map.remove(key).filter(|v| !v.is_null());
    let kind = field(map, "spectrum");
    let nperseg = field(map, "nperseg");
    let overlap = field(map, "overlap");
    let window = field(map, "window");
    fn parse<T: DeserializeOwned>(
        v: Value,
        name: &str,
        what: &str,
    ) -> std::result::Result<T, String> {
        serde_json::from_value(v).map_err(|e| format!("feature `{name}`: field `{what}`: {e}"))
    }
    let kind: SpectrumName = match kind {
        Some(v) => parse(v, name, "spectrum")?,
        None => SpectrumName::Ps,
    };
    match kind {
        SpectrumName::Ps => {
            if let Some(key) = [
                ("nperseg", &nperseg),
                ("overlap", &overlap),
                ("window", &window),
            ]
            .iter()
            .find_map(|(k, v)| v.as_ref().map(|_| k))
            {
                return Err(format!(
                    "feature `{name}`: `{key}` only applies to spectrum \"welch\""
                ));
            }
            Ok(SpectrumSelector::Periodogram)
        }
        SpectrumName::Welch => Ok(SpectrumSelector::Welch(WelchParams {
            nperseg: nperseg.map(|v| parse(v, name, "nperseg")).transpose()?,
            overlap_ratio: overlap
                .map(|v| parse(v, name, "overlap"))
                .transpose()?
                .unwrap_or_else(default_overlap),
            window: window
                .map(|v| parse(v, name, "window"))
                .transpose()?
                .unwrap_or_default(),
        })),
    }
}

impl FeatureStep {
    /// Builds a step from its JSON object form, e.g.
    /// `{"name": "psr", "spectrum": "welch", "int_limit_ratio": 0.01}`.
    pub fn from_json(value: Value) -> std::result::Result<FeatureStep, String> {
        let Value::Object(mut map) = value else {
            return Err("feature step must be an object with a `name` field".into());
        };
        let name = match map.remove("name") {
            Some(Value::String(s)) => s,
            Some(_) => return Err("feature `name` must be a string".into()),
            None => return Err("feature step is missing `name`".into()),
        };
        let Some(&name) = FEATURE_NAMES.iter().find(|n| **n == name) else {
            return Err(unknown_feature_message(&name));
        };

        let spectral = |feature: SpectralFeature,
                        map: &mut Map<String, Value>|
         -> std::result::Result<_, String> {
            Ok(FeatureStep::Spectral {
                spectrum: take_selector(map, name)?,
                feature,
            })
        };
        let band =
            |kind: BandKind, mut map: Map<String, Value>| -> std::result::Result<_, String> {
                let spectrum = take_selector(&mut map, name)?;
                let b: BandArgs = args(map, name)?;
                Ok(FeatureStep::Spectral {
                    spectrum,
                    feature: SpectralFeature::Band {
                        kind,
                        band: BandSpec::new(b.low, b.high),
                    },
                })
            };

        Ok(match name {
            "basic_stats" => {
                args::<NoArgs>(map, name)?;
                FeatureStep::BasicStats
            }
            "zcr" => {
                let a: ZcrArgs = args(map, name)?;
                FeatureStep::Zcr { center: a.center }
            }
            "entropy" => {
                let a: EntropyArgs = args(map, name)?;
                FeatureStep::Entropy {
                    bins: a.bins,
                    base: a.base,
                }
            }
            "sample_entropy" => {
                let a: SampleEntropyArgs = args(map, name)?;
                FeatureStep::SampleEntropy { m: a.m, r: a.r }
            }
            "perm_entropy" => {
                let a: PermEntropyArgs = args(map, name)?;
                FeatureStep::PermEntropy(PermEntropyParams {
                    order: a.order,
                    delay: a.delay,
                    normalize: a.normalize,
                    base: a.base,
                })
            }
            "swt_features" => {
                let a: SwtArgs = args(map, name)?;
                FeatureStep::Swt {
                    wavelet: a.wavelet,
                    levels: a.levels.unwrap_or(DEFAULT_SWT_LEVELS),
                    features: a.features.unwrap_or_else(|| SwtFeature::ALL.to_vec()),
                }
            }
            "mnf" | "mdf" | "stdf" | "vcf" => {
                let feature = match name {
                    "mnf" => SpectralFeature::Mnf,
                    "mdf" => SpectralFeature::Mdf,
                    "stdf" => SpectralFeature::Stdf,
                    _ => SpectralFeature::Vcf,
                };
                let step = spectral(feature, &mut map)?;
                args::<NoArgs>(map, name)?;
                step
            }
            "psr" => {
                let spectrum = take_selector(&mut map, name)?;
                let a: PsrArgs = args(map, name)?;
                FeatureStep::Spectral {
                    spectrum,
                    feature: SpectralFeature::Psr {
                        int_limit_ratio: a.int_limit_ratio,
                    },
                }
            }
            "peaks" => {
                let spectrum = take_selector(&mut map, name)?;
                let a: PeaksArgs = args(map, name)?;
                FeatureStep::Spectral {
                    spectrum,
                    feature: SpectralFeature::Peaks {
                        n_peaks: a.n_peaks,
                        height: a.height,
                        width: a.width,
                    },
                }
            }
            "spectral_entropy" => {
                let spectrum = take_selector(&mut map, name)?;
                let a: SpectralEntropyArgs = args(map, name)?;
                FeatureStep::Spectral {
                    spectrum,
                    feature: SpectralFeature::Entropy {
                        normalize: a.normalize,
                        base: a.base,
                    },
                }
            }
            "band_power" => band(BandKind::Power, map)?,
            "band_std" => band(BandKind::Std, map)?,
            "band_mnf" => band(BandKind::Mnf, map)?,
            "band_mdf" => band(BandKind::Mdf, map)?,
            stat => {
                args::<NoArgs>(map, name)?;
                FeatureStep::Stat(stat)
            }
        })
    }
}

impl<'de> Deserialize<'de> for FeatureStep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = Value::deserialize(d)?;
        FeatureStep::from_json(value).map_err(serde::de::Error::custom)
    }
}
