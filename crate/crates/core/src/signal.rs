//! Core data types shared by every stage: signals, records and feature maps.

use indexmap::IndexMap;

use crate::error::{Error, Result};

/// A feature value. `None` is the undefined marker (0/0 moments, empty
/// bands, failed preconditions). It is serialized as an empty CSV cell or a
/// JSON `null`.
pub type FeatureValue = Option<f64>;

/// A named, uniformly sampled 1-D series.
///
/// Missing samples are stored as `NaN`. Outlier masking produces them and
/// interpolation removes them; spectral and moment features refuse inputs
/// that still contain any.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub name: String,
    pub samples: Vec<f64>,
    /// Sampling rate in Hz.
    pub fs: f64,
}

impl Signal {
    pub fn new(name: impl Into<String>, samples: Vec<f64>, fs: f64) -> Self {
        Signal {
            name: name.into(),
            samples,
            fs,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        count_missing(&self.samples)
    }

    pub fn with_samples(&self, samples: Vec<f64>) -> Signal {
        Signal {
            name: self.name.clone(),
            samples,
            fs: self.fs,
        }
    }
}

pub(crate) fn count_missing(x: &[f64]) -> usize {
    x.iter().filter(|v| v.is_nan()).count()
}

/// Fails with [`Error::MissingValues`] if `x` contains any missing sample.
pub(crate) fn require_complete(op: &'static str, x: &[f64]) -> Result<()> {
    match count_missing(x) {
        0 => Ok(()),
        count => Err(Error::MissingValues { op, count }),
    }
}

pub(crate) fn require_len(op: &'static str, x: &[f64], needed: usize) -> Result<()> {
    if x.len() < needed {
        return Err(Error::TooShort {
            op,
            needed,
            got: x.len(),
        });
    }
    Ok(())
}

/// A set of equally long channels sharing one time base; the unit of
/// pipeline work.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub fs: f64,
    channels: IndexMap<String, Signal>,
}

impl Record {
    pub fn new(id: impl Into<String>, fs: f64) -> Self {
        Record {
            id: id.into(),
            fs,
            channels: IndexMap::new(),
        }
    }

    /// Appends a channel. All channels must have the same length and names
    /// must be unique.
    pub fn push_channel(&mut self, name: impl Into<String>, samples: Vec<f64>) -> Result<()> {
        let name = name.into();
        if self.channels.contains_key(&name) {
            return Err(Error::Record(format!(
                "record {}: duplicate channel `{name}`",
                self.id
            )));
        }
        if let Some(first) = self.channels.values().next() {
            if first.len() != samples.len() {
                return Err(Error::Record(format!(
                    "record {}: channel `{name}` has {} samples, expected {}",
                    self.id,
                    samples.len(),
                    first.len()
                )));
            }
        }
        let signal = Signal::new(name.clone(), samples, self.fs);
        self.channels.insert(name, signal);
        Ok(())
    }

    /// Number of samples per channel (0 for a record without channels).
    pub fn len(&self) -> usize {
        self.channels.values().next().map_or(0, Signal::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, name: &str) -> Option<&Signal> {
        self.channels.get(name)
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.keys().map(String::as_str)
    }

    pub fn channels(&self) -> impl Iterator<Item = &Signal> {
        self.channels.values()
    }

    /// Keeps only `names`, in the order given.
    pub fn select(&self, names: &[String]) -> Result<Record> {
        let mut out = Record::new(self.id.clone(), self.fs);
        for name in names {
            let signal = self.channel(name).ok_or_else(|| {
                Error::Record(format!("record {}: no channel named `{name}`", self.id))
            })?;
            out.push_channel(name.clone(), signal.samples.clone())?;
        }
        Ok(out)
    }

    /// Copies samples `start..start + len` of every channel into a new record.
    pub(crate) fn slice(&self, id: String, start: usize, len: usize) -> Record {
        let channels = self
            .channels
            .iter()
            .map(|(name, s)| {
                let samples = s.samples[start..start + len].to_vec();
                (name.clone(), Signal::new(name.clone(), samples, self.fs))
            })
            .collect();
        Record {
            id,
            fs: self.fs,
            channels,
        }
    }
}

/// Ordered feature-key to value mapping; the return type of every feature
/// function. Insertion order is the output column order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureMap {
    entries: IndexMap<String, FeatureValue>,
}

impl FeatureMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or overwrites `key`. An overwritten key keeps its position.
    pub fn insert(&mut self, key: impl Into<String>, value: FeatureValue) {
        self.entries.insert(key.into(), value);
    }

    pub fn get(&self, key: &str) -> Option<FeatureValue> {
        self.entries.get(key).copied()
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, FeatureValue)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl FromIterator<(String, FeatureValue)> for FeatureMap {
    fn from_iter<I: IntoIterator<Item = (String, FeatureValue)>>(iter: I) -> Self {
        FeatureMap {
            entries: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for FeatureMap {
    type Item = (String, FeatureValue);
    type IntoIter = indexmap::map::IntoIter<String, FeatureValue>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter()
    }
}

impl Extend<(String, FeatureValue)> for FeatureMap {
    fn extend<I: IntoIterator<Item = (String, FeatureValue)>>(&mut self, iter: I) {
        self.entries.extend(iter);
    }
}
