//! Feature sets, per-record extraction and the batch runner.

mod importer;
mod run;
mod step;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use indexmap::IndexMap;

pub use importer::{
    CsvGlobImporter, Importer, MemoryImporter, WfdbImporter, WfdbManifest, WfdbSource,
};
pub use run::{
    FeatureRow, FeatureTable, OutputFormat, Pipeline, RecordError, RunOutput, RunReport,
};
pub use step::{
    nearest_name, unknown_feature_message, BandKind, FeatureStep, SpectralFeature, SpectrumCache,
    SpectrumSelector, DEFAULT_SWT_LEVELS, FEATURE_NAMES,
};

use crate::error::{Error, Result};
use crate::preprocess::FilterChain;
use crate::signal::{FeatureMap, Record, Signal};

/// User feature function. Errors and panics turn its keys into undefined
/// values for that signal.
pub type UdfFn = dyn Fn(&Signal) -> std::result::Result<FeatureMap, String> + Send + Sync;

#[derive(Clone)]
pub struct Udf {
    pub name: String,
    pub keys: Vec<String>,
    pub func: Arc<UdfFn>,
}

impl std::fmt::Debug for Udf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Udf")
            .field("name", &self.name)
            .field("keys", &self.keys)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum FeatureEntry {
    Builtin(FeatureStep),
    Udf(Udf),
}

impl FeatureEntry {
    pub fn keys(&self) -> Vec<String> {
        match self {
            FeatureEntry::Builtin(step) => step.keys(),
            FeatureEntry::Udf(udf) => udf.keys.clone(),
        }
    }

    fn label(&self) -> &str {
        match self {
            FeatureEntry::Builtin(step) => step.name(),
            FeatureEntry::Udf(udf) => &udf.name,
        }
    }
}

/// Ordered feature steps with unique output keys.
#[derive(Debug, Clone, Default)]
pub struct FeatureSet {
    entries: Vec<FeatureEntry>,
    keys: Vec<String>,
}

impl FeatureSet {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, entry: FeatureEntry) -> Result<()> {
        let new_keys = entry.keys();
        for (i, key) in new_keys.iter().enumerate() {
            if self.keys.contains(key) || new_keys[..i].contains(key) {
                return Err(Error::invalid(
                    "features",
                    format!("duplicate feature key `{key}` from `{}`", entry.label()),
                ));
            }
        }
        self.keys.extend(new_keys);
        self.entries.push(entry);
        Ok(())
    }

    pub fn add(&mut self, step: FeatureStep) -> Result<()> {
        self.push(FeatureEntry::Builtin(step))
    }

    pub fn with(mut self, step: FeatureStep) -> Result<Self> {
        self.add(step)?;
        Ok(self)
    }

    /// Appends a user function whose output keys are declared up front.
    pub fn register_udf<F>(&mut self, name: impl Into<String>, keys: &[&str], func: F) -> Result<()>
    where
        F: Fn(&Signal) -> std::result::Result<FeatureMap, String> + Send + Sync + 'static,
    {
        self.push(FeatureEntry::Udf(Udf {
            name: name.into(),
            keys: keys.iter().map(|k| k.to_string()).collect(),
            func: Arc::new(func),
        }))
    }

    pub fn entries(&self) -> &[FeatureEntry] {
        &self.entries
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn validate(&self, fs: Option<f64>) -> Result<()> {
        for entry in &self.entries {
            if let FeatureEntry::Builtin(step) = entry {
                step.validate(fs)
                    .map_err(|e| Error::invalid(step.name(), e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Evaluates every step on `signal`; failures become undefined values
    /// and are described in `errors`.
    pub fn compute(&self, signal: &Signal, errors: &mut Vec<String>) -> FeatureMap {
        let mut cache = SpectrumCache::new();
        let mut out = FeatureMap::new();
        for entry in &self.entries {
            let keys = entry.keys();
            let result = match entry {
                FeatureEntry::Builtin(step) => {
                    step.compute(signal, &mut cache).map_err(|e| e.to_string())
                }
                FeatureEntry::Udf(udf) => run_udf(udf, signal),
            };
            match result {
                Ok(values) => {
                    for key in &keys {
                        let v = values.get(key).flatten().filter(|v| v.is_finite());
                        out.insert(key.clone(), v);
                    }
                    if let Some(extra) = values.keys().find(|k| !keys.iter().any(|d| d == k)) {
                        errors.push(format!(
                            "{}: `{}` returned undeclared key `{extra}`",
                            signal.name,
                            entry.label()
                        ));
                    }
                }
                Err(msg) => {
                    errors.push(format!("{}: {}: {msg}", signal.name, entry.label()));
                    for key in keys {
                        out.insert(key, None);
                    }
                }
            }
        }
        out
    }
}

fn run_udf(udf: &Udf, signal: &Signal) -> std::result::Result<FeatureMap, String> {
    match catch_unwind(AssertUnwindSafe(|| (udf.func)(signal))) {
        Ok(result) => result,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            Err(format!("panicked: {msg}"))
        }
    }
}

impl FromIterator<FeatureStep> for Result<FeatureSet> {
    fn from_iter<I: IntoIterator<Item = FeatureStep>>(iter: I) -> Self {
        let mut set = FeatureSet::new();
        for step in iter {
            set.add(step)?;
        }
        Ok(set)
    }
}

/// Which feature set applies to which channel: channels listed in
/// `per_channel` use their own set, the others use `shared`.
#[derive(Debug, Clone, Default)]
pub struct FeatureObject {
    pub shared: FeatureSet,
    pub per_channel: IndexMap<String, FeatureSet>,
}

impl FeatureObject {
    pub fn shared(set: FeatureSet) -> Self {
        FeatureObject {
            shared: set,
            per_channel: IndexMap::new(),
        }
    }

    pub fn set_for(&self, channel: &str) -> &FeatureSet {
        self.per_channel.get(channel).unwrap_or(&self.shared)
    }

    /// Output columns for records with the given channels, in order.
    pub fn columns<S: AsRef<str>>(&self, channels: &[S]) -> Vec<String> {
        channels
            .iter()
            .flat_map(|c| {
                let c = c.as_ref();
                self.set_for(c)
                    .keys()
                    .iter()
                    .map(move |k| format!("{c}_{k}"))
            })
            .collect()
    }

    pub fn validate(&self, fs: Option<f64>) -> Result<()> {
        self.shared.validate(fs)?;
        for (channel, set) in &self.per_channel {
            set.validate(fs)
                .map_err(|e| Error::invalid("per_channel", format!("channel `{channel}`: {e}")))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractOutcome {
    pub values: FeatureMap,
    pub errors: Vec<String>,
}

/// Filters every channel of `record` and evaluates its feature set. Keys
/// are `{channel}_{feature_key}`.
pub fn extract_features(
    record: &Record,
    features: &FeatureObject,
    chain: &FilterChain,
) -> Result<ExtractOutcome> {
    if let Some(missing) = features
        .per_channel
        .keys()
        .find(|c| record.channel(c).is_none())
    {
        return Err(Error::Record(format!(
            "record {}: feature override names channel `{missing}`, which the record does not have",
            record.id
        )));
    }
    let mut values = FeatureMap::new();
    let mut errors = Vec::new();
    for signal in record.channels() {
        let set = features.set_for(&signal.name);
        let map = match chain.apply(signal) {
            Ok(filtered) => set.compute(&filtered, &mut errors),
            Err(e) => {
                errors.push(format!("{}: filter chain: {e}", signal.name));
                set.keys().iter().map(|k| (k.clone(), None)).collect()
            }
        };
        for (key, value) in map {
            values.insert(format!("{}_{key}", signal.name), value);
        }
    }
    Ok(ExtractOutcome { values, errors })
}
