//! JSON pipeline configuration: parsing, path resolution and the semantic
//! checks shared by `validate` and `run`.
//!
//! ```json
//! {
//!   "importer": {"kind": "csv-glob", "paths": ["data/*.csv"], "fs": 125},
//!   "filters": [{"name": "butter_filter", "cutoff": 40, "btype": "lowpass"}],
//!   "features": {"shared": [{"name": "mnf"}, {"name": "std"}]},
//!   "run": {"output": "features.csv"}
//! }
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use indexmap::IndexMap;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ingest::fetch::{FetchConfig, WfdbFetcher};
use crate::ingest::window::WindowSpec;
use crate::pipeline::{
    CsvGlobImporter, FeatureObject, FeatureSet, FeatureStep, Importer, OutputFormat, Pipeline,
    WfdbImporter, WfdbManifest,
};
use crate::preprocess::{FilterChain, FilterStep};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub importer: ImporterConfig,
    #[serde(default)]
    pub filters: Vec<FilterStep>,
    #[serde(default)]
    pub features: FeaturesConfig,
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ImporterConfig {
    CsvGlob {
        paths: Vec<String>,
        fs: f64,
        #[serde(default)]
        channels: Option<Vec<String>>,
        #[serde(default)]
        window: Option<WindowSpec>,
    },
    WfdbManifest {
        manifest: PathBuf,
        channels: Vec<String>,
        #[serde(default)]
        base_url: Option<String>,
        /// Expected sampling rate; lets bands and cutoffs be checked before
        /// any record is fetched.
        #[serde(default)]
        fs: Option<f64>,
        #[serde(default)]
        window: Option<WindowSpec>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeaturesConfig {
    #[serde(default)]
    pub shared: Vec<FeatureStep>,
    #[serde(default)]
    pub per_channel: IndexMap<String, Vec<FeatureStep>>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "one")]
    pub n_jobs: usize,
    pub output: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads and parses a config file. Returns it with the directory that
    /// relative paths resolve against.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let config = Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }
}

/// A config that passed every check, ready to run.
pub struct CompiledConfig {
    pub pipeline: Pipeline,
    pub n_jobs: usize,
    pub output: PathBuf,
    pub format: OutputFormat,
    pub report: Option<PathBuf>,
    pub warnings: Vec<String>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn check_parent(label: &str, path: &Path, errors: &mut Vec<String>) {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(parent) = parent {
        if !parent.is_dir() {
            errors.push(format!(
                "run.{label}: directory {} does not exist",
                parent.display()
            ));
        }
    }
}

fn build_set(
    label: &str,
    steps: &[FeatureStep],
    fs: Option<f64>,
    errors: &mut Vec<String>,
) -> FeatureSet {
    let mut set = FeatureSet::new();
    for (i, step) in steps.iter().enumerate() {
        if let Err(e) = step.validate(fs) {
            errors.push(format!("{label}[{i}] ({}): {e}", step.name()));
        }
        if let Err(e) = set.add(step.clone()) {
            errors.push(format!("{label}[{i}]: {e}"));
        }
    }
    set
}

/// Longest-record check for CSV inputs: data rows per file.
fn csv_row_count(path: &Path) -> Option<usize> {
    let file = std::fs::File::open(path).ok()?;
    let mut reader = ::csv::ReaderBuilder::new().flexible(true).from_reader(file);
    Some(reader.records().count())
}

impl PipelineConfig {
    /// Runs every semantic check and builds the pipeline. All problems are
    /// reported together in one [`Error::Config`].
    pub fn compile(&self, base: &Path) -> Result<CompiledConfig> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();

        let (fs, window, channels_hint) = match &self.importer {
            ImporterConfig::CsvGlob {
                fs,
                window,
                channels,
                ..
            } => (Some(*fs), *window, channels.clone()),
            ImporterConfig::WfdbManifest {
                fs,
                window,
                channels,
                ..
            } => (*fs, *window, Some(channels.clone())),
        };
        if let Some(fs) = fs {
            if !(fs > 0.0 && fs.is_finite()) {
                errors.push(format!("importer.fs: must be positive, got {fs}"));
            }
        }
        if let Some(w) = &window {
            if let Err(e) = w.validate() {
                errors.push(format!("importer.window: {e}"));
            }
        }

        let filters: FilterChain = self.filters.iter().cloned().collect();
        if let Err(e) = filters.validate(fs) {
            errors.push(e.to_string());
        }

        let shared = build_set("features.shared", &self.features.shared, fs, &mut errors);
        let mut per_channel = IndexMap::new();
        for (channel, steps) in &self.features.per_channel {
            let set = build_set(
                &format!("features.per_channel.{channel}"),
                steps,
                fs,
                &mut errors,
            );
            per_channel.insert(channel.clone(), set);
        }
        let features = FeatureObject {
            shared,
            per_channel,
        };

        let run = &self.run;
        if run.n_jobs == 0 {
            errors.push("run.n_jobs: must be at least 1".into());
        }
        let output = resolve(base, &run.output);
        check_parent("output", &output, &mut errors);
        if output.is_dir() {
            errors.push(format!("run.output: {} is a directory", output.display()));
        }
        let report = run.report.as_ref().map(|r| resolve(base, r));
        if let Some(r) = &report {
            check_parent("report", r, &mut errors);
        }

        let importer: Option<Box<dyn Importer>> = match &self.importer {
            ImporterConfig::CsvGlob {
                paths,
                fs,
                channels,
                ..
            } => {
                if paths.is_empty() {
                    errors.push("importer.paths: no patterns given".into());
                }
                let patterns: Vec<String> = paths
                    .iter()
                    .map(|p| resolve(base, Path::new(p)).to_string_lossy().into_owned())
                    .collect();
                match CsvGlobImporter::new(&patterns, *fs, channels.clone()) {
                    Ok(imp) => {
                        if let Some(w) = &window {
                            for file in imp.files() {
                                if let Some(n) = csv_row_count(file) {
                                    if w.length > n {
                                        warnings.push(format!(
                                            "window length {} exceeds the {n} samples of {}; it will yield a failed row",
                                            w.length,
                                            file.display()
                                        ));
                                    }
                                }
                            }
                        }
                        Some(Box::new(imp))
                    }
                    Err(e) if !paths.is_empty() => {
                        errors.push(format!("importer: {e}"));
                        None
                    }
                    Err(_) => None,
                }
            }
            ImporterConfig::WfdbManifest {
                manifest,
                channels,
                base_url,
                ..
            } => {
                let manifest_path = resolve(base, manifest);
                let mut fetch = FetchConfig::from_env();
                if let Some(url) = base_url {
                    fetch.base_url = url.clone();
                }
                if let Some(dir) = &run.cache_dir {
                    fetch.cache_dir = resolve(base, dir);
                }
                if channels.is_empty() {
                    errors.push("importer.channels: list at least one channel".into());
                }
                match WfdbManifest::from_path(&manifest_path) {
                    Ok(m) => WfdbImporter::new(
                        m.sources(),
                        channels.clone(),
                        Arc::new(WfdbFetcher::new(fetch)),
                    )
                    .map(|imp| Box::new(imp) as Box<dyn Importer>)
                    .map_err(|e| errors.push(format!("importer: {e}")))
                    .ok(),
                    Err(e) => {
                        errors.push(format!("importer.manifest: {e}"));
                        None
                    }
                }
            }
        };

        let channels = match (&importer, channels_hint) {
            (_, Some(c)) => Some(c),
            (Some(imp), None) => imp.channels().ok(),
            (None, None) => None,
        };
        if let Some(channels) = &channels {
            for c in features.per_channel.keys() {
                if !channels.contains(c) {
                    errors.push(format!(
                        "features.per_channel: channel `{c}` is not imported (channels: {})",
                        channels.join(", ")
                    ));
                }
            }
        }

        if !errors.is_empty() {
            return Err(Error::Config(errors.join("\n")));
        }
        let importer = importer.expect("importer built when no errors were recorded");
        let mut pipeline = Pipeline::from_boxed(importer, filters, features);
        if let Some(w) = window {
            pipeline = pipeline.with_window(w);
        }
        Ok(CompiledConfig {
            pipeline,
            n_jobs: run.n_jobs,
            output,
            format: run.format,
            report,
            warnings,
        })
    }
}
