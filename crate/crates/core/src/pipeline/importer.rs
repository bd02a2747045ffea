use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ingest::csv::{read_csv, read_csv_header};
use crate::ingest::fetch::WfdbFetcher;
use crate::signal::Record;

/// A list of record sources that can be loaded independently, in a fixed
/// order.
pub trait Importer: Send + Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Identifier for source `index`, used for its row when loading fails.
    fn source_id(&self, index: usize) -> String;

    /// Channel names every record is expected to carry, in output order.
    fn channels(&self) -> Result<Vec<String>>;

    fn load(&self, index: usize) -> Result<Record>;
}

/// CSV files matched by glob patterns. Record ids are the file stems.
#[derive(Debug, Clone)]
pub struct CsvGlobImporter {
    files: Vec<PathBuf>,
    fs: f64,
    channels: Vec<String>,
    explicit_channels: bool,
}

impl CsvGlobImporter {
    /// Expands every pattern; each must match at least one file. Matches are
    /// sorted within a pattern, patterns keep their order.
    pub fn new<S: AsRef<str>>(
        patterns: &[S],
        fs: f64,
        channels: Option<Vec<String>>,
    ) -> Result<Self> {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::invalid("fs", format!("must be positive, got {fs}")));
        }
        if patterns.is_empty() {
            return Err(Error::invalid("paths", "no patterns given"));
        }
        let mut files = Vec::new();
        for pattern in patterns {
            let pattern = pattern.as_ref();
            let paths = glob::glob(pattern)
                .map_err(|e| Error::invalid("paths", format!("bad glob `{pattern}`: {e}")))?;
            let mut matched: Vec<PathBuf> = paths
                .filter_map(|p| p.ok())
                .filter(|p| p.is_file())
                .collect();
            if matched.is_empty() {
                return Err(Error::invalid(
                    "paths",
                    format!("`{pattern}` matches no files"),
                ));
            }
            matched.sort();
            for m in matched {
                if !files.contains(&m) {
                    files.push(m);
                }
            }
        }
        let explicit_channels = channels.is_some();
        let channels = match channels {
            Some(c) => c,
            None => read_csv_header(&files[0])?,
        };
        Ok(CsvGlobImporter {
            files,
            fs,
            channels,
            explicit_channels,
        })
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

impl Importer for CsvGlobImporter {
    fn len(&self) -> usize {
        self.files.len()
    }

    fn source_id(&self, index: usize) -> String {
        file_stem(&self.files[index])
    }

    /// The configured channels, or else the header of the first file.
    fn channels(&self) -> Result<Vec<String>> {
        Ok(self.channels.clone())
    }

    fn load(&self, index: usize) -> Result<Record> {
        let path = &self.files[index];
        let record = read_csv(path, self.fs, file_stem(path))?;
        let channels = &self.channels;
        if !self.explicit_channels {
            let names: Vec<&str> = record.channel_names().collect();
            if names != *channels {
                return Err(Error::Record(format!(
                    "{}: columns [{}] differ from the first file's [{}]",
                    path.display(),
                    names.join(", "),
                    channels.join(", ")
                )));
            }
            return Ok(record);
        }
        record.select(channels)
    }
}

/// Record list in the shape of PhysioNet metadata tables: parallel arrays
/// of record names and their directories.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WfdbManifest {
    pub record_name: Vec<String>,
    pub public_dir: Vec<String>,
}

impl WfdbManifest {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: WfdbManifest = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("manifest {}: {e}", path.display())))?;
        manifest.check()?;
        Ok(manifest)
    }

    pub fn check(&self) -> Result<()> {
        if self.record_name.len() != self.public_dir.len() {
            return Err(Error::Config(format!(
                "manifest lists {} record names but {} directories",
                self.record_name.len(),
                self.public_dir.len()
            )));
        }
        if self.record_name.is_empty() {
            return Err(Error::Config("manifest lists no records".into()));
        }
        Ok(())
    }

    pub fn sources(&self) -> Vec<WfdbSource> {
        self.record_name
            .iter()
            .zip(&self.public_dir)
            .map(|(name, dir)| WfdbSource {
                record_name: name.clone(),
                public_dir: dir.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WfdbSource {
    pub record_name: String,
    pub public_dir: String,
}

/// WFDB records fetched over HTTP (through the download cache).
pub struct WfdbImporter {
    sources: Vec<WfdbSource>,
    channels: Vec<String>,
    fetcher: Arc<WfdbFetcher>,
}

impl WfdbImporter {
    pub fn new(
        sources: Vec<WfdbSource>,
        channels: Vec<String>,
        fetcher: Arc<WfdbFetcher>,
    ) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::invalid(
                "channels",
                "a WFDB importer needs an explicit channel list",
            ));
        }
        Ok(WfdbImporter {
            sources,
            channels,
            fetcher,
        })
    }

    pub fn fetcher(&self) -> &WfdbFetcher {
        &self.fetcher
    }
}

impl Importer for WfdbImporter {
    fn len(&self) -> usize {
        self.sources.len()
    }

    fn source_id(&self, index: usize) -> String {
        self.sources[index].record_name.clone()
    }

    fn channels(&self) -> Result<Vec<String>> {
        Ok(self.channels.clone())
    }

    fn load(&self, index: usize) -> Result<Record> {
        let s = &self.sources[index];
        self.fetcher
            .fetch_record(&s.public_dir, &s.record_name, Some(&self.channels))
    }
}

/// Records held in memory; a source may also be a preset failure.
pub struct MemoryImporter {
    records: Vec<std::result::Result<Record, (String, String)>>,
    channels: Vec<String>,
}

impl MemoryImporter {
    pub fn new(records: Vec<Record>) -> Self {
        let channels = records
            .first()
            .map(|r| r.channel_names().map(String::from).collect())
            .unwrap_or_default();
        MemoryImporter {
            records: records.into_iter().map(Ok).collect(),
            channels,
        }
    }

    /// Replaces source `index` with one that fails to load.
    pub fn fail_at(&mut self, index: usize, message: impl Into<String>) {
        let id = self.source_id(index);
        self.records[index] = Err((id, message.into()));
    }
}

impl Importer for MemoryImporter {
    fn len(&self) -> usize {
        self.records.len()
    }

    fn source_id(&self, index: usize) -> String {
        match &self.records[index] {
            Ok(r) => r.id.clone(),
            Err((id, _)) => id.clone(),
        }
    }

    fn channels(&self) -> Result<Vec<String>> {
        Ok(self.channels.clone())
    }

    fn load(&self, index: usize) -> Result<Record> {
        match &self.records[index] {
            Ok(r) => r.select(&self.channels),
            Err((_, msg)) => Err(Error::Record(msg.clone())),
        }
    }
}
