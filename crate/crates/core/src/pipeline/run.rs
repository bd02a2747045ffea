use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{extract_features, FeatureObject, Importer};
use crate::error::{Error, Result};
use crate::ingest::window::{rolling_windows, WindowSpec};
use crate::preprocess::FilterChain;
use crate::signal::FeatureValue;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

/// One output row; `values` is aligned with [`FeatureTable::columns`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub id: String,
    pub values: Vec<FeatureValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn get(&self, row: usize, column: &str) -> Option<FeatureValue> {
        let c = self.columns.iter().position(|k| k == column)?;
        self.rows.get(row).map(|r| r.values[c])
    }

    /// Header `id,<columns>`; undefined values are empty cells.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let to_err = |e: ::csv::Error| Error::Csv {
            path: "<output>".into(),
            message: e.to_string(),
        };
        let mut w = ::csv::Writer::from_writer(writer);
        w.write_record(std::iter::once("id").chain(self.columns.iter().map(String::as_str)))
            .map_err(to_err)?;
        for row in &self.rows {
            let cells = row
                .values
                .iter()
                .map(|v| v.map(|v| format!("{v:?}")).unwrap_or_default());
            w.write_record(std::iter::once(row.id.clone()).chain(cells))
                .map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))
    }

    /// One JSON object per row; undefined values are `null`.
    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> Result<()> {
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            obj.insert("id".into(), row.id.clone().into());
            for (k, v) in self.columns.iter().zip(&row.values) {
                obj.insert(k.clone(), v.map_or(serde_json::Value::Null, Into::into));
            }
            serde_json::to_writer(&mut writer, &obj)
                .map_err(|e| Error::io("<output>", e.into()))?;
            writer
                .write_all(b"\n")
                .map_err(|e| Error::io("<output>", e))?;
        }
        writer.flush().map_err(|e| Error::io("<output>", e))
    }

    pub fn write<W: Write>(&self, format: OutputFormat, writer: W) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(writer),
            OutputFormat::Jsonl => self.write_jsonl(writer),
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordError {
    /// Importer index of the source.
    pub source: usize,
    /// Row id (record or window) the error belongs to.
    pub id: String,
    pub message: String,
    /// Whether the whole row is undefined, rather than some features.
    pub row_failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceTiming {
    pub id: String,
    pub rows: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub sources: usize,
    pub rows: usize,
    pub failed_rows: usize,
    pub n_jobs: usize,
    pub wall_seconds: f64,
    pub errors: Vec<RecordError>,
    pub timings: Vec<SourceTiming>,
}

impl RunReport {
    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self).map_err(|e| Error::io("<report>", e.into()))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: FeatureTable,
    pub report: RunReport,
}

struct SourceResult {
    rows: Vec<FeatureRow>,
    errors: Vec<RecordError>,
    timing: SourceTiming,
}

/// Importer, filter chain and features bound together.
pub struct Pipeline {
    importer: Arc<dyn Importer>,
    filters: FilterChain,
    features: FeatureObject,
    window: Option<WindowSpec>,
}

impl Pipeline {
    pub fn new(
        importer: impl Importer + 'static,
        filters: FilterChain,
        features: FeatureObject,
    ) -> Self {
        Pipeline {
            importer: Arc::new(importer),
            filters,
            features,
            window: None,
        }
    }

    pub fn from_boxed(
        importer: Box<dyn Importer>,
        filters: FilterChain,
        features: FeatureObject,
    ) -> Self {
        Pipeline {
            importer: Arc::from(importer),
            filters,
            features,
            window: None,
        }
    }

    pub fn with_window(mut self, window: WindowSpec) -> Self {
        self.window = Some(window);
        self
    }

    pub fn importer(&self) -> &dyn Importer {
        self.importer.as_ref()
    }

    /// Output columns (without `id`), derived from configuration only.
    pub fn columns(&self) -> Result<Vec<String>> {
        Ok(self.features.columns(&self.importer.channels()?))
    }

    /// Processes every source. Rows keep the importer's order whatever
    /// `n_jobs` is; a source that fails still yields a row of undefined
    /// values. `progress(done, total)` is called after each source.
    pub fn run(
        &self,
        n_jobs: usize,
        progress: Option<&(dyn Fn(usize, usize) + Sync)>,
    ) -> Result<RunOutput> {
        if n_jobs == 0 {
            return Err(Error::invalid("n_jobs", "must be at least 1"));
        }
        let total = self.importer.len();
        if total == 0 {
            return Err(Error::Record("importer yields no records".into()));
        }
        let columns = self.columns()?;
        let started = Instant::now();
        let done = AtomicUsize::new(0);
        let process = |i: usize| {
            let result = self.process_source(i, &columns);
            let n = done.fetch_add(1, Ordering::SeqCst) + 1;
            if let Some(p) = progress {
                p(n, total);
            }
            result
        };

        let results: Vec<SourceResult> = if n_jobs == 1 {
            (0..total).map(process).collect()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n_jobs)
                .build()
                .map_err(|e| Error::invalid("n_jobs", e.to_string()))?;
            pool.install(|| (0..total).into_par_iter().map(process).collect())
        };

        let mut rows = Vec::new();
        let mut errors = Vec::new();
        let mut timings = Vec::with_capacity(total);
        for r in results {
            rows.extend(r.rows);
            errors.extend(r.errors);
            timings.push(r.timing);
        }
        let failed_rows = {
            let mut ids: Vec<&str> = errors
                .iter()
                .filter(|e| e.row_failed)
                .map(|e| e.id.as_str())
                .collect();
            ids.dedup();
            ids.len()
        };
        let report = RunReport {
            sources: total,
            rows: rows.len(),
            failed_rows,
            n_jobs,
            wall_seconds: started.elapsed().as_secs_f64(),
            errors,
            timings,
        };
        Ok(RunOutput {
            table: FeatureTable { columns, rows },
            report,
        })
    }

    fn process_source(&self, index: usize, columns: &[String]) -> SourceResult {
        let started = Instant::now();
        let source_id = self.importer.source_id(index);
        let mut errors = Vec::new();
        let failed = |id: String, message: String, errors: &mut Vec<RecordError>| {
            errors.push(RecordError {
                source: index,
                id: id.clone(),
                message,
                row_failed: true,
            });
            FeatureRow {
                id,
                values: vec![None; columns.len()],
            }
        };

        let records = self
            .importer
            .load(index)
            .and_then(|record| match &self.window {
                Some(w) => rolling_windows(&record, w),
                None => Ok(vec![record]),
            });
        let rows = match records {
            Err(e) => vec![failed(source_id.clone(), e.to_string(), &mut errors)],
            Ok(records) => records
                .iter()
                .map(
                    |record| match extract_features(record, &self.features, &self.filters) {
                        Err(e) => failed(record.id.clone(), e.to_string(), &mut errors),
                        Ok(outcome) => {
                            errors.extend(outcome.errors.into_iter().map(|message| RecordError {
                                source: index,
                                id: record.id.clone(),
                                message,
                                row_failed: false,
                            }));
                            FeatureRow {
                                id: record.id.clone(),
                                values: columns
                                    .iter()
                                    .map(|c| outcome.values.get(c).flatten())
                                    .collect(),
                            }
                        }
                    },
                )
                .collect(),
        };
        SourceResult {
            timing: SourceTiming {
                id: source_id,
                rows: rows.len(),
                seconds: started.elapsed().as_secs_f64(),
            },
            rows,
            errors,
        }
    }
}
