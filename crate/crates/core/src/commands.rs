//! The `validate`, `run` and `inspect` subcommands. Each returns the
//! process exit code: 0 on success, 1 for configuration errors, 2 for data
//! or transport errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{CompiledConfig, PipelineConfig};
use crate::error::{Error, Result};
use crate::ingest::csv::read_csv;
use crate::ingest::fetch::{FetchConfig, WfdbFetcher};
use crate::ingest::wfdb::read_wfdb;
use crate::signal::Record;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DATA: i32 = 2;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_DATA,
    }
}

fn load_and_compile(
    path: &Path,
    n_jobs: Option<usize>,
    output: Option<&Path>,
) -> Result<CompiledConfig> {
    let (mut config, base) = PipelineConfig::load(path)?;
    if let Some(n) = n_jobs {
        config.run.n_jobs = n;
    }
    if let Some(o) = output {
        // Command-line paths are relative to the working directory.
        config.run.output = std::path::absolute(o).unwrap_or_else(|_| o.to_path_buf());
    }
    config.compile(&base)
}

fn report_error(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    exit_code(e)
}

pub fn cmd_validate(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match load_and_compile(path, None, None) {
        Ok(compiled) => {
            for w in &compiled.warnings {
                let _ = writeln!(out, "warning: {w}");
            }
            EXIT_OK
        }
        Err(e) => report_error(err, &e),
    }
}

pub fn cmd_run(
    path: &Path,
    n_jobs: Option<usize>,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut (dyn Write + Send),
) -> i32 {
    let compiled = match load_and_compile(path, n_jobs, output) {
        Ok(c) => c,
        Err(e) => return report_error(err, &e),
    };
    for w in &compiled.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let started = Instant::now();
    let total = compiled.pipeline.importer().len();
    let _ = writeln!(out, "Running the pipeline on {total} instances...");
    // Progress goes to `err` so it cannot interleave with the summary.
    let step = (total / 20).max(1);
    let progress_sink = std::sync::Mutex::new(&mut *err);
    let progress = |done: usize, total: usize| {
        if done.is_multiple_of(step) || done == total {
            if let Ok(mut w) = progress_sink.lock() {
                let _ = writeln!(w, "{done}/{total}");
            }
        }
    };
    let result = match compiled.pipeline.run(compiled.n_jobs, Some(&progress)) {
        Ok(r) => r,
        Err(e) => return report_error(err, &e),
    };

    if let Err(e) = write_file(&compiled.output, |f| result.table.write(compiled.format, f)) {
        return report_error(err, &e);
    }
    if let Some(report) = &compiled.report {
        if let Err(e) = write_file(report, |f| result.report.write_json(f)) {
            return report_error(err, &e);
        }
    }
    let failed = result.report.failed_rows;
    let _ = writeln!(
        out,
        "finished: {} rows ({} failed), {} feature errors, {:.2} s -> {}",
        result.report.rows,
        failed,
        result
            .report
            .errors
            .iter()
            .filter(|e| !e.row_failed)
            .count(),
        started.elapsed().as_secs_f64(),
        compiled.output.display()
    );
    for e in result.report.errors.iter().filter(|e| e.row_failed) {
        let _ = writeln!(err, "failed: {}: {}", e.id, e.message);
    }
    EXIT_OK
}

fn write_file(
    path: &Path,
    write: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> Result<()>,
) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Loads a record for `inspect`: a CSV file (needs `fs`, default 1 Hz), a
/// local `.hea` header, or an `http(s)://` header URL.
pub fn load_record(target: &str, fs: Option<f64>) -> Result<Record> {
    if target.starts_with("http://") || target.starts_with("https://") {
        let fetcher = WfdbFetcher::new(FetchConfig::from_env());
        let name = target.rsplit('/').next().unwrap_or(target);
        let id = name.strip_suffix(".hea").unwrap_or(name);
        return fetcher.fetch_header_url(target, id, None);
    }
    let path = PathBuf::from(target);
    match path.extension().and_then(|e| e.to_str()) {
        Some("hea") => read_wfdb(&path, None),
        _ => {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| target.to_string());
            read_csv(&path, fs.unwrap_or(1.0), id)
        }
    }
}

pub fn cmd_inspect(target: &str, fs: Option<f64>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let record = match load_record(target, fs) {
        Ok(r) => r,
        Err(e) => return report_error(err, &e),
    };
    let _ = writeln!(
        out,
        "record {}: {} channels, fs {} Hz, {} samples",
        record.id,
        record.n_channels(),
        record.fs,
        record.len()
    );
    for s in record.channels() {
        let present = s.samples.iter().copied().filter(|v| !v.is_nan());
        let (min, max) = present.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        let range = if min <= max {
            format!("min {min}, max {max}")
        } else {
            "no samples".to_string()
        };
        let _ = writeln!(out, "  {}: missing {}, {range}", s.name, s.missing_count());
    }
    EXIT_OK
}
