//! Column-per-channel CSV records: a header row of channel names followed by
//! one numeric row per instant. Empty cells are missing samples.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::Record;

pub fn read_csv(path: impl AsRef<Path>, fs: f64, id: impl Into<String>) -> Result<Record> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(file, &path.display().to_string(), fs, id)
}

/// Reads only the header row.
pub fn read_csv_header(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let label = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = ::csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| csv_error(&label, e.to_string()))?;
    if headers.is_empty() {
        return Err(csv_error(&label, "empty file"));
    }
    Ok(headers.iter().map(|h| h.trim().to_string()).collect())
}

fn csv_error(path: &str, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Reads a record from any reader; `label` names the source in errors.
pub fn read_csv_from(
    reader: impl Read,
    label: &str,
    fs: f64,
    id: impl Into<String>,
) -> Result<Record> {
    let mut reader = ::csv::ReaderBuilder::new()
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(reader);
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(label, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || (names.len() == 1 && names[0].is_empty()) {
        return Err(csv_error(label, "empty file"));
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (row_idx, row) in reader.records().enumerate() {
        // Row numbers are 1-based file lines; the header is line 1.
        let line = row_idx + 2;
        let row = row.map_err(|e| csv_error(label, format!("line {line}: {e}")))?;
        if row.len() != names.len() {
            return Err(csv_error(
                label,
                format!(
                    "line {line}: expected {} fields, found {}",
                    names.len(),
                    row.len()
                ),
            ));
        }
        for (col, (cell, column)) in row.iter().zip(columns.iter_mut()).enumerate() {
            let value = if cell.is_empty() {
                f64::NAN
            } else {
                cell.parse::<f64>().map_err(|_| {
                    csv_error(
                        label,
                        format!(
                            "line {line}, column {} (`{}`): not a number: `{cell}`",
                            col + 1,
                            names[col]
                        ),
                    )
                })?
            };
            column.push(value);
        }
    }

    let mut record = Record::new(id, fs);
    for (name, samples) in names.into_iter().zip(columns) {
        record.push_channel(name, samples)?;
    }
    Ok(record)
}

/// Writes `record` in the same layout [`read_csv`] accepts. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv(record: &Record, writer: impl Write) -> Result<()> {
    let mut w = ::csv::Writer::from_writer(writer);
    let to_err = |e: ::csv::Error| csv_error(&record.id, e.to_string());
    w.write_record(record.channel_names()).map_err(to_err)?;
    let signals: Vec<_> = record.channels().collect();
    for i in 0..record.len() {
        let row = signals.iter().map(|s| {
            let v = s.samples[i];
            if v.is_nan() {
                String::new()
            } else {
                format!("{v:?}")
            }
        });
        w.write_record(row).map_err(to_err)?;
    }
    w.flush()
        .map_err(|e| csv_error(&record.id, e.to_string()))?;
    Ok(())
}
