use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Record;

/// Rolling-window geometry in samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub length: usize,
    pub step: usize,
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::invalid("length", "window length must be at least 1"));
        }
        if self.step == 0 {
            return Err(Error::invalid("step", "window step must be at least 1"));
        }
        Ok(())
    }

    /// `floor((n - length) / step) + 1`, or 0 if the window does not fit.
    pub fn count(&self, n: usize) -> usize {
        if n < self.length {
            0
        } else {
            (n - self.length) / self.step + 1
        }
    }
}

/// Windows starting at `0, step, 2 step, ...` that lie fully inside the
/// record; a trailing partial window is dropped. Window ids are
/// `{record id}__w{start}`.
pub fn rolling_windows(record: &Record, spec: &WindowSpec) -> Result<Vec<Record>> {
    spec.validate()?;
    let n = record.len();
    if spec.length > n {
        return Err(Error::Record(format!(
            "record {}: window length {} exceeds record length {n}",
            record.id, spec.length
        )));
    }
    Ok((0..spec.count(n))
        .map(|k| {
            let start = k * spec.step;
            record.slice(format!("{}__w{start}", record.id), start, spec.length)
        })
        .collect())
}
