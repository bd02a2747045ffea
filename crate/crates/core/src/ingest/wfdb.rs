//! WFDB record headers (`.hea`) and signal files (`.dat`), formats 16 and
//! 212.
//!
//! Header grammar handled here: one record line
//! `name n_sig [fs[/counter][(base)] [n_samples [time [date]]]]` followed by
//! one line per signal
//! `file format[+offset] [gain[(baseline)][/units] [adc_res [adc_zero [init [checksum [block [description]]]]]]]`.
//! Lines starting with `#` and blank lines are ignored anywhere.

use std::path::Path;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::signal::Record;

/// Gain used when a signal line omits it or gives 0.
pub const DEFAULT_GAIN: f64 = 200.0;
/// Sampling rate used when the record line omits it.
pub const DEFAULT_FS: f64 = 250.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalFormat {
    /// 16-bit little-endian two's complement.
    Format16,
    /// Two 12-bit two's complement samples packed into three bytes.
    Format212,
}

impl SignalFormat {
    pub fn from_code(code: u16) -> Result<Self> {
        match code {
            16 => Ok(SignalFormat::Format16),
            212 => Ok(SignalFormat::Format212),
            other => Err(Error::UnsupportedFormat(other)),
        }
    }

    pub fn code(self) -> u16 {
        match self {
            SignalFormat::Format16 => 16,
            SignalFormat::Format212 => 212,
        }
    }

    /// Inclusive range of representable sample values.
    pub fn range(self) -> (i32, i32) {
        match self {
            SignalFormat::Format16 => (i16::MIN as i32, i16::MAX as i32),
            SignalFormat::Format212 => (-2048, 2047),
        }
    }

    /// Sample value WFDB reserves for "no data".
    pub fn invalid_sample(self) -> i32 {
        self.range().0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub file_name: String,
    pub format: SignalFormat,
    pub byte_offset: usize,
    /// ADC units per physical unit.
    pub gain: f64,
    pub baseline: i32,
    pub units: String,
    pub adc_resolution: Option<u32>,
    pub adc_zero: i32,
    pub initial_value: Option<i32>,
    pub checksum: Option<i32>,
    pub block_size: Option<u32>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WfdbHeader {
    pub record_name: String,
    pub n_sig: usize,
    pub fs: f64,
    /// Samples per signal; `None` when the header leaves it unspecified.
    pub n_samples: Option<usize>,
    pub signals: Vec<SignalSpec>,
    pub comments: Vec<String>,
}

impl WfdbHeader {
    /// Channel names: the signal descriptions, or `sig{i}` when blank.
    pub fn channel_names(&self) -> Vec<String> {
        self.signals
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if s.description.is_empty() {
                    format!("sig{i}")
                } else {
                    s.description.clone()
                }
            })
            .collect()
    }
}

fn header_err(line_no: usize, line: &str, what: impl std::fmt::Display) -> Error {
    Error::Header(format!("line {line_no}: {what}: `{line}`"))
}

fn parse_field<T: std::str::FromStr>(
    token: &str,
    line_no: usize,
    line: &str,
    what: &str,
) -> Result<T> {
    token
        .parse()
        .map_err(|_| header_err(line_no, line, format!("invalid {what} `{token}`")))
}

pub fn parse_wfdb_header(text: &str) -> Result<WfdbHeader> {
    let mut comments = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            comments.push(comment.trim().to_string());
        } else if !line.is_empty() {
            lines.push((i + 1, line));
        }
    }
    let Some(&(line_no, record_line)) = lines.first() else {
        return Err(Error::Header("no record line".into()));
    };

    let tokens: Vec<&str> = record_line.split_whitespace().collect();
    if tokens.len() < 2 {
        return Err(header_err(
            line_no,
            record_line,
            "record line needs a name and a signal count",
        ));
    }
    let record_name = tokens[0];
    if record_name.contains('/') {
        return Err(header_err(
            line_no,
            record_line,
            "multi-segment records are not supported",
        ));
    }
    let n_sig: usize = parse_field(tokens[1], line_no, record_line, "signal count")?;
    if n_sig == 0 {
        return Err(header_err(line_no, record_line, "record has no signals"));
    }
    let fs = match tokens.get(2) {
        Some(tok) => {
            let rate = tok.split(['/', '(']).next().unwrap_or(tok);
            let fs: f64 = parse_field(rate, line_no, record_line, "sampling frequency")?;
            if !(fs > 0.0 && fs.is_finite()) {
                return Err(header_err(
                    line_no,
                    record_line,
                    "sampling frequency must be positive",
                ));
            }
            fs
        }
        None => DEFAULT_FS,
    };
    let n_samples = match tokens.get(3) {
        Some(tok) => match parse_field::<usize>(tok, line_no, record_line, "sample count")? {
            0 => None,
            n => Some(n),
        },
        None => None,
    };

    let signal_lines = &lines[1..];
    if signal_lines.len() < n_sig {
        return Err(Error::Header(format!(
            "record line declares {n_sig} signals but {} signal lines follow",
            signal_lines.len()
        )));
    }
    if signal_lines.len() > n_sig {
        let (extra_no, extra) = signal_lines[n_sig];
        return Err(header_err(
            extra_no,
            extra,
            format!("unexpected line after {n_sig} signal lines"),
        ));
    }
    let signals = signal_lines
        .iter()
        .map(|&(no, line)| parse_signal_line(no, line))
        .collect::<Result<Vec<_>>>()?;

    Ok(WfdbHeader {
        record_name: record_name.to_string(),
        n_sig,
        fs,
        n_samples,
        signals,
        comments,
    })
}

fn parse_signal_line(line_no: usize, line: &str) -> Result<SignalSpec> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() < 2 {
        return Err(header_err(
            line_no,
            line,
            "signal line needs a file name and a format",
        ));
    }
    let file_name = tokens[0].to_string();

    // format[xN][:skew][+offset]
    let fmt = tokens[1];
    let code_len = fmt.find(|c: char| !c.is_ascii_digit()).unwrap_or(fmt.len());
    let code: u16 = parse_field(&fmt[..code_len], line_no, line, "format")?;
    let format = SignalFormat::from_code(code)?;
    let modifiers = &fmt[code_len..];
    if let Some(x) = modifiers.strip_prefix('x') {
        let spf = x.split([':', '+']).next().unwrap_or("");
        if spf != "1" {
            return Err(header_err(
                line_no,
                line,
                "multiple samples per frame are not supported",
            ));
        }
    }
    let byte_offset = match modifiers.split_once('+') {
        Some((_, off)) => parse_field(off, line_no, line, "byte offset")?,
        None => 0,
    };

    let adc_zero: i32 = match tokens.get(4) {
        Some(t) => parse_field(t, line_no, line, "ADC zero")?,
        None => 0,
    };

    let (mut gain, mut baseline, mut units) = (DEFAULT_GAIN, adc_zero, "mV".to_string());
    if let Some(g) = tokens.get(2) {
        let (value, unit) = match g.split_once('/') {
            Some((v, u)) => (v, Some(u)),
            None => (*g, None),
        };
        let (gain_str, base_str) = match value.split_once('(') {
            Some((v, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| {
                    header_err(line_no, line, format!("unbalanced baseline in `{g}`"))
                })?;
                (v, Some(inner))
            }
            None => (value, None),
        };
        let parsed: f64 = parse_field(gain_str, line_no, line, "gain")?;
        if parsed != 0.0 {
            gain = parsed;
        }
        if let Some(b) = base_str {
            baseline = parse_field(b, line_no, line, "baseline")?;
        }
        if let Some(u) = unit {
            units = u.to_string();
        }
    }

    let opt = |idx: usize, what: &str| -> Result<Option<i64>> {
        tokens
            .get(idx)
            .map(|t| parse_field::<i64>(t, line_no, line, what))
            .transpose()
    };
    let adc_resolution = opt(3, "ADC resolution")?.map(|v| v as u32);
    let initial_value = opt(5, "initial value")?.map(|v| v as i32);
    let checksum = opt(6, "checksum")?.map(|v| v as i32);
    let block_size = opt(7, "block size")?.map(|v| v as u32);
    // Description is everything after the eighth field, spaces included.
    let description = rest_after_fields(line, 8).to_string();

    Ok(SignalSpec {
        file_name,
        format,
        byte_offset,
        gain,
        baseline,
        units,
        adc_resolution,
        adc_zero,
        initial_value,
        checksum,
        block_size,
        description,
    })
}

/// The remainder of `line` after skipping `n` whitespace-separated fields.
fn rest_after_fields(line: &str, n: usize) -> &str {
    let mut rest = line.trim_start();
    for _ in 0..n {
        match rest.find(char::is_whitespace) {
            Some(end) => rest = rest[end..].trim_start(),
            None => return "",
        }
    }
    rest.trim_end()
}

/// De-interleaves a signal file into `n_sig` channels of raw ADC values.
pub fn decode_dat(bytes: &[u8], format: SignalFormat, n_sig: usize) -> Result<Vec<Vec<i32>>> {
    decode_frames(bytes, format, n_sig, None)
}

/// With `expected` samples per signal known, a single padding sample is
/// recognised even when `n_sig` is 1.
fn decode_frames(
    bytes: &[u8],
    format: SignalFormat,
    n_sig: usize,
    expected: Option<usize>,
) -> Result<Vec<Vec<i32>>> {
    if n_sig == 0 {
        return Err(Error::invalid("n_sig", "need at least one signal"));
    }
    let stream: Vec<i32> = match format {
        SignalFormat::Format16 => {
            if !bytes.len().is_multiple_of(2) {
                return Err(Error::PartialFrame {
                    offset: bytes.len() - 1,
                });
            }
            bytes
                .chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]) as i32)
                .collect()
        }
        SignalFormat::Format212 => {
            if !bytes.len().is_multiple_of(3) {
                return Err(Error::PartialFrame {
                    offset: bytes.len() - bytes.len() % 3,
                });
            }
            let sign_extend = |v: i32| if v & 0x800 != 0 { v - 0x1000 } else { v };
            let mut out = Vec::with_capacity(bytes.len() / 3 * 2);
            for c in bytes.chunks_exact(3) {
                let (b0, b1, b2) = (c[0] as i32, c[1] as i32, c[2] as i32);
                out.push(sign_extend(b0 | ((b1 & 0x0F) << 8)));
                out.push(sign_extend(b2 | ((b1 & 0xF0) << 4)));
            }
            // An odd sample count is padded to a whole frame on disk.
            let padded = match expected {
                Some(n) => out.len() == n * n_sig + 1,
                None => n_sig > 1 && out.len() % n_sig == 1,
            };
            if padded {
                out.pop();
            }
            out
        }
    };
    if !stream.len().is_multiple_of(n_sig) {
        let bytes_per_sample = if format == SignalFormat::Format16 {
            2.0
        } else {
            1.5
        };
        let complete = stream.len() / n_sig * n_sig;
        return Err(Error::PartialFrame {
            offset: (complete as f64 * bytes_per_sample) as usize,
        });
    }
    let mut channels = vec![Vec::with_capacity(stream.len() / n_sig); n_sig];
    for (i, v) in stream.into_iter().enumerate() {
        channels[i % n_sig].push(v);
    }
    Ok(channels)
}

/// Interleaves equally long channels into a signal file. Inverse of
/// [`decode_dat`].
pub fn encode_dat(channels: &[Vec<i32>], format: SignalFormat) -> Result<Vec<u8>> {
    let n = channels.first().map_or(0, Vec::len);
    if channels.iter().any(|c| c.len() != n) {
        return Err(Error::invalid(
            "channels",
            "all channels must have the same length",
        ));
    }
    let (lo, hi) = format.range();
    let mut stream = Vec::with_capacity(n * channels.len());
    for i in 0..n {
        for c in channels {
            let v = c[i];
            if v < lo || v > hi {
                return Err(Error::invalid(
                    "channels",
                    format!("sample {v} out of range for format {}", format.code()),
                ));
            }
            stream.push(v);
        }
    }
    Ok(match format {
        SignalFormat::Format16 => stream
            .iter()
            .flat_map(|&v| (v as i16).to_le_bytes())
            .collect(),
        SignalFormat::Format212 => {
            if stream.len() % 2 == 1 {
                stream.push(0);
            }
            stream
                .chunks_exact(2)
                .flat_map(|p| {
                    let (a, b) = (p[0] & 0xFFF, p[1] & 0xFFF);
                    [
                        (a & 0xFF) as u8,
                        (((a >> 8) & 0x0F) | ((b >> 4) & 0xF0)) as u8,
                        (b & 0xFF) as u8,
                    ]
                })
                .collect()
        }
    })
}

/// `(adu - baseline) / gain`.
pub fn adc_to_physical(adu: &[i32], gain: f64, baseline: i32) -> Result<Vec<f64>> {
    if gain == 0.0 || !gain.is_finite() {
        return Err(Error::invalid(
            "gain",
            format!("must be nonzero and finite, got {gain}"),
        ));
    }
    Ok(adu.iter().map(|&v| (v - baseline) as f64 / gain).collect())
}

/// 16-bit checksum as written in WFDB headers.
pub fn checksum(samples: &[i32]) -> i16 {
    samples
        .iter()
        .fold(0i16, |acc, &v| acc.wrapping_add(v as i16))
}

/// Builds a record from a parsed header, loading signal files through
/// `load(file_name)`. Only files holding a requested channel are loaded.
/// Samples equal to the format's "no data" value become missing.
pub fn assemble_record(
    header: &WfdbHeader,
    id: impl Into<String>,
    channels: Option<&[String]>,
    mut load: impl FnMut(&str) -> Result<Vec<u8>>,
) -> Result<Record> {
    let id = id.into();
    let names = header.channel_names();
    let wanted: Vec<usize> = match channels {
        None => (0..names.len()).collect(),
        Some(req) => req
            .iter()
            .map(|c| {
                names.iter().position(|n| n == c).ok_or_else(|| {
                    Error::Record(format!(
                        "record {id}: no channel named `{c}` (has {})",
                        names.join(", ")
                    ))
                })
            })
            .collect::<Result<_>>()?,
    };

    let mut groups: IndexMap<&str, Vec<usize>> = IndexMap::new();
    for (i, s) in header.signals.iter().enumerate() {
        groups.entry(s.file_name.as_str()).or_default().push(i);
    }

    let mut decoded: Vec<Option<Vec<f64>>> = vec![None; header.signals.len()];
    for (file, members) in &groups {
        if !members.iter().any(|m| wanted.contains(m)) {
            continue;
        }
        let first = &header.signals[members[0]];
        if members.iter().any(|&m| {
            header.signals[m].format != first.format
                || header.signals[m].byte_offset != first.byte_offset
        }) {
            return Err(Error::Header(format!(
                "signals in `{file}` disagree on format or byte offset"
            )));
        }
        let bytes = load(file)?;
        let body = bytes.get(first.byte_offset..).ok_or_else(|| {
            Error::SignalData(format!(
                "`{file}` is shorter than its byte offset {}",
                first.byte_offset
            ))
        })?;
        let raw = decode_frames(body, first.format, members.len(), header.n_samples)?;
        for (&m, adu) in members.iter().zip(raw) {
            let spec = &header.signals[m];
            if let Some(expected) = header.n_samples {
                if adu.len() != expected {
                    return Err(Error::SignalData(format!(
                        "record {id}: `{file}` holds {} samples per signal, header declares {expected}",
                        adu.len()
                    )));
                }
            }
            if let Some(sum) = spec.checksum {
                if checksum(&adu) != sum as i16 {
                    return Err(Error::SignalData(format!(
                        "record {id}: checksum mismatch for signal {m} in `{file}`"
                    )));
                }
            }
            let mut physical = adc_to_physical(&adu, spec.gain, spec.baseline)?;
            let invalid = spec.format.invalid_sample();
            for (p, a) in physical.iter_mut().zip(&adu) {
                if *a == invalid {
                    *p = f64::NAN;
                }
            }
            decoded[m] = Some(physical);
        }
    }

    let mut record = Record::new(id, header.fs);
    for i in wanted {
        let samples = decoded[i].take().unwrap_or_default();
        record.push_channel(names[i].clone(), samples)?;
    }
    Ok(record)
}

/// Reads a record from a local `.hea` file; signal files are resolved
/// relative to the header's directory.
pub fn read_wfdb(hea_path: impl AsRef<Path>, channels: Option<&[String]>) -> Result<Record> {
    let hea_path = hea_path.as_ref();
    let text = std::fs::read_to_string(hea_path).map_err(|e| Error::io(hea_path, e))?;
    let header = parse_wfdb_header(&text)?;
    let dir = hea_path.parent().unwrap_or_else(|| Path::new("."));
    let id = header.record_name.clone();
    assemble_record(&header, id, channels, |file| {
        let path = dir.join(file);
        std::fs::read(&path).map_err(|e| Error::io(path, e))
    })
}
