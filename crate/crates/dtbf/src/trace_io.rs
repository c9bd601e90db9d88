//! Channel trace files.
//!
//! The binary form is a single UTF-8 JSON header line
//! `{"sample_rate_hz": .., "num_samples": .., "capture_snr_db": ..|null}`
//! followed by `num_samples` little-endian `f32` I/Q pairs. The CSV form has
//! an `i,q` header row and one sample per line; its sample rate is supplied
//! by the caller.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use dtbf_core::channel::ChannelTrace;
use dtbf_core::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot open trace {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("trace format error: {0}")]
    Format(String),
}

fn format_err(msg: impl Into<String>) -> TraceError {
    TraceError::Format(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceHeader {
    pub sample_rate_hz: f64,
    pub num_samples: u64,
    pub capture_snr_db: Option<f64>,
}

fn build(
    samples: Vec<Complex64>,
    sample_rate_hz: f64,
    snr: Option<f64>,
) -> Result<ChannelTrace, TraceError> {
    if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
        return Err(format_err(format!("invalid sample rate {sample_rate_hz}")));
    }
    ChannelTrace::new(samples, 1.0 / sample_rate_hz, snr).map_err(|e| format_err(e.to_string()))
}

pub fn read_binary(mut r: impl BufRead) -> Result<ChannelTrace, TraceError> {
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line)
        .map_err(|e| format_err(e.to_string()))?;
    if line.last() != Some(&b'\n') {
        return Err(format_err("missing newline-terminated JSON header"));
    }
    let header: TraceHeader =
        serde_json::from_slice(&line).map_err(|e| format_err(format!("malformed header: {e}")))?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)
        .map_err(|e| format_err(e.to_string()))?;
    let declared = header.num_samples;
    if payload.len() % 8 != 0 || payload.len() as u64 / 8 != declared {
        return Err(format_err(format!(
            "header declares {declared} samples but payload holds {} bytes ({} expected)",
            payload.len(),
            declared.saturating_mul(8)
        )));
    }
    let samples = payload
        .chunks_exact(8)
        .map(|c| {
            let i = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let q = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(i as f64, q as f64)
        })
        .collect();
    build(samples, header.sample_rate_hz, header.capture_snr_db)
}

/// Writes the binary form. Samples are narrowed to `f32`.
pub fn write_binary(mut w: impl Write, trace: &ChannelTrace) -> io::Result<()> {
    let header = TraceHeader {
        sample_rate_hz: trace.sample_rate_hz(),
        num_samples: trace.len() as u64,
        capture_snr_db: trace.capture_snr_db,
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for s in &trace.samples {
        w.write_all(&(s.re as f32).to_le_bytes())?;
        w.write_all(&(s.im as f32).to_le_bytes())?;
    }
    w.flush()
}

pub fn read_csv(r: impl BufRead, sample_rate_hz: f64) -> Result<ChannelTrace, TraceError> {
    let mut lines = r.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l.map_err(|e| format_err(e.to_string()))?,
        None => return Err(format_err("empty CSV trace")),
    };
    let cols: Vec<_> = header.split(',').map(str::trim).collect();
    if cols != ["i", "q"] {
        return Err(format_err(format!(
            "CSV header must be `i,q`, found `{header}`"
        )));
    }
    let mut samples = Vec::new();
    for (k, line) in lines {
        let line = line.map_err(|e| format_err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || {
            format_err(format!(
                "line {}: expected two numbers, found `{line}`",
                k + 1
            ))
        };
        let mut it = line.split(',');
        let (Some(i), Some(q), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad());
        };
        let i: f64 = i.trim().parse().map_err(|_| bad())?;
        let q: f64 = q.trim().parse().map_err(|_| bad())?;
        samples.push(Complex64::new(i, q));
    }
    build(samples, sample_rate_hz, None)
}

pub fn write_csv(mut w: impl Write, trace: &ChannelTrace) -> io::Result<()> {
    writeln!(w, "i,q")?;
    for s in &trace.samples {
        writeln!(w, "{},{}", s.re, s.im)?;
    }
    w.flush()
}

/// Loads a trace, choosing the CSV reader for a `.csv` extension. CSV
/// traces need `csv_sample_rate_hz`.
pub fn load_trace(
    path: &Path,
    csv_sample_rate_hz: Option<f64>,
) -> Result<ChannelTrace, TraceError> {
    let file = File::open(path).map_err(|source| TraceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let r = BufReader::new(file);
    if is_csv(path) {
        let rate = csv_sample_rate_hz
            .ok_or_else(|| format_err("CSV traces need a sample rate (--sample-rate)"))?;
        read_csv(r, rate)
    } else {
        read_binary(r)
    }
}

pub fn save_trace(path: &Path, trace: &ChannelTrace) -> io::Result<()> {
    let w = BufWriter::new(File::create(path)?);
    if is_csv(path) {
        write_csv(w, trace)
    } else {
        write_binary(w, trace)
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}
