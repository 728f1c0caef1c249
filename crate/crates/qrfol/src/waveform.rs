//! Uniformly sampled real-valued signals and their file formats.
//!
//! Two interchange formats: CSV with header `sample_index,amplitude`, and a
//! raw little-endian binary with a 16-byte header (magic `QRFOLWF1`, then the
//! sample rate as a 64-bit float).

use crate::error::{Error, Result};

pub const WAVEFORM_MAGIC: &[u8; 8] = b"QRFOLWF1";

/// A real-valued quadrature-displacement signal in SNL units.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Self {
        debug_assert!(sample_rate_hz > 0.0);
        Self {
            samples,
            sample_rate_hz,
        }
    }

    /// A zero-filled waveform matching another's shape (an unused quadrature).
    pub fn zeros_like(other: &Waveform) -> Self {
        Self::new(vec![0.0; other.samples.len()], other.sample_rate_hz)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 24 + 32);
        out.push_str("sample_index,amplitude\n");
        for (i, s) in self.samples.iter().enumerate() {
            out.push_str(&format!("{i},{s:e}\n"));
        }
        out
    }

    pub fn from_csv(text: &str, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::Config(format!(
                "sample rate must be > 0, got {sample_rate_hz}"
            )));
        }
        let mut lines = text.lines();
        match lines.next().map(|l| l.trim()) {
            Some("sample_index,amplitude") => {}
            other => {
                return Err(Error::Config(format!(
                    "waveform CSV header must be `sample_index,amplitude`, got {other:?}"
                )))
            }
        }
        let mut samples = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (idx, amp) = line.split_once(',').ok_or_else(|| {
                Error::Config(format!("waveform CSV line {}: missing comma", lineno + 2))
            })?;
            let idx: usize = idx.trim().parse().map_err(|_| {
                Error::Config(format!("waveform CSV line {}: bad index", lineno + 2))
            })?;
            if idx != samples.len() {
                return Err(Error::Config(format!(
                    "waveform CSV line {}: index {idx} out of order",
                    lineno + 2
                )));
            }
            let amp: f64 = amp.trim().parse().map_err(|_| {
                Error::Config(format!("waveform CSV line {}: bad amplitude", lineno + 2))
            })?;
            if !amp.is_finite() {
                return Err(Error::Config(format!(
                    "waveform CSV line {}: non-finite amplitude",
                    lineno + 2
                )));
            }
            samples.push(amp);
        }
        Ok(Self::new(samples, sample_rate_hz))
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.samples.len() * 8);
        out.extend_from_slice(WAVEFORM_MAGIC);
        out.extend_from_slice(&self.sample_rate_hz.to_le_bytes());
        for s in &self.samples {
            out.extend_from_slice(&s.to_le_bytes());
        }
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 {
            return Err(Error::Config(format!(
                "waveform binary of {} bytes is shorter than the 16-byte header",
                bytes.len()
            )));
        }
        if &bytes[..8] != WAVEFORM_MAGIC {
            return Err(Error::Config("bad waveform magic".into()));
        }
        let rate = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::Config(format!("bad sample rate {rate}")));
        }
        let body = &bytes[16..];
        if !body.len().is_multiple_of(8) {
            return Err(Error::Config(format!(
                "waveform body of {} bytes is not a whole number of f64 samples",
                body.len()
            )));
        }
        let samples: Vec<f64> = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("waveform contains non-finite samples".into()));
        }
        Ok(Self::new(samples, rate))
    }
}
