//! Sideband-frequency dependence of the squeezing level.
//!
//! Published squeezing levels exist only at a few anchor frequencies, so the
//! spectrum is an interpolation model: piecewise-linear in (frequency, dB) by
//! default, or a least-squares single-pole Lorentzian fit which matches OPA
//! cavity physics and extrapolates beyond the anchor span.

use crate::error::{Error, Result};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpolationKind {
    /// Linear interpolation of dB values against frequency; anchored exactly,
    /// no extrapolation.
    PiecewiseLinear,
    /// Least-squares fit of S(f) = S0 / (1 + (f/f_c)^2) with dB-domain
    /// residuals; defined for any f > 0.
    LorentzianFit,
}

/// Squeezing level vs sideband frequency, built from (Hz, dB-below-SNL)
/// anchors in strictly increasing frequency order.
#[derive(Debug, Clone)]
pub struct SqueezingSpectrum {
    anchors: Vec<(f64, f64)>,
    kind: InterpolationKind,
    /// (S0, f_c) of the Lorentzian fit, computed on construction.
    fit: (f64, f64),
}

impl SqueezingSpectrum {
    pub fn new(anchors: Vec<(f64, f64)>, kind: InterpolationKind) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::Config("spectrum needs at least one anchor".into()));
        }
        for &(f, db) in &anchors {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::Config(format!(
                    "anchor frequency must be > 0 Hz, got {f}"
                )));
            }
            if !(db.is_finite() && db >= 0.0) {
                return Err(Error::Config(format!(
                    "anchor squeezing must be >= 0 dB, got {db}"
                )));
            }
        }
        if anchors.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Config(
                "anchor frequencies must be strictly increasing".into(),
            ));
        }
        let fit = fit_lorentzian(&anchors);
        Ok(Self { anchors, kind, fit })
    }

    /// The paper's measured entanglement anchors: 6.4 dB at 3 MHz and
    /// 2.0 dB at 200 MHz, with the 63 MHz squeezer point between them.
    pub fn paper_entanglement() -> Self {
        Self::new(
            vec![(3e6, 6.4), (63e6, 5.9), (200e6, 2.0)],
            InterpolationKind::PiecewiseLinear,
        )
        .expect("static anchors are valid")
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    pub fn kind(&self) -> InterpolationKind {
        self.kind
    }

    /// Fitted (S0, f_c) of the Lorentzian model.
    pub fn lorentzian_params(&self) -> (f64, f64) {
        self.fit
    }

    /// Squeezing level in dB at sideband frequency `freq_hz`.
    pub fn squeezing_at(&self, freq_hz: f64) -> Result<f64> {
        match self.kind {
            InterpolationKind::PiecewiseLinear => self.piecewise_at(freq_hz),
            InterpolationKind::LorentzianFit => {
                if !(freq_hz.is_finite() && freq_hz > 0.0) {
                    return Err(Error::Domain(format!(
                        "frequency must be > 0 Hz, got {freq_hz}"
                    )));
                }
                let (s0, fc) = self.fit;
                Ok(s0 / (1.0 + (freq_hz / fc).powi(2)))
            }
        }
    }

    fn piecewise_at(&self, freq_hz: f64) -> Result<f64> {
        let low = self.anchors[0].0;
        let high = self.anchors[self.anchors.len() - 1].0;
        if !(freq_hz >= low && freq_hz <= high) {
            return Err(Error::FrequencyRange {
                freq_hz,
                low_hz: low,
                high_hz: high,
            });
        }
        // Exact anchor hits return the anchor value.
        if let Some(&(_, db)) = self.anchors.iter().find(|&&(f, _)| f == freq_hz) {
            return Ok(db);
        }
        let idx = self
            .anchors
            .windows(2)
            .position(|w| freq_hz >= w[0].0 && freq_hz <= w[1].0)
            .expect("freq within span");
        let (f0, d0) = self.anchors[idx];
        let (f1, d1) = self.anchors[idx + 1];
        Ok(d0 + (d1 - d0) * (freq_hz - f0) / (f1 - f0))
    }

    /// Load anchors from a CSV file with header `freq_hz,squeeze_db` and rows
    /// in ascending frequency.
    pub fn from_csv_file(path: &Path, kind: InterpolationKind) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv(&text, kind)
    }

    pub fn from_csv(text: &str, kind: InterpolationKind) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((_, l)) => break l,
                None => return Err(Error::Config("empty spectrum CSV".into())),
            }
        };
        let normalized: String = header.chars().filter(|c| !c.is_whitespace()).collect();
        if normalized != "freq_hz,squeeze_db" {
            return Err(Error::Config(format!(
                "spectrum CSV header must be `freq_hz,squeeze_db`, got `{header}`"
            )));
        }
        let mut anchors = Vec::new();
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|v| v.trim().parse::<f64>().ok()).ok_or_else(|| {
                    Error::Config(format!(
                        "spectrum CSV line {}: bad row `{line}`",
                        lineno + 1
                    ))
                })
            };
            let f = parse(cols.next())?;
            let db = parse(cols.next())?;
            if cols.next().is_some() {
                return Err(Error::Config(format!(
                    "spectrum CSV line {}: expected 2 columns",
                    lineno + 1
                )));
            }
            anchors.push((f, db));
        }
        Self::new(anchors, kind)
    }
}

/// Least-squares (S0, f_c) for S(f) = S0/(1 + (f/f_c)^2) against dB-domain
/// residuals. For fixed f_c the optimal S0 is linear; f_c is found by golden
/// section over a log-spaced bracket.
fn fit_lorentzian(anchors: &[(f64, f64)]) -> (f64, f64) {
    if anchors.len() == 1 {
        // Any pole fits a single anchor exactly; pin it at the anchor.
        let (f, db) = anchors[0];
        return (db * 2.0, f);
    }
    let best_s0 = |fc: f64| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for &(f, db) in anchors {
            let w = 1.0 / (1.0 + (f / fc).powi(2));
            num += db * w;
            den += w * w;
        }
        num / den
    };
    let sse = |fc: f64| -> f64 {
        let s0 = best_s0(fc);
        anchors
            .iter()
            .map(|&(f, db)| {
                let e = s0 / (1.0 + (f / fc).powi(2)) - db;
                e * e
            })
            .sum()
    };
    // Coarse log grid then golden-section refinement.
    let f_min = anchors[0].0;
    let f_max = anchors[anchors.len() - 1].0;
    let (lo, hi) = ((f_min * 1e-2).ln(), (f_max * 1e3).ln());
    let mut best = (f64::INFINITY, lo);
    for i in 0..=200 {
        let x = lo + (hi - lo) * i as f64 / 200.0;
        let e = sse(x.exp());
        if e < best.0 {
            best = (e, x);
        }
    }
    let step = (hi - lo) / 200.0;
    let (mut a, mut b) = (best.1 - step, best.1 + step);
    const PHI: f64 = 0.6180339887498949;
    let (mut c, mut d) = (b - PHI * (b - a), a + PHI * (b - a));
    let (mut fc_, mut fd) = (sse(c.exp()), sse(d.exp()));
    for _ in 0..80 {
        if fc_ < fd {
            b = d;
            d = c;
            fd = fc_;
            c = b - PHI * (b - a);
            fc_ = sse(c.exp());
        } else {
            a = c;
            c = d;
            fc_ = fd;
            d = a + PHI * (b - a);
            fd = sse(d.exp());
        }
    }
    let fc = (0.5 * (a + b)).exp();
    (best_s0(fc), fc)
}
