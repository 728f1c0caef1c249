//! Closed-form Gaussian-state math: squeezing conversions, EPR correlation
//! variances, per-scenario SNRs and Shannon capacity.
//!
//! Conventions: vacuum variance is 1 per quadrature per mode (SNL units), so
//! the two-mode vacuum correlation variance is 2 and the correlation
//! variances of an EPR pair built from equal squeezers are 2e^(∓2r).
//! Antisqueezing is modeled as exactly e^(+2r) (pure states).

use crate::channel::ChannelScenario;
use crate::error::{Error, Result};

/// Squeezing degrees of the two source squeezers behind an EPR pair.
///
/// `symmetric(r)` is the common equal-squeezer case; `asymmetric` keeps the
/// two degrees distinct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprParams {
    r1: f64,
    r2: f64,
}

impl EprParams {
    /// Equal squeezers with degree `r`.
    pub fn symmetric(r: f64) -> Result<Self> {
        Self::asymmetric(r, r)
    }

    pub fn asymmetric(r1: f64, r2: f64) -> Result<Self> {
        if !(r1.is_finite() && r1 >= 0.0) || !(r2.is_finite() && r2 >= 0.0) {
            return Err(Error::Domain(format!(
                "squeezing degrees must be >= 0, got r1={r1}, r2={r2}"
            )));
        }
        Ok(Self { r1, r2 })
    }

    /// From a squeezing level in dB below the shot noise limit.
    pub fn from_db(db: f64) -> Result<Self> {
        Self::symmetric(squeeze_db_to_r(db)?)
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    /// Mean squeezing degree; equals `r` for symmetric parameters.
    pub fn r(&self) -> f64 {
        0.5 * (self.r1 + self.r2)
    }
}

/// Correlation variances of the two-mode combinations, in SNL units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureVariances {
    /// Variance of the amplitude sum X1 + X2.
    pub sum_x: f64,
    /// Variance of the amplitude difference X1 - X2.
    pub diff_x: f64,
    /// Variance of the phase sum Y1 + Y2.
    pub sum_y: f64,
    /// Variance of the phase difference Y1 - Y2.
    pub diff_y: f64,
}

/// Bandwidth/SNR pair for a Shannon capacity query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityQuery {
    pub bandwidth_hz: f64,
    pub snr_linear: f64,
}

impl CapacityQuery {
    pub fn new(bandwidth_hz: f64, snr_linear: f64) -> Result<Self> {
        if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
            return Err(Error::Domain(format!(
                "bandwidth must be > 0 Hz, got {bandwidth_hz}"
            )));
        }
        if !(snr_linear.is_finite() && snr_linear >= 0.0) {
            return Err(Error::Domain(format!("SNR must be >= 0, got {snr_linear}")));
        }
        Ok(Self {
            bandwidth_hz,
            snr_linear,
        })
    }
}

/// Squeezing level in dB below the SNL -> squeezing degree r.
///
/// Convention e^(-2r) = 10^(-db/10), i.e. r = db·ln(10)/20. Negative input
/// is a domain error; antisqueezing is expressed through e^(+2r).
pub fn squeeze_db_to_r(db: f64) -> Result<f64> {
    if !(db.is_finite() && db >= 0.0) {
        return Err(Error::Domain(format!(
            "squeezing level must be >= 0 dB, got {db}"
        )));
    }
    Ok(db * std::f64::consts::LN_10 / 20.0)
}

/// Squeezing degree r -> dB below the SNL; inverse of [`squeeze_db_to_r`].
pub fn r_to_squeeze_db(r: f64) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain(format!(
            "squeezing degree must be >= 0, got {r}"
        )));
    }
    Ok(20.0 * r / std::f64::consts::LN_10)
}

/// Correlation variances of the EPR pair.
///
/// Equal squeezers: sum_x = diff_y = 2e^(-2r), diff_x = sum_y = 2e^(+2r).
/// Unequal squeezers: e^(-2r1)+e^(-2r2) and e^(+2r1)+e^(+2r2) respectively.
pub fn epr_correlation_variances(params: EprParams) -> QuadratureVariances {
    let squeezed = (-2.0 * params.r1).exp() + (-2.0 * params.r2).exp();
    let antisqueezed = (2.0 * params.r1).exp() + (2.0 * params.r2).exp();
    QuadratureVariances {
        sum_x: squeezed,
        diff_x: antisqueezed,
        sum_y: antisqueezed,
        diff_y: squeezed,
    }
}

/// Quadrature variance of a single EPR submode viewed alone (thermal state),
/// in SNL units: (e^(-2r) + e^(+2r))/2 = cosh(2r) for equal squeezers.
pub fn thermal_submode_variance(params: EprParams) -> f64 {
    0.5 * ((2.0 * params.r1).cosh() + (2.0 * params.r2).cosh())
}

/// Linear SNR seen by the given detection scenario for a signal of variance
/// `signal_variance` (SNL units) encoded on one quadrature.
pub fn scenario_snr(
    signal_variance: f64,
    params: EprParams,
    scenario: ChannelScenario,
) -> Result<f64> {
    if !(signal_variance.is_finite() && signal_variance >= 0.0) {
        return Err(Error::Domain(format!(
            "signal variance must be >= 0, got {signal_variance}"
        )));
    }
    let noise = crate::channel::scenario_noise_variance(scenario, params).0;
    Ok(signal_variance / noise)
}

/// Shannon capacity C = B·log2(1 + SNR) in bits per second.
pub fn channel_capacity(query: CapacityQuery) -> f64 {
    query.bandwidth_hz * (1.0 + query.snr_linear).log2()
}
