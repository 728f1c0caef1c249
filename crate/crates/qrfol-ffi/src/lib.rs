//! C ABI bindings for the qrfol simulator.
//!
//! Conventions (mirrored by `include/qrfol.h`):
//! - Functions returning `int32_t` use status codes: 0 ok, nonzero failure;
//!   the message behind the most recent failure on the calling thread is
//!   available via [`qrfol_last_error`].
//! - The modem handle is an opaque heap pointer created by
//!   [`qrfol_modem_new`] and released by [`qrfol_modem_free`]; it must not be
//!   used after free or across a free.
//! - Scenario codes: 0 classical, 1 entangled, 2 thermal, 3 classical with
//!   the single-mode baseline. Scheme codes: 0 BPSK, 1 BFSK, 2 BASK.
//!
//! # Safety (blanket)
//!
//! All `unsafe extern "C"` functions share the same contract: pointer
//! arguments must be null or valid for the advertised access, output
//! pointers must be writable, and handles must originate from this library.
#![allow(clippy::missing_safety_doc)]

use qrfol::ber::{run_repeated, Quadrature};
use qrfol::channel::{
    calibrate_amplitude, scenario_noise_variance, BaselineMode, Channel, ChannelScenario,
};
use qrfol::gaussian::{
    channel_capacity, r_to_squeeze_db, squeeze_db_to_r, CapacityQuery, EprParams,
};
use qrfol::math::db_to_lin;
use qrfol::modem::{theoretical_ber, ModemConfig, Scheme};
use std::cell::RefCell;
use std::ffi::{c_char, c_int};

pub const QRFOL_OK: c_int = 0;
pub const QRFOL_ERR_NULL_POINTER: c_int = 1;
pub const QRFOL_ERR_INVALID_ARGUMENT: c_int = 2;
pub const QRFOL_ERR_SYNC: c_int = 3;
pub const QRFOL_ERR_IO: c_int = 4;

pub const QRFOL_SCENARIO_CLASSICAL: c_int = 0;
pub const QRFOL_SCENARIO_ENTANGLED: c_int = 1;
pub const QRFOL_SCENARIO_THERMAL: c_int = 2;
pub const QRFOL_SCENARIO_CLASSICAL_SINGLE: c_int = 3;

pub const QRFOL_SCHEME_BPSK: c_int = 0;
pub const QRFOL_SCHEME_BFSK: c_int = 1;
pub const QRFOL_SCHEME_BASK: c_int = 2;

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|slot| {
        let mut v = msg.as_bytes().to_vec();
        v.push(0);
        *slot.borrow_mut() = v;
    });
}

fn status_of(err: &qrfol::Error) -> c_int {
    match err {
        qrfol::Error::SyncFailure { .. } => QRFOL_ERR_SYNC,
        qrfol::Error::Io(_) | qrfol::Error::PbmParse { .. } => QRFOL_ERR_IO,
        _ => QRFOL_ERR_INVALID_ARGUMENT,
    }
}

fn fail(err: qrfol::Error) -> c_int {
    let code = status_of(&err);
    set_error(&err.to_string());
    code
}

/// Copy the most recent error message (NUL-terminated) for this thread into
/// `buf`. Returns the full message length including the NUL; when `buf` is
/// null or too small the message is truncated to fit (always terminated).
///
/// # Safety
/// `buf` must be null or valid for `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qrfol_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        if msg.is_empty() {
            if !buf.is_null() && cap > 0 {
                unsafe { *buf = 0 };
            }
            return 1;
        }
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap);
            unsafe {
                std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
                *buf.add(n - 1) = 0;
            }
        }
        msg.len()
    })
}

fn scenario_from_code(code: c_int) -> Result<ChannelScenario, qrfol::Error> {
    match code {
        0 => Ok(ChannelScenario::classical()),
        1 => Ok(ChannelScenario::EntangledJoint),
        2 => Ok(ChannelScenario::ThermalSingle),
        3 => Ok(ChannelScenario::CoherentClassical {
            baseline: BaselineMode::SingleMode,
        }),
        other => Err(qrfol::Error::Config(format!(
            "unknown scenario code {other}"
        ))),
    }
}

fn scheme_from_code(code: c_int) -> Result<Scheme, qrfol::Error> {
    match code {
        0 => Ok(Scheme::Bpsk),
        1 => Ok(Scheme::Bfsk),
        2 => Ok(Scheme::Bask),
        other => Err(qrfol::Error::Config(format!("unknown scheme code {other}"))),
    }
}

/// Shannon capacity in bits/s; NaN (with the error recorded) on invalid
/// arguments.
#[no_mangle]
pub extern "C" fn qrfol_channel_capacity(bandwidth_hz: f64, snr_linear: f64) -> f64 {
    match CapacityQuery::new(bandwidth_hz, snr_linear) {
        Ok(q) => channel_capacity(q),
        Err(e) => {
            set_error(&e.to_string());
            f64::NAN
        }
    }
}

/// dB below the shot-noise limit -> squeezing degree r.
///
/// # Safety
/// `out_r` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qrfol_squeeze_db_to_r(db: f64, out_r: *mut f64) -> c_int {
    if out_r.is_null() {
        set_error("out_r is null");
        return QRFOL_ERR_NULL_POINTER;
    }
    match squeeze_db_to_r(db) {
        Ok(r) => {
            unsafe { *out_r = r };
            QRFOL_OK
        }
        Err(e) => fail(e),
    }
}

/// Squeezing degree r -> dB below the shot-noise limit.
///
/// # Safety
/// `out_db` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qrfol_r_to_squeeze_db(r: f64, out_db: *mut f64) -> c_int {
    if out_db.is_null() {
        set_error("out_db is null");
        return QRFOL_ERR_NULL_POINTER;
    }
    match r_to_squeeze_db(r) {
        Ok(db) => {
            unsafe { *out_db = db };
            QRFOL_OK
        }
        Err(e) => fail(e),
    }
}

/// Per-quadrature detection-noise variance (SNL units) for a scenario at
/// squeezing degree r.
///
/// # Safety
/// `out_x` and `out_y` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn qrfol_scenario_noise_variance(
    scenario: c_int,
    r: f64,
    out_x: *mut f64,
    out_y: *mut f64,
) -> c_int {
    if out_x.is_null() || out_y.is_null() {
        set_error("output pointer is null");
        return QRFOL_ERR_NULL_POINTER;
    }
    let result = scenario_from_code(scenario)
        .and_then(|s| EprParams::symmetric(r).map(|p| scenario_noise_variance(s, p)));
    match result {
        Ok((vx, vy)) => {
            unsafe {
                *out_x = vx;
                *out_y = vy;
            }
            QRFOL_OK
        }
        Err(e) => fail(e),
    }
}

/// Closed-form coherent-detection BER at linear per-bit SNR (Eb/N0).
///
/// # Safety
/// `out_ber` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qrfol_theoretical_ber(
    scheme: c_int,
    snr_per_bit_linear: f64,
    out_ber: *mut f64,
) -> c_int {
    if out_ber.is_null() {
        set_error("out_ber is null");
        return QRFOL_ERR_NULL_POINTER;
    }
    let result = scheme_from_code(scheme).and_then(|s| theoretical_ber(s, snr_per_bit_linear));
    match result {
        Ok(ber) => {
            unsafe { *out_ber = ber };
            QRFOL_OK
        }
        Err(e) => fail(e),
    }
}

/// Opaque modem handle.
pub struct QrfolModem {
    cfg: ModemConfig,
}

/// New modem with the default band plan (43 MHz carrier, 53/33 MHz tones,
/// 20 Mbps at 400 MHz sampling). NULL on an unknown scheme code.
#[no_mangle]
pub extern "C" fn qrfol_modem_new(scheme: c_int) -> *mut QrfolModem {
    match scheme_from_code(scheme) {
        Ok(s) => Box::into_raw(Box::new(QrfolModem {
            cfg: ModemConfig::new(s),
        })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Reconfigure the RF numerology; rejects configurations violating the
/// modem invariants and leaves the handle unchanged on failure.
///
/// # Safety
/// `modem` must be a live handle from [`qrfol_modem_new`].
#[no_mangle]
pub unsafe extern "C" fn qrfol_modem_set_rf(
    modem: *mut QrfolModem,
    carrier_hz: f64,
    mark_hz: f64,
    space_hz: f64,
    bit_rate_hz: f64,
    sample_rate_hz: f64,
) -> c_int {
    let Some(handle) = (unsafe { modem.as_mut() }) else {
        set_error("modem handle is null");
        return QRFOL_ERR_NULL_POINTER;
    };
    let candidate = ModemConfig {
        carrier_hz,
        mark_hz,
        space_hz,
        bit_rate_hz,
        sample_rate_hz,
        ..handle.cfg.clone()
    };
    match candidate.validate() {
        Ok(()) => {
            handle.cfg = candidate;
            QRFOL_OK
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `modem` must be null or a live handle from [`qrfol_modem_new`]; it must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qrfol_modem_free(modem: *mut QrfolModem) {
    if !modem.is_null() {
        drop(unsafe { Box::from_raw(modem) });
    }
}

/// Monte Carlo BER result (C layout).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QrfolBerReport {
    pub bits_tested: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci95: f64,
    pub snr_per_bit_db: f64,
}

/// Run a seeded BER measurement: `n_trials` pooled trials of `n_bits` each
/// through the full modulate/transmit/sync/demodulate/decide chain on
/// quadrature X, with the amplitude calibrated so the per-bit SNR (Eb/N0)
/// equals `snr_per_bit_db` against the scenario's noise model at
/// `squeezing_db`.
///
/// # Safety
/// `modem` must be a live handle; `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qrfol_ber_run(
    modem: *const QrfolModem,
    scenario: c_int,
    squeezing_db: f64,
    snr_per_bit_db: f64,
    n_bits: u64,
    n_trials: u64,
    seed: u64,
    out: *mut QrfolBerReport,
) -> c_int {
    let Some(handle) = (unsafe { modem.as_ref() }) else {
        set_error("modem handle is null");
        return QRFOL_ERR_NULL_POINTER;
    };
    if out.is_null() {
        set_error("out is null");
        return QRFOL_ERR_NULL_POINTER;
    }
    let result = (|| -> qrfol::Result<QrfolBerReport> {
        let scenario = scenario_from_code(scenario)?;
        let params = EprParams::from_db(squeezing_db)?;
        let amplitude =
            calibrate_amplitude(db_to_lin(snr_per_bit_db), scenario, params, &handle.cfg)?;
        let cfg = ModemConfig {
            amplitude,
            ..handle.cfg.clone()
        };
        let channel = Channel::new(scenario, params);
        let report = run_repeated(
            &cfg,
            &channel,
            Quadrature::X,
            n_bits as usize,
            n_trials as usize,
            seed,
        )?;
        Ok(QrfolBerReport {
            bits_tested: report.bits_tested,
            bit_errors: report.bit_errors,
            ber: report.ber,
            ci95: report.ci95,
            snr_per_bit_db: report.snr_per_bit_db,
        })
    })();
    match result {
        Ok(r) => {
            unsafe { *out = r };
            QRFOL_OK
        }
        Err(e) => fail(e),
    }
}
