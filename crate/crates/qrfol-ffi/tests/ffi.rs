//! Exercises every exported function through the C ABI.

use qrfol_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0i8; 256];
    let n = unsafe { qrfol_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(buf.len()) - 1]
        .iter()
        .map(|&c| c as u8)
        .collect();
    String::from_utf8_lossy(&bytes).into_owned()
}

#[test]
fn capacity_and_errors() {
    let c = qrfol_channel_capacity(40e6, 3.0);
    assert!((c - 80e6).abs() < 1e-3);
    let bad = qrfol_channel_capacity(-1.0, 3.0);
    assert!(bad.is_nan());
    assert!(last_error().contains("bandwidth"));
}

#[test]
fn squeezing_conversions() {
    let mut r = 0.0;
    assert_eq!(unsafe { qrfol_squeeze_db_to_r(7.5, &mut r) }, QRFOL_OK);
    assert!((r - 0.8634694098727673).abs() < 1e-12);
    let mut db = 0.0;
    assert_eq!(unsafe { qrfol_r_to_squeeze_db(r, &mut db) }, QRFOL_OK);
    assert!((db - 7.5).abs() < 1e-12);
    assert_eq!(
        unsafe { qrfol_squeeze_db_to_r(-1.0, &mut r) },
        QRFOL_ERR_INVALID_ARGUMENT
    );
    assert_eq!(
        unsafe { qrfol_squeeze_db_to_r(1.0, std::ptr::null_mut()) },
        QRFOL_ERR_NULL_POINTER
    );
}

#[test]
fn scenario_variances() {
    let (mut vx, mut vy) = (0.0, 0.0);
    // Classical is r-independent: (2, 2).
    assert_eq!(
        unsafe { qrfol_scenario_noise_variance(0, 1.0, &mut vx, &mut vy) },
        QRFOL_OK
    );
    assert_eq!((vx, vy), (2.0, 2.0));
    // Entangled at e^(-2r) = 1/4: (0.5, 0.5).
    assert_eq!(
        unsafe { qrfol_scenario_noise_variance(1, std::f64::consts::LN_2, &mut vx, &mut vy) },
        QRFOL_OK
    );
    assert!((vx - 0.5).abs() < 1e-12 && vx == vy);
    // Thermal at r = 0: (1, 1). Single-mode classical baseline: (1, 1).
    unsafe {
        qrfol_scenario_noise_variance(2, 0.0, &mut vx, &mut vy);
    }
    assert_eq!((vx, vy), (1.0, 1.0));
    unsafe {
        qrfol_scenario_noise_variance(3, 2.0, &mut vx, &mut vy);
    }
    assert_eq!((vx, vy), (1.0, 1.0));
    assert_eq!(
        unsafe { qrfol_scenario_noise_variance(9, 0.0, &mut vx, &mut vy) },
        QRFOL_ERR_INVALID_ARGUMENT
    );
}

#[test]
fn theoretical_curves() {
    let mut ber = 0.0;
    assert_eq!(unsafe { qrfol_theoretical_ber(0, 1.0, &mut ber) }, QRFOL_OK);
    assert!((ber - 0.07864960352514258).abs() < 1e-10);
    let mut bfsk = 0.0;
    let mut bask = 0.0;
    unsafe {
        qrfol_theoretical_ber(1, 4.0, &mut bfsk);
        qrfol_theoretical_ber(2, 4.0, &mut bask);
        qrfol_theoretical_ber(0, 4.0, &mut ber);
    }
    assert!(ber < bfsk && bfsk < bask);
    assert_eq!(
        unsafe { qrfol_theoretical_ber(0, -1.0, &mut ber) },
        QRFOL_ERR_INVALID_ARGUMENT
    );
}

#[test]
fn modem_lifecycle_and_validation() {
    let modem = qrfol_modem_new(QRFOL_SCHEME_BPSK);
    assert!(!modem.is_null());
    // An out-of-band carrier is rejected and the handle stays usable.
    assert_eq!(
        unsafe { qrfol_modem_set_rf(modem, 80e6, 53e6, 33e6, 20e6, 400e6) },
        QRFOL_ERR_INVALID_ARGUMENT
    );
    assert!(last_error().contains("passband"));
    assert_eq!(
        unsafe { qrfol_modem_set_rf(modem, 40e6, 53e6, 33e6, 20e6, 400e6) },
        QRFOL_OK
    );
    unsafe { qrfol_modem_free(modem) };
    // Unknown scheme -> NULL.
    assert!(qrfol_modem_new(7).is_null());
    // Freeing NULL is a no-op.
    unsafe { qrfol_modem_free(std::ptr::null_mut()) };
}

#[test]
fn ber_run_matches_theory_and_is_deterministic() {
    let modem = qrfol_modem_new(QRFOL_SCHEME_BPSK);
    let mut report = QrfolBerReport::default();
    let status = unsafe {
        qrfol_ber_run(
            modem,
            QRFOL_SCENARIO_CLASSICAL,
            0.0,
            0.0,
            100_000,
            1,
            7,
            &mut report,
        )
    };
    assert_eq!(status, QRFOL_OK);
    assert_eq!(report.bits_tested, 100_000);
    let p: f64 = 0.07864960352514258;
    let sigma = (p * (1.0 - p) / 1e5).sqrt();
    assert!(
        (report.ber - p).abs() < 3.0 * sigma,
        "ber {} vs {p}",
        report.ber
    );
    assert!((report.snr_per_bit_db - 0.0).abs() < 1e-9);
    // Identical seed -> identical counts.
    let mut again = QrfolBerReport::default();
    unsafe {
        qrfol_ber_run(
            modem,
            QRFOL_SCENARIO_CLASSICAL,
            0.0,
            0.0,
            100_000,
            1,
            7,
            &mut again,
        )
    };
    assert_eq!(report.bit_errors, again.bit_errors);
    // Entangled scenario at the same Eb/N0 target gives the same statistics
    // (the target already includes the noise model).
    let mut ent = QrfolBerReport::default();
    let status = unsafe {
        qrfol_ber_run(
            modem,
            QRFOL_SCENARIO_ENTANGLED,
            6.0,
            0.0,
            50_000,
            2,
            9,
            &mut ent,
        )
    };
    assert_eq!(status, QRFOL_OK);
    assert!((ent.ber - p).abs() < 4.0 * (p * (1.0 - p) / 1e5).sqrt());
    unsafe { qrfol_modem_free(modem) };
}

#[test]
fn null_handles_are_rejected() {
    let mut report = QrfolBerReport::default();
    assert_eq!(
        unsafe { qrfol_ber_run(std::ptr::null(), 0, 0.0, 0.0, 1000, 1, 1, &mut report) },
        QRFOL_ERR_NULL_POINTER
    );
    let modem = qrfol_modem_new(0);
    assert_eq!(
        unsafe { qrfol_ber_run(modem, 0, 0.0, 0.0, 1000, 1, 1, std::ptr::null_mut()) },
        QRFOL_ERR_NULL_POINTER
    );
    unsafe { qrfol_modem_free(modem) };
}

#[test]
fn header_ships_with_the_crate() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qrfol.h");
    let text = std::fs::read_to_string(header).expect("include/qrfol.h present");
    // Every exported symbol appears in the header.
    for symbol in [
        "qrfol_last_error",
        "qrfol_channel_capacity",
        "qrfol_squeeze_db_to_r",
        "qrfol_r_to_squeeze_db",
        "qrfol_scenario_noise_variance",
        "qrfol_theoretical_ber",
        "qrfol_modem_new",
        "qrfol_modem_set_rf",
        "qrfol_modem_free",
        "qrfol_ber_run",
    ] {
        assert!(text.contains(symbol), "header missing {symbol}");
    }
}
