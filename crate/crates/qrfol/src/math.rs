//! Small numeric helpers shared across modules: dB conversions and the
//! complementary error function with its inverse.

/// Linear power ratio -> decibels.
pub fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Decibels -> linear power ratio.
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Inverse of [`erfc`] on (0, 2).
///
/// Bisection bracket followed by Newton refinement; accurate to ~1e-14
/// relative over the BER range this crate works in.
pub fn erfc_inv(y: f64) -> f64 {
    assert!(y > 0.0 && y < 2.0, "erfc_inv domain is (0, 2), got {y}");
    if (y - 1.0).abs() < 1e-300 {
        return 0.0;
    }
    // erfc is odd around (0, 1): erfc(-x) = 2 - erfc(x).
    if y > 1.0 {
        return -erfc_inv(2.0 - y);
    }
    // Bracket: erfc(0) = 1, erfc(30) < 1e-300 covers all representable y < 1.
    let (mut lo, mut hi) = (0.0f64, 30.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if erfc(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    // Newton: d/dx erfc(x) = -2/sqrt(pi) * exp(-x^2).
    const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
    for _ in 0..4 {
        let f = erfc(x) - y;
        let df = -TWO_OVER_SQRT_PI * (-x * x).exp();
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}
