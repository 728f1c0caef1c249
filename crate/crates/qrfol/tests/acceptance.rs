//! Acceptance suite. Each test evaluates one criterion at its stated
//! tolerance and prints a single pass/fail line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use qrfol::ber::{self, Quadrature, SweepAxis, SweepSpec, DEFAULT_MASTER_SEED};
use qrfol::channel::{calibrate_amplitude, scenario_noise_variance, Channel, ChannelScenario};
use qrfol::gaussian::{
    channel_capacity, epr_correlation_variances, scenario_snr, thermal_submode_variance,
    CapacityQuery, EprParams,
};
use qrfol::image::{transmit_image, BinaryImage};
use qrfol::math::db_to_lin;
use qrfol::modem::{theoretical_ber, ModemConfig, Scheme};
use qrfol::rng::{ChannelSeed, CounterRng};
use std::time::Instant;

struct Criterion {
    name: &'static str,
    started: Instant,
    budget_s: f64,
}

impl Criterion {
    fn start(name: &'static str, budget_s: f64) -> Self {
        Self {
            name,
            started: Instant::now(),
            budget_s,
        }
    }

    fn finish(self) {
        let elapsed = self.started.elapsed().as_secs_f64();
        assert!(
            elapsed < self.budget_s,
            "{} exceeded runtime budget: {elapsed:.2}s >= {}s",
            self.name,
            self.budget_s
        );
        println!("PASS {} ({elapsed:.2}s)", self.name);
    }
}

fn classical() -> ChannelScenario {
    ChannelScenario::classical()
}

fn cfg_for(scheme: Scheme, gamma: f64) -> ModemConfig {
    let base = ModemConfig::new(scheme);
    let amplitude = calibrate_amplitude(
        gamma,
        classical(),
        EprParams::symmetric(0.0).unwrap(),
        &base,
    )
    .unwrap();
    ModemConfig { amplitude, ..base }
}

/// Criterion 1: closed forms match independent hand derivations at 20
/// randomized points to 1e-12 relative error, paper anchors included.
#[test]
fn criterion_1_formula_suite() {
    let c = Criterion::start("criterion 1: formula suite (20 random points, 1e-12)", 1.0);
    let rel = |a: f64, b: f64| ((a - b) / b.max(1e-300)).abs();
    let rng = CounterRng::from_parts(0xF0, 0);
    for i in 0..20u64 {
        let r = 3.0 * rng.uniform_at(3 * i);
        let sigma_s = 10.0 * rng.uniform_at(3 * i + 1);
        let params = EprParams::symmetric(r).unwrap();
        // Independent route: squared single-squeezer exponentials.
        let (em, ep) = ((-r).exp(), r.exp());
        let (em2, ep2) = (em * em, ep * ep);
        let v = epr_correlation_variances(params);
        assert!(rel(v.sum_x, 2.0 * em2) < 1e-12);
        assert!(rel(v.diff_x, 2.0 * ep2) < 1e-12);
        assert!(rel(v.sum_y, v.diff_x) < 1e-12 && rel(v.diff_y, v.sum_x) < 1e-12);
        // Thermal submode variance vs explicit exponentials.
        let t = thermal_submode_variance(params);
        assert!(rel(t, 0.5 * (em2 + ep2)) < 1e-12);
        // Scenario SNRs vs direct formulas.
        let joint = scenario_snr(sigma_s, params, ChannelScenario::EntangledJoint).unwrap();
        assert!(rel(joint, sigma_s * ep2 / 2.0) < 1e-12);
        let single = scenario_snr(sigma_s, params, ChannelScenario::ThermalSingle).unwrap();
        assert!(rel(single, 2.0 * sigma_s / (em2 + ep2)) < 1e-12);
        let cls = scenario_snr(sigma_s, params, classical()).unwrap();
        assert!(rel(cls, sigma_s / 2.0) < 1e-12);
        // Capacity vs the natural-log route.
        let b = 1.0 + 1e9 * rng.uniform_at(3 * i + 2);
        let cap = channel_capacity(CapacityQuery::new(b, sigma_s).unwrap());
        assert!(rel(cap, b * (1.0 + sigma_s).ln() / std::f64::consts::LN_2) < 1e-12);
    }
    // Paper anchors: 2e^(+-2r) forms and C = B log2(1+SNR).
    let params = EprParams::from_db(7.5).unwrap();
    let v = epr_correlation_variances(params);
    assert!(rel(v.sum_x, 2.0 * 10f64.powf(-0.75)) < 1e-12);
    assert!(rel(v.diff_x, 2.0 * 10f64.powf(0.75)) < 1e-12);
    assert!(
        rel(
            channel_capacity(CapacityQuery::new(40e6, 3.0).unwrap()),
            80e6
        ) < 1e-12
    );
    c.finish();
}

/// Criterion 2: 1e5-bit random payloads survive the noiseless chain with
/// zero errors for all three schemes.
#[test]
fn criterion_2_noiseless_loopback() {
    let c = Criterion::start(
        "criterion 2: noiseless loopback, 3 schemes x 1e5 bits",
        10.0,
    );
    let ch = Channel::noiseless();
    for scheme in [Scheme::Bpsk, Scheme::Bfsk, Scheme::Bask] {
        let cfg = ModemConfig::new(scheme);
        let report = ber::run_ber_trial(
            &cfg,
            &ch,
            Quadrature::X,
            100_000,
            ChannelSeed::new(0xACCE97, scheme as u64 * 8),
        )
        .unwrap();
        assert_eq!(
            report.bit_errors, 0,
            "{scheme}: {} errors in noiseless loopback",
            report.bit_errors
        );
    }
    c.finish();
}

/// Criterion 3: classical white-noise BPSK Monte Carlo lands within 3
/// binomial sigma of erfc(sqrt(g))/2 at 0/3/6 dB, and the empirical scheme
/// ordering at 6 dB is BPSK < BFSK < BASK.
#[test]
fn criterion_3_theory_vs_monte_carlo() {
    let c = Criterion::start(
        "criterion 3: theory vs Monte Carlo at {0,3,6} dB + scheme ordering",
        60.0,
    );
    let ch = Channel::new(classical(), EprParams::symmetric(0.0).unwrap());
    let n = 100_000usize;
    for (i, gamma_db) in [0.0, 3.0, 6.0].into_iter().enumerate() {
        let gamma = db_to_lin(gamma_db);
        let cfg = cfg_for(Scheme::Bpsk, gamma);
        let report = ber::run_ber_trial(
            &cfg,
            &ch,
            Quadrature::X,
            n,
            ChannelSeed::new(0x3A, 16 * i as u64),
        )
        .unwrap();
        let p = theoretical_ber(Scheme::Bpsk, gamma).unwrap();
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (report.ber - p).abs() <= 3.0 * sigma,
            "BPSK at {gamma_db} dB: ber {} vs theory {p} (3 sigma {})",
            report.ber,
            3.0 * sigma
        );
    }
    // Scheme ordering at 6 dB, one calibrated run each.
    let gamma = db_to_lin(6.0);
    let mut errors = Vec::new();
    for (i, scheme) in [Scheme::Bpsk, Scheme::Bfsk, Scheme::Bask]
        .into_iter()
        .enumerate()
    {
        let cfg = cfg_for(scheme, gamma);
        let report = ber::run_ber_trial(
            &cfg,
            &ch,
            Quadrature::X,
            n,
            ChannelSeed::new(0x0D, 16 * i as u64),
        )
        .unwrap();
        errors.push(report.bit_errors);
    }
    assert!(
        errors[0] < errors[1] && errors[1] < errors[2],
        "expected BPSK < BFSK < BASK errors at 6 dB, got {errors:?}"
    );
    c.finish();
}

/// Criterion 4: the six paper points (empirical calibration path,
/// 5 x 1e5 bits per point) land inside their stated tolerance windows.
#[test]
fn criterion_4_paper_reproduction() {
    let c = Criterion::start(
        "criterion 4: paper reproduction, 6 points at 5x1e5 bits",
        300.0,
    );
    let result =
        ber::reproduce_paper_points(DEFAULT_MASTER_SEED, &ModemConfig::new(Scheme::Bpsk)).unwrap();
    // Fit sanity against the independently computed inversion.
    assert!((result.gamma_classical_db[0] - 2.7598).abs() < 5e-3);
    assert!((result.gamma_classical_db[1] - 2.3434).abs() < 5e-3);
    for p in &result.points {
        println!(
            "  point {} {}: simulated {:.4e}, window [{:.3e}, {:.3e}], paper {:.3e} -> {}",
            p.quadrature.label(),
            p.scenario,
            p.report.ber,
            p.window_low,
            p.window_high,
            p.paper_ber,
            if p.pass { "pass" } else { "FAIL" }
        );
    }
    assert!(
        result.all_pass(),
        "paper reproduction failed at default seed {DEFAULT_MASTER_SEED}"
    );
    c.finish();
}

/// Criterion 5: zero-input noise statistics. Empirical variance within 1% of
/// the scenario variance at 1e6 samples for each scenario at r in {0, 0.5, 1};
/// x/y sample cross-correlation within +-4/sqrt(1e6).
#[test]
fn criterion_5_noise_statistics() {
    let c = Criterion::start(
        "criterion 5: zero-input noise variance (1%) and x/y independence",
        120.0,
    );
    let n = 1_000_000usize;
    let zeros = qrfol::Waveform::new(vec![0.0; n], 400e6);
    let mut stream = 0u64;
    for r in [0.0, 0.5, 1.0] {
        let params = EprParams::symmetric(r).unwrap();
        for scenario in [
            ChannelScenario::EntangledJoint,
            classical(),
            ChannelScenario::ThermalSingle,
        ] {
            let ch = Channel::new(scenario, params);
            let (ox, oy) = ch
                .transmit(&zeros, &zeros, ChannelSeed::new(0x57A7, stream))
                .unwrap();
            stream += 8;
            let expected = scenario_noise_variance(scenario, params).0;
            let var_x = ox.samples.iter().map(|s| s * s).sum::<f64>() / n as f64;
            let var_y = oy.samples.iter().map(|s| s * s).sum::<f64>() / n as f64;
            for (q, var) in [("x", var_x), ("y", var_y)] {
                assert!(
                    (var - expected).abs() / expected < 0.01,
                    "{} r={r} {q}: variance {var} vs expected {expected}",
                    scenario.label()
                );
            }
            let cross = ox
                .samples
                .iter()
                .zip(&oy.samples)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64;
            let corr = cross / (var_x * var_y).sqrt();
            assert!(
                corr.abs() <= 4.0 / (n as f64).sqrt(),
                "{} r={r}: x/y correlation {corr}",
                scenario.label()
            );
        }
    }
    c.finish();
}

/// Criterion 6: the 250x400 test image transmitted under the three
/// calibrated scenarios orders entangled < classical < thermal, each rate
/// within 3 sigma of its BER point; the noiseless run is bit-identical.
#[test]
fn criterion_6_image_end_to_end() {
    let c = Criterion::start(
        "criterion 6: 250x400 image under three calibrated scenarios",
        60.0,
    );
    let image = BinaryImage::test_pattern(250, 400);
    let n_bits = 100_000f64;
    let base = ModemConfig::new(Scheme::Bpsk);

    // Noiseless: bit-identical.
    let (received, rate) = transmit_image(
        &image,
        &base,
        &Channel::noiseless(),
        ChannelSeed::new(1, 0),
        Quadrature::X,
    )
    .unwrap();
    assert_eq!(received, image);
    assert_eq!(rate, 0.0);

    // Calibrated scenarios: same targets as the reproduction run.
    let reproduce = ber::reproduce_paper_points(DEFAULT_MASTER_SEED, &base).unwrap();
    let mut rates = Vec::new();
    for (i, scenario_label) in ["entangled", "classical", "thermal"].iter().enumerate() {
        let point = reproduce
            .points
            .iter()
            .find(|p| p.quadrature == Quadrature::X && p.scenario == *scenario_label)
            .expect("reproduction has all x points");
        let params = EprParams::symmetric(0.0).unwrap();
        let amplitude =
            calibrate_amplitude(db_to_lin(point.target_snr_db), classical(), params, &base)
                .unwrap();
        let cfg = ModemConfig {
            amplitude,
            ..base.clone()
        };
        let ch = Channel::new(classical(), params);
        let (_, rate) = transmit_image(
            &image,
            &cfg,
            &ch,
            ChannelSeed::new(0x1397, 32 * i as u64),
            Quadrature::X,
        )
        .unwrap();
        let p_ref = point.report.ber;
        let sigma = (p_ref * (1.0 - p_ref) / n_bits).sqrt();
        assert!(
            (rate - p_ref).abs() <= 3.0 * sigma,
            "{scenario_label}: pixel rate {rate} vs BER point {p_ref} (3 sigma {})",
            3.0 * sigma
        );
        println!("  image {scenario_label}: pixel error rate {rate:.4e} (BER point {p_ref:.4e})");
        rates.push(rate);
    }
    assert!(
        rates[0] < rates[1] && rates[1] < rates[2],
        "expected entangled < classical < thermal, got {rates:?}"
    );
    c.finish();
}

/// Criterion 7: `sweep` and `reproduce` produce byte-identical output files
/// across two consecutive runs with fixed seeds.
#[test]
fn criterion_7_determinism() {
    let c = Criterion::start(
        "criterion 7: byte-identical sweep and reproduce reruns",
        120.0,
    );
    let bin = env!("CARGO_BIN_EXE_qrfol");
    let dir = std::env::temp_dir().join(format!("qrfol-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |args: &[&str], out: &std::path::Path| {
        let status = std::process::Command::new(bin)
            .args(args)
            .arg("--out")
            .arg(out)
            .status()
            .expect("spawn qrfol");
        assert!(status.success(), "{args:?} exited with {status}");
        std::fs::read(out).unwrap()
    };
    let sweep_args = [
        "sweep",
        "--axis",
        "snr_db",
        "--start",
        "0",
        "--stop",
        "4",
        "--step",
        "2",
        "--bits-per-point",
        "2000",
        "--trials",
        "2",
        "--schemes",
        "bpsk,bask",
        "--scenarios",
        "classical,entangled",
        "--seed",
        "5",
    ];
    let a = run(&sweep_args, &dir.join("sweep_a.csv"));
    let b = run(&sweep_args, &dir.join("sweep_b.csv"));
    assert_eq!(a, b, "sweep outputs differ between runs");
    let reproduce_args = ["reproduce", "--seed", "11", "--format", "csv"];
    let a = run(&reproduce_args, &dir.join("rep_a.csv"));
    let b = run(&reproduce_args, &dir.join("rep_b.csv"));
    assert_eq!(a, b, "reproduce outputs differ between runs");
    std::fs::remove_dir_all(&dir).ok();
    c.finish();
}

// Library-level determinism for the sweep API (same spec -> identical CSV),
// complementing the process-level check above.
#[test]
fn sweep_api_is_deterministic() {
    let spec = SweepSpec {
        axis: SweepAxis::SnrDb,
        start: 0.0,
        stop: 3.0,
        step: 1.5,
        bits_per_point: 2000,
        trials_per_point: 2,
        schemes: vec![Scheme::Bpsk],
        scenarios: vec![classical()],
        master_seed: 33,
        quadrature: Quadrature::Y,
        signal_snr_db: 6.0,
        base_cfg: ModemConfig::default(),
    };
    let a = ber::sweep_to_csv(&ber::sweep(&spec).unwrap());
    let b = ber::sweep_to_csv(&ber::sweep(&spec).unwrap());
    assert_eq!(a, b);
}
