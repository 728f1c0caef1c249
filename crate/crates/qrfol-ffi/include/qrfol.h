/* C API for the qrfol quantum RF-over-light simulator.
 *
 * Conventions:
 *  - Functions returning int32_t use status codes (QRFOL_OK == 0); the
 *    message behind the most recent failure on the calling thread can be
 *    fetched with qrfol_last_error().
 *  - QrfolModem is an opaque handle: create with qrfol_modem_new(), release
 *    with qrfol_modem_free(), never use after free.
 *  - All runs are deterministic in (seed, arguments).
 */

#ifndef QRFOL_H
#define QRFOL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define QRFOL_OK 0
#define QRFOL_ERR_NULL_POINTER 1
#define QRFOL_ERR_INVALID_ARGUMENT 2
#define QRFOL_ERR_SYNC 3
#define QRFOL_ERR_IO 4

/* Scenario codes. */
#define QRFOL_SCENARIO_CLASSICAL 0
#define QRFOL_SCENARIO_ENTANGLED 1
#define QRFOL_SCENARIO_THERMAL 2
#define QRFOL_SCENARIO_CLASSICAL_SINGLE 3

/* Scheme codes. */
#define QRFOL_SCHEME_BPSK 0
#define QRFOL_SCHEME_BFSK 1
#define QRFOL_SCHEME_BASK 2

typedef struct QrfolModem QrfolModem;

typedef struct QrfolBerReport {
  uint64_t bits_tested;
  uint64_t bit_errors;
  double ber;
  double ci95;            /* 1.96*sqrt(ber(1-ber)/bits); 3/bits at 0 errors */
  double snr_per_bit_db;  /* Eb/N0 actually realized, in dB */
} QrfolBerReport;

/* Copy the most recent error message (NUL-terminated) for this thread into
 * buf (truncating to cap if needed); returns the full length incl. NUL. */
size_t qrfol_last_error(char *buf, size_t cap);

/* Shannon capacity B*log2(1+SNR) in bits/s; NaN on invalid arguments. */
double qrfol_channel_capacity(double bandwidth_hz, double snr_linear);

/* Squeezing conversions: r = db*ln(10)/20 and its inverse. */
int32_t qrfol_squeeze_db_to_r(double db, double *out_r);
int32_t qrfol_r_to_squeeze_db(double r, double *out_db);

/* Per-quadrature detection-noise variance in shot-noise units for a
 * scenario at squeezing degree r (entangled: 2e^{-2r}; thermal:
 * (e^{-2r}+e^{2r})/2; classical: 2, or 1 under the single-mode baseline). */
int32_t qrfol_scenario_noise_variance(int32_t scenario, double r,
                                      double *out_x, double *out_y);

/* Coherent-detection BER curves at linear per-bit SNR gamma = Eb/N0:
 * BPSK erfc(sqrt(g))/2, BFSK erfc(sqrt(g/2))/2, BASK erfc(sqrt(g/4))/2. */
int32_t qrfol_theoretical_ber(int32_t scheme, double snr_per_bit_linear,
                              double *out_ber);

/* Modem lifecycle. Defaults: 43 MHz carrier, 53/33 MHz BFSK tones, 20 Mbps
 * at 400 MHz sampling, 64-bit BPSK sync preamble. */
QrfolModem *qrfol_modem_new(int32_t scheme);
int32_t qrfol_modem_set_rf(QrfolModem *modem, double carrier_hz,
                           double mark_hz, double space_hz,
                           double bit_rate_hz, double sample_rate_hz);
void qrfol_modem_free(QrfolModem *modem);

/* Seeded Monte Carlo BER through the full modulate/transmit/synchronize/
 * demodulate/decide chain; n_trials pooled trials of n_bits each. */
int32_t qrfol_ber_run(const QrfolModem *modem, int32_t scenario,
                      double squeezing_db, double snr_per_bit_db,
                      uint64_t n_bits, uint64_t n_trials, uint64_t seed,
                      QrfolBerReport *out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QRFOL_H */
