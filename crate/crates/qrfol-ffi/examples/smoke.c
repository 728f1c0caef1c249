#include <stdio.h>
#include <math.h>
#include "qrfol.h"

int main(void) {
    double cap = qrfol_channel_capacity(40e6, 3.0);
    if (fabs(cap - 80e6) > 1e-3) return 1;

    double r = 0.0;
    if (qrfol_squeeze_db_to_r(7.5, &r) != QRFOL_OK) return 2;

    double vx, vy;
    if (qrfol_scenario_noise_variance(QRFOL_SCENARIO_ENTANGLED, r, &vx, &vy) != QRFOL_OK) return 3;

    QrfolModem *m = qrfol_modem_new(QRFOL_SCHEME_BPSK);
    if (!m) return 4;
    QrfolBerReport rep;
    int st = qrfol_ber_run(m, QRFOL_SCENARIO_CLASSICAL, 0.0, 0.0, 20000, 1, 7, &rep);
    if (st != QRFOL_OK) {
        char buf[256];
        qrfol_last_error(buf, sizeof buf);
        fprintf(stderr, "ber_run failed: %s\n", buf);
        return 5;
    }
    qrfol_modem_free(m);
    printf("C smoke: capacity %.0f bps, entangled var %.4f, ber %.5f over %llu bits\n",
           cap, vx, rep.ber, (unsigned long long)rep.bits_tested);
    return 0;
}
