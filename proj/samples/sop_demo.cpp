// Compares the three SOP engines on one network and prints the high-SNR slope.

#include "relaysec/analytic.hpp"
#include "relaysec/monte_carlo.hpp"
#include "relaysec/quadrature.hpp"

#include <cstdio>

int main() {
    using namespace relaysec;

    // three relays, hop SNRs of 20 dB, eavesdropper taps at 3/6/9 dB
    NetworkConfig net;
    net.n_relays = 3;
    net.beta_sk = {db_to_rate(20), db_to_rate(20), db_to_rate(20)};
    net.beta_kd = {db_to_rate(20), db_to_rate(17), db_to_rate(14)};
    net.beta_sd = db_to_rate(3);
    net.alpha_ke = {db_to_rate(3), db_to_rate(6), db_to_rate(9)};
    net.alpha_se = db_to_rate(0);

    const SecrecyTarget target(1.0);
    McSettings mc;
    mc.trials = 1'000'000;

    std::printf("%-8s %-12s %-12s %-12s\n", "scheme", "analytic", "quadrature", "monte carlo");
    for (Scheme s : kAllSchemes) {
        const auto a = sop_analytic(net, s, target);
        const auto q = sop_quadrature(net, s, target);
        const auto m = estimate_sop(net, s, target, mc, 0);
        std::printf("%-8s %-12.6g %-12.6g %.6g +- %.2g\n", std::string(to_string(s)).c_str(), a.value, q.value,
                    m.value, *m.ci_halfwidth);
    }

    // every link scales with the x-axis SNR
    const auto at = [&](double snr_db) {
        NetworkConfig c = net;
        const double scale = db_to_rate(snr_db - 20.0);
        for (auto* v : {&c.beta_sk, &c.beta_kd})
            for (double& r : *v) r *= scale;
        return c;
    };
    for (Scheme s : kAllSchemes)
        std::printf("slope %-8s %.3f\n", std::string(to_string(s)).c_str(),
                    diversity_slope(s, at, target, 30.0, 40.0));
}
