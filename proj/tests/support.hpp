#pragma once

// Shared test helpers: random network generators and quadrature rules that do
// not depend on the library's integrator.

#include "relaysec/core.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testing_support {

using relaysec::NetworkConfig;

/// Random-config generator. Rates are log-uniform so that links span a few
/// orders of magnitude of mean SNR.
class ConfigGen {
public:
    explicit ConfigGen(std::uint64_t seed) : rng_(seed) {}

    double rate(double lo = 0.05, double hi = 20.0) {
        std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
        return std::exp(u(rng_));
    }

    int relays(int lo = 1, int hi = 4) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    NetworkConfig any(int n) {
        NetworkConfig c;
        c.n_relays = n;
        for (int k = 0; k < n; ++k) {
            c.beta_sk.push_back(rate());
            c.beta_kd.push_back(rate());
            c.alpha_ke.push_back(rate());
        }
        c.beta_sd = rate();
        c.alpha_se = rate();
        return c;
    }

    /// Every relay has the same dual-hop rate, hops split differently.
    NetworkConfig equal_dual_hop(int n) {
        NetworkConfig c = any(n);
        const double total = rate(0.1, 10.0);
        for (int k = 0; k < n; ++k) {
            const double share = uniform(0.1, 0.9);
            c.beta_sk[k] = share * total;
            c.beta_kd[k] = (1.0 - share) * total;
        }
        return c;
    }

    /// Identical relay statistics, so adding relays adds iid branches.
    NetworkConfig iid_relays(int n, double bsk, double bkd, double bsd, double ake, double ase) {
        return relaysec::uniform_config(n, bsk, bkd, bsd, ake, ase);
    }

    /// Rates drawn from a small set, so coincidences are common.
    NetworkConfig repeated(int n) {
        const double pool[] = {0.5, 1.0, 2.0};
        std::uniform_int_distribution<int> pick(0, 2);
        NetworkConfig c;
        c.n_relays = n;
        for (int k = 0; k < n; ++k) {
            c.beta_sk.push_back(pool[pick(rng_)] * 0.5);
            c.beta_kd.push_back(pool[pick(rng_)] * 0.5);
            c.alpha_ke.push_back(pool[pick(rng_)]);
        }
        c.beta_sd = pool[pick(rng_)];
        c.alpha_se = pool[pick(rng_)];
        return c;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// 20-point Gauss-Legendre on `panels` equal sub-intervals of [a, b].
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels = 1) {
    static constexpr double x[10] = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
                                     0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
                                     0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
                                     0.9931285991850949};
    static constexpr double w[10] = {0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
                                     0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
                                     0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
                                     0.0176140071391521};
    if (b <= a) return 0.0;
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        const double r = 0.5 * h;
        double s = 0.0;
        for (int i = 0; i < 10; ++i) s += w[i] * (f(c - r * x[i]) + f(c + r * x[i]));
        total += s * r;
    }
    return total;
}

/// Density of Exp(a) + Exp(b), a != b.
inline double pair_density(double a, double b, double x) {
    return a * b / (a - b) * (std::exp(-b * x) - std::exp(-a * x));
}

} // namespace testing_support
