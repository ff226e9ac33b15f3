#pragma once

// Numerical-integration reference for the SOP of each scheme. Works from the
// defining probabilities rather than the closed forms: inner layers that are
// plain exponential CDFs are evaluated exactly and at most two dimensions are
// integrated numerically.

#include "relaysec/core.hpp"
#include "relaysec/exp_dist.hpp"
#include "relaysec/integrate.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace relaysec {

struct QuadSettings {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_depth = 40;
    double tail_cutoff_mass = 1e-14;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
        if (max_depth < 1) throw std::invalid_argument("max_depth must be positive");
        if (!(tail_cutoff_mass > 0.0) || tail_cutoff_mass > 1e-6)
            throw std::invalid_argument("tail_cutoff_mass must lie in (0, 1e-6]");
    }
};

namespace detail {

/// Running estimate/error of a layered integral.
struct QuadAccumulator {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;

    void add(const IntegrationResult& r) {
        value += r.value;
        error += r.error;
        converged = converged && r.converged;
    }
};

class QuadEngine {
public:
    QuadEngine(const NetworkConfig& config, const SecrecyTarget& target, const QuadSettings& settings)
        : c_(config), rho_(target.rho()), s_(settings) {}

    /// Absolute accuracy floor set by rounding in the closed-form CDFs.
    [[nodiscard]] double noise_floor() const { return noise_; }

    /// P[X < rho (v + Z) + rho - 1] for Z ~ Exp(alpha_se), integrated over z.
    /// `cdf_x` is the CDF of the destination's combined SNR.
    template <class Cdf>
    double legit_below(const Cdf& cdf_x, double v) {
        const double ase = c_.alpha_se;
        const double z_max = -std::log(s_.tail_cutoff_mass) / ase;
        auto integrand = [&](double z) { return ase * std::exp(-ase * z) * cdf_x(rho_ * (v + z) + rho_ - 1.0); };
        const auto r = integrate_adaptive(integrand, 0.0, z_max, 0.25 * tolerance(), 0.25 * s_.rel_tol, s_.max_depth);
        inner_error_ = std::max(inner_error_, r.error + s_.tail_cutoff_mass);
        inner_converged_ = inner_converged_ && r.converged;
        return r.value;
    }

    /// Relay-selection schemes: sum_k int a_k e^{-a_k t} W_k(t) P[lambda_k < t] dt,
    /// where W_k(t) is the probability that relay k wins the selection when
    /// its eavesdropper SNR is t. `decay(k)` is the rate at which
    /// a_k e^{-a_k t} W_k(t) dies out and sets where t is truncated.
    template <class Win, class Decay>
    QuadAccumulator selection(const Win& win_probability, const Decay& decay) {
        QuadAccumulator acc;
        for (int k = 0; k < c_.n_relays; ++k) {
            const double a = c_.alpha_ke[k];
            const std::vector<double> legit{c_.beta_sd, c_.beta_kD(k)};
            const auto x_pdf = hypoexp_pdf(legit);
            noise_ = std::max(noise_, 10.0 * x_pdf.integral_roundoff());
            const auto cdf_x = [&](double x) { return x_pdf.integral_to(x); };
            const double t_max = -std::log(s_.tail_cutoff_mass) / decay(k);
            auto integrand = [&](double t) {
                return a * std::exp(-a * t) * win_probability(k, t) * legit_below(cdf_x, t);
            };
            auto r = integrate_adaptive(integrand, 0.0, t_max, tolerance() / c_.n_relays, s_.rel_tol, s_.max_depth);
            r.error += s_.tail_cutoff_mass;
            acc.add(r);
        }
        return finish(acc);
    }

    QuadAccumulator max_mrc() {
        const auto x_pdf = hypoexp_pdf(c_.legitimate_rates());
        noise_ = std::max(noise_, 10.0 * x_pdf.integral_roundoff());
        const auto cdf_x = [&](double x) { return x_pdf.integral_to(x); };
        const auto& rates = c_.alpha_ke;
        // density of the strongest eavesdropper relay link, by the product rule
        auto max_pdf = [&](double y) {
            double s = 0.0;
            for (std::size_t i = 0; i < rates.size(); ++i) {
                double term = rates[i] * std::exp(-rates[i] * y);
                for (std::size_t j = 0; j < rates.size(); ++j)
                    if (j != i) term *= -std::expm1(-rates[j] * y);
                s += term;
            }
            return s;
        };
        auto max_survival = [&](double y) {
            double p = 1.0;
            for (double r : rates) p *= -std::expm1(-r * y);
            return 1.0 - p;
        };
        double min_rate = rates.front();
        for (double r : rates) min_rate = std::min(min_rate, r);
        const double y_max = tail_cutoff(max_survival, 1.0 / min_rate, s_.tail_cutoff_mass);
        auto integrand = [&](double y) { return max_pdf(y) * legit_below(cdf_x, y); };
        QuadAccumulator acc;
        auto r = integrate_adaptive(integrand, 0.0, y_max, tolerance(), s_.rel_tol, s_.max_depth);
        r.error += s_.tail_cutoff_mass;
        acc.add(r);
        return finish(acc);
    }

    /// int F_M(rho x + rho - 1) f_E(x) dx with both combined SNRs hypoexponential.
    QuadAccumulator mrc_mrc() {
        const auto m_pdf = hypoexp_pdf(c_.legitimate_rates());
        const auto e_pdf = hypoexp_pdf(c_.eavesdropper_rates());
        const double x_max = tail_cutoff([&](double x) { return e_pdf.tail(x); }, 1.0 / e_pdf.min_rate(),
                                         s_.tail_cutoff_mass);
        noise_ = 10.0 * (m_pdf.integral_roundoff() + e_pdf.density_roundoff() * x_max);
        auto integrand = [&](double x) { return m_pdf.integral_to(rho_ * x + rho_ - 1.0) * e_pdf.density(x); };
        QuadAccumulator acc;
        auto r = integrate_adaptive(integrand, 0.0, x_max, tolerance(), s_.rel_tol, s_.max_depth);
        r.error += s_.tail_cutoff_mass;
        acc.add(r);
        return acc;
    }

private:
    QuadAccumulator finish(QuadAccumulator acc) const {
        acc.error += inner_error_;
        acc.converged = acc.converged && inner_converged_;
        return acc;
    }

    const NetworkConfig& c_;
    double rho_;
    QuadSettings s_;
    double tolerance() const { return std::max(s_.abs_tol, noise_); }

    double inner_error_ = 0.0;
    bool inner_converged_ = true;
    double noise_ = 0.0;
};

} // namespace detail

/// SOP by numerical integration of the defining probability of `scheme`.
/// Throws ConvergenceError (with the best estimate) if the tolerance is missed.
inline SopResult sop_quadrature(const NetworkConfig& config, Scheme scheme, const SecrecyTarget& target,
                                const QuadSettings& settings = {}) {
    require_valid(config);
    require_analytic_size(config);
    settings.validate();

    detail::QuadEngine engine(config, target, settings);
    const auto& a = config.alpha_ke;
    detail::QuadAccumulator acc;
    switch (scheme) {
    case Scheme::MaxE:
        // relay k wins if every other eavesdropper link is weaker than t
        acc = engine.selection([&](int k, double t) {
            double p = 1.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (static_cast<int>(i) != k) p *= -std::expm1(-a[i] * t);
            return p;
        }, [&](int k) { return a[k]; });
        break;
    case Scheme::MinE: {
        double total = 0.0;
        for (double r : a) total += r;
        // relay k wins if every other eavesdropper link is stronger than t
        acc = engine.selection([&](int k, double t) {
            double p = 1.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (static_cast<int>(i) != k) p *= std::exp(-a[i] * t);
            return p;
        }, [&](int) { return total; });
        break;
    }
    case Scheme::MaxMrc: acc = engine.max_mrc(); break;
    case Scheme::MrcMrc: acc = engine.mrc_mrc(); break;
    }

    // the requested absolute tolerance cannot beat the rounding floor of the
    // closed-form CDFs
    const double bound = settings.rel_tol * std::abs(acc.value) + std::max(settings.abs_tol, engine.noise_floor());
    if (!acc.converged && acc.error > bound) {
        throw ConvergenceError("quadrature did not reach tolerance for " + std::string(to_string(scheme)),
                               acc.value, acc.error);
    }
    SopResult r;
    r.engine = Engine::Quadrature;
    r.raw = acc.value;
    r.value = clip_probability(acc.value);
    r.error_bound = acc.error;
    return r;
}

} // namespace relaysec
