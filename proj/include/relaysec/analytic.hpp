#pragma once

// Closed-form secrecy outage probability for the four schemes.
//
// Notation shared by the formulas below: X = g_sd + g_kD is the destination's
// SNR through relay k, Z = g_se, and lambda = (X - rho Z - (rho - 1)) / rho is
// the level the eavesdropper's relayed SNR must exceed for an outage. The
// density of X is B1 exp(-b_sd x) + B2 exp(-b_kD x).

#include "relaysec/core.hpp"
#include "relaysec/exp_dist.hpp"

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace relaysec {

class SlopeUndefinedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MaxETerms {
    double i1 = 0.0;
    double i2 = 0.0;
    double i3 = 0.0;
};

struct MinETerms {
    double i4 = 0.0;
    double i5 = 0.0;
};

/// Per-relay contributions behind a MAX-E or MIN-E result. Only the vector
/// matching the scheme is filled.
struct SchemeTermBreakdown {
    std::vector<MaxETerms> max_e;
    std::vector<MinETerms> min_e;
    double total = 0.0;  // unclipped
};

namespace detail {

using Cx = std::complex<double>;

/// Density terms B e^{-beta x} of X = g_sd + g_kD with e^{-beta (rho - 1)}
/// precomputed. Two real terms for distinct rates (B1 with beta_sd, B2 with
/// beta_kD), contour nodes when the rates are close.
struct LegitTerm {
    Cx b;
    Cx beta;
    Cx decay;
};

inline std::vector<LegitTerm> legit_terms(double beta_kD, double beta_sd, double rho) {
    const double rates[] = {beta_sd, beta_kD};
    std::vector<LegitTerm> out;
    for (const auto& t : hypoexp_pdf(rates).terms) out.push_back({t.coeff, t.rate, std::exp(-t.rate * (rho - 1.0))});
    return out;
}

/// E[e^{-c lambda}; lambda > 0] for the relay-k legitimate sum.
inline double tail_transform(const std::vector<LegitTerm>& x, double alpha_se, double rho, double c) {
    CompensatedSum<Cx> s;
    for (const auto& t : x)
        s += rho * alpha_se * t.b * t.decay / ((c + rho * t.beta) * (alpha_se + rho * t.beta));
    return s.value().real();
}

/// P[lambda < 0], i.e. the destination is outperformed even with no relayed copy at E.
inline double prob_lambda_negative(const std::vector<LegitTerm>& x, double alpha_se, double rho) {
    CompensatedSum<Cx> s;
    for (const auto& t : x) s += t.b / t.beta;
    for (const auto& t : x) s += -t.b * alpha_se * t.decay / (t.beta * (alpha_se + rho * t.beta));
    return s.value().real();
}

/// N = 1: the only relay is used regardless of the selection rule, so the
/// SOP is P[g_1e > lambda] = E[e^{-a lambda}; lambda > 0] + P[lambda < 0].
inline std::pair<double, double> single_relay_parts(const NetworkConfig& c, double rho) {
    const auto x = legit_terms(c.beta_kD(0), c.beta_sd, rho);
    return {tail_transform(x, c.alpha_se, rho, c.alpha_ke[0]), prob_lambda_negative(x, c.alpha_se, rho)};
}

inline void check_inputs(const NetworkConfig& config) {
    require_valid(config);
    require_analytic_size(config);
}

inline SopResult analytic_result(double raw) {
    SopResult r;
    r.engine = Engine::Analytic;
    r.raw = raw;
    r.value = clip_probability(raw);
    return r;
}

} // namespace detail

/// MAX-E: the eavesdropper picks the relay with the strongest R_k -> E link.
/// The SOP is sum_k (I1 + I2 + I3), where with Y the strongest of the other
/// relays' eavesdropper links and T = g_ke:
///   I1 = P[lambda > 0, Y < lambda < T]
///   I2 = P[lambda > 0, lambda < Y < T]
///   I3 = P[lambda < 0, Y < T]
inline SopResult sop_max_e(const NetworkConfig& config, const SecrecyTarget& target,
                           SchemeTermBreakdown* breakdown = nullptr) {
    detail::check_inputs(config);
    const double rho = target.rho();
    const double ase = config.alpha_se;
    const int n = config.n_relays;

    SchemeTermBreakdown local;
    local.max_e.resize(n);
    CompensatedSum<> total;

    if (n == 1) {
        const auto [tail, negative] = detail::single_relay_parts(config, rho);
        local.max_e[0] = {tail, 0.0, negative};
        total += tail;
        total += negative;
    } else {
        for (int k = 0; k < n; ++k) {
            const double ake = config.alpha_ke[k];
            const auto x = detail::legit_terms(config.beta_kD(k), config.beta_sd, rho);
            const auto others = excl_max_pdf(config.alpha_ke, static_cast<std::size_t>(k));

            // each X term contributes B e^{-beta (rho-1)} / (a_se + rho beta) times
            // a bracket in beta; summed over both terms of X, then over m
            CompensatedSum<detail::Cx> i1, i2, i3;
            for (const auto& term : others.terms) {
                const double am = term.rate;            // alpha'_m
                const double sign = term.coeff / am;    // -(-1)^m
                for (const auto& [b, beta, decay] : x) {
                    const auto d = ase + rho * beta;
                    i1 += sign * rho * ase * b * decay / d *
                          (1.0 / (ake + rho * beta) - 1.0 / (ake + am + rho * beta));
                    i2 += sign * rho * am * ase / (ake + am) * b * decay / ((ake + am + rho * beta) * d);
                    i3 += sign * am * ase / (ake + am) * (b / (ase * beta) - b * decay / (beta * d));
                }
            }
            local.max_e[k] = {i1.value().real(), i2.value().real(), i3.value().real()};
            total += local.max_e[k].i1;
            total += local.max_e[k].i2;
            total += local.max_e[k].i3;
        }
    }
    local.total = total.value();
    if (breakdown) *breakdown = std::move(local);
    return detail::analytic_result(total.value());
}

/// MIN-E: the system picks the relay with the weakest R_k -> E link. With
/// a the summed rate of the other relays' eavesdropper links,
///   I4 = P[lambda > 0, lambda < T < min_{i != k} g_ie]
///   I5 = P[lambda < 0, T < min_{i != k} g_ie]
inline SopResult sop_min_e(const NetworkConfig& config, const SecrecyTarget& target,
                           SchemeTermBreakdown* breakdown = nullptr) {
    detail::check_inputs(config);
    const double rho = target.rho();
    const double ase = config.alpha_se;
    const int n = config.n_relays;

    SchemeTermBreakdown local;
    local.min_e.resize(n);
    CompensatedSum<> total;

    if (n == 1) {
        const auto [tail, negative] = detail::single_relay_parts(config, rho);
        local.min_e[0] = {tail, negative};
        total += tail;
        total += negative;
    } else {
        for (int k = 0; k < n; ++k) {
            const double ake = config.alpha_ke[k];
            const double alpha = excl_min_rate(config.alpha_ke, static_cast<std::size_t>(k));
            const auto x = detail::legit_terms(config.beta_kD(k), config.beta_sd, rho);

            // beta_kD in the second bracket term; the derivation's X = g_kD + g_sd fixes it
            CompensatedSum<detail::Cx> s4, s5;
            for (const auto& [b, beta, decay] : x) {
                s4 += b * decay / ((rho * beta + ase) * ((ake + alpha) / rho + beta));
                s5 += b / beta - b * ase * decay / ((rho * beta + ase) * beta);
            }
            const double i4 = ase * ake / (alpha + ake) * s4.value().real();
            const double i5 = ake / (alpha + ake) * s5.value().real();
            local.min_e[k] = {i4, i5};
            total += i4;
            total += i5;
        }
    }
    local.total = total.value();
    if (breakdown) *breakdown = std::move(local);
    return detail::analytic_result(total.value());
}

/// MAX-MRC: D combines the direct and every relayed copy; E combines the
/// direct copy with its strongest relayed copy.
///   SOP = 1 - a_se sum_i C_i e^{-l_i (rho-1)} / (a_se + rho l_i)
///             [ 1 / l_i + sum_{S} (-1)^|S| rho / (a_S + rho l_i) ]
/// with l_i, C_i the hypoexponential rates/coefficients of
/// g_sd + sum_k g_kD and S over nonempty subsets of the relays.
inline SopResult sop_max_mrc(const NetworkConfig& config, const SecrecyTarget& target) {
    detail::check_inputs(config);
    using C = std::complex<double>;
    const double rho = target.rho();
    const double ase = config.alpha_se;
    const auto x_pdf = hypoexp_pdf(config.legitimate_rates());

    // (sign, a_S) over nonempty subsets of the eavesdropper relay links
    std::vector<std::pair<double, double>> subsets;
    for_each_subset(config.n_relays, [&](std::uint32_t mask, int m) {
        subsets.emplace_back((m % 2 == 0) ? 1.0 : -1.0, subset_rate(config.alpha_ke, mask));
    });

    CompensatedSum<C> acc;
    for (const auto& [coeff, l] : x_pdf.terms) {
        const C decay = std::exp(-l * (rho - 1.0));
        const C d_se = ase + rho * l;
        CompensatedSum<C> bracket;
        bracket += decay / (l * d_se);
        for (const auto& [sign, am] : subsets) bracket += sign * rho * decay / ((am + rho * l) * d_se);
        acc += coeff * bracket.value();
    }
    return detail::analytic_result(1.0 - ase * acc.value().real());
}

/// MRC-MRC: both D and E combine the direct and all relayed copies.
///   SOP = sum_i sum_p K_ip (1 / a_p - e^{-(rho-1) l_i} / (a_p + rho l_i))
/// with K_ip = prod_{j!=i} l_j prod_q a_q / (prod_{j!=i}(l_j - l_i) prod_{q!=p}(a_q - a_p)).
///
/// The sum over p is evaluated in closed form: with D_p the eavesdropper's
/// hypoexponential coefficients, sum_p D_p / a_p = 1 and
/// sum_p D_p / (a_p + s) = prod_q a_q / (a_q + s), so only the legitimate
/// mixture is summed. mrc_mrc_double_sum keeps the literal form.
inline SopResult sop_mrc_mrc(const NetworkConfig& config, const SecrecyTarget& target) {
    detail::check_inputs(config);
    using C = std::complex<double>;
    const double rho = target.rho();
    const auto eve = config.eavesdropper_rates();

    // num / den = C_i / l_i with C_i the hypoexponential coefficient
    CompensatedSum<C> acc;
    for (const auto& [coeff, l] : hypoexp_pdf(config.legitimate_rates()).terms) {
        C transform = 1.0;  // E[exp(-rho l_i g_E)]
        for (double a : eve) transform *= a / (a + rho * l);
        acc += coeff / l * (1.0 - std::exp(-(rho - 1.0) * l) * transform);
    }
    return detail::analytic_result(acc.value().real());
}

namespace detail {

/// MRC-MRC double sum over (i, p) as K_ip is written.
inline double mrc_mrc_double_sum(const NetworkConfig& config, const SecrecyTarget& target) {
    using C = std::complex<double>;
    const double rho = target.rho();
    // K_ip = (C_i / l_i) D_p with C, D the two hypoexponential coefficient sets
    const auto m_pdf = hypoexp_pdf(config.legitimate_rates());
    const auto e_pdf = hypoexp_pdf(config.eavesdropper_rates());
    CompensatedSum<C> acc;
    for (const auto& [ci, li] : m_pdf.terms)
        for (const auto& [dp, ap] : e_pdf.terms)
            acc += ci / li * dp * (1.0 / ap - std::exp(-(rho - 1.0) * li) / (ap + rho * li));
    return acc.value().real();
}

} // namespace detail

inline SopResult sop_analytic(const NetworkConfig& config, Scheme scheme, const SecrecyTarget& target) {
    switch (scheme) {
    case Scheme::MaxE: return sop_max_e(config, target);
    case Scheme::MinE: return sop_min_e(config, target);
    case Scheme::MaxMrc: return sop_max_mrc(config, target);
    case Scheme::MrcMrc: return sop_mrc_mrc(config, target);
    }
    throw std::invalid_argument("unknown scheme");
}

/// Decade slope -d log10(SOP) / d(SNR_dB / 10) from two points of a curve.
inline double slope_between(double sop_lo, double sop_hi, double snr_lo_db, double snr_hi_db) {
    if (!(snr_hi_db > snr_lo_db)) throw std::invalid_argument("slope window must have hi > lo");
    if (!(sop_lo > 0.0) || !(sop_hi > 0.0))
        throw SlopeUndefinedError("SOP underflows to zero inside the slope window");
    return -(std::log10(sop_hi) - std::log10(sop_lo)) / ((snr_hi_db - snr_lo_db) / 10.0);
}

/// High-SNR secrecy diversity estimate of `scheme` between two axis SNRs.
/// Uses the unclipped analytic value so underflow is reported rather than hidden.
inline double diversity_slope(Scheme scheme, const std::function<NetworkConfig(double)>& config_at,
                              const SecrecyTarget& target, double snr_lo_db, double snr_hi_db) {
    if (!(snr_hi_db > snr_lo_db)) throw std::invalid_argument("slope window must have hi > lo");
    const double lo = sop_analytic(config_at(snr_lo_db), scheme, target).raw;
    const double hi = sop_analytic(config_at(snr_hi_db), scheme, target).raw;
    return slope_between(lo, hi, snr_lo_db, snr_hi_db);
}

} // namespace relaysec
