#pragma once

// Distributions built from independent, non-identical exponential variables:
// the maximum and the exclusion maximum/minimum used for relay selection, and
// sums of exponentials (two-term and general hypoexponential).

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace relaysec {

/// Relative separation below which sum_pair_coeffs reports Erlang-2.
inline constexpr double kRateEqualTol = 1e-9;

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

[[nodiscard]] inline double real_part(double v) { return v; }
[[nodiscard]] inline double real_part(std::complex<double> v) { return v.real(); }

[[nodiscard]] inline double expm1(double x) { return std::expm1(x); }

/// exp(z) - 1 without cancellation for small |z|.
[[nodiscard]] inline std::complex<double> expm1(std::complex<double> z) {
    const double s = std::sin(0.5 * z.imag());
    return {std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * s * s, std::exp(z.real()) * std::sin(z.imag())};
}

inline void require_rates(std::span<const double> rates) {
    if (rates.empty()) throw std::invalid_argument("rate list must not be empty");
    for (double r : rates)
        if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("rates must be finite and positive");
}

} // namespace detail

/// Neumaier summation. Works for double and std::complex<double>.
template <class T = double>
class CompensatedSum {
public:
    void add(T v) {
        if constexpr (detail::is_complex<T>::value) {
            re_.add(v.real());
            im_.add(v.imag());
        } else {
            const T t = sum_ + v;
            if (std::abs(sum_) >= std::abs(v))
                comp_ += (sum_ - t) + v;
            else
                comp_ += (v - t) + sum_;
            sum_ = t;
        }
    }
    CompensatedSum& operator+=(T v) {
        add(v);
        return *this;
    }
    [[nodiscard]] T value() const {
        if constexpr (detail::is_complex<T>::value)
            return T(re_.value(), im_.value());
        else
            return sum_ + comp_;
    }

private:
    struct Empty {};
    T sum_{};
    T comp_{};
    std::conditional_t<detail::is_complex<T>::value, CompensatedSum<double>, Empty> re_{}, im_{};
};

template <class T>
struct ExpTerm {
    T coeff;
    T rate;
};

/// f(x) = sum_i c_i exp(-r_i x) on x >= 0. Coefficients and rates are
/// complex for contour nodes (see hypoexp_pdf); imaginary parts cancel in
/// every observable.
template <class T = double>
struct ExpMixture {
    std::vector<ExpTerm<T>> terms;

    [[nodiscard]] double density(double x) const {
        CompensatedSum<T> s;
        for (const auto& t : terms) s += t.coeff * std::exp(-t.rate * x);
        return detail::real_part(s.value());
    }
    double operator()(double x) const { return density(x); }

    /// Integral of f over [x, inf).
    [[nodiscard]] double tail(double x) const {
        CompensatedSum<T> s;
        for (const auto& t : terms) s += t.coeff / t.rate * std::exp(-t.rate * x);
        return detail::real_part(s.value());
    }

    /// Integral of f over [0, inf).
    [[nodiscard]] double mass() const { return tail(0.0); }

    /// Integral of f over [0, x]. Exactly zero at the origin.
    [[nodiscard]] double integral_to(double x) const {
        if (x <= 0.0) return 0.0;
        CompensatedSum<T> s;
        for (const auto& t : terms) s += t.coeff / t.rate * -detail::expm1(-t.rate * x);
        return detail::real_part(s.value());
    }

    /// Expected absolute rounding error of tail()/integral_to(): the
    /// cancellation in sum_i c_i / r_i.
    [[nodiscard]] double integral_roundoff() const {
        double s = 0.0;
        for (const auto& t : terms) s += std::abs(t.coeff / t.rate);
        return s * std::numeric_limits<double>::epsilon() * static_cast<double>(terms.size() + 1);
    }

    /// Expected absolute rounding error of density().
    [[nodiscard]] double density_roundoff() const {
        double s = 0.0;
        for (const auto& t : terms) s += std::abs(t.coeff);
        return s * std::numeric_limits<double>::epsilon() * static_cast<double>(terms.size() + 1);
    }

    [[nodiscard]] double min_rate() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& t : terms) m = std::min(m, detail::real_part(t.rate));
        return m;
    }
};

/// Visits every nonempty subset of {0..n-1} as (bitmask, popcount).
template <class F>
void for_each_subset(int n, F&& visit) {
    const std::uint32_t end = std::uint32_t{1} << n;
    for (std::uint32_t mask = 1; mask < end; ++mask) visit(mask, std::popcount(mask));
}

[[nodiscard]] inline double subset_rate(std::span<const double> rates, std::uint32_t mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i)
        if (mask & (std::uint32_t{1} << i)) s += rates[i];
    return s;
}

inline void require_subset_size(std::size_t n) {
    if (n > 24) throw std::invalid_argument("too many rates for subset enumeration");
}

/// CDF of max_i X_i with X_i ~ Exp(rates[i]), by inclusion-exclusion over subsets:
/// 1 + sum_{S nonempty} (-1)^|S| exp(-x sum_{i in S} rate_i).
[[nodiscard]] inline double max_exp_cdf(std::span<const double> rates, double x) {
    detail::require_rates(rates);
    require_subset_size(rates.size());
    if (!(x >= 0.0)) throw std::invalid_argument("x must be nonnegative");
    CompensatedSum<> s;
    s += 1.0;
    for_each_subset(static_cast<int>(rates.size()), [&](std::uint32_t mask, int m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        s += sign * std::exp(-x * subset_rate(rates, mask));
    });
    return std::clamp(s.value(), 0.0, 1.0);
}

namespace detail {

inline std::vector<double> without_index(std::span<const double> rates, std::size_t k) {
    if (rates.size() < 2)
        throw std::invalid_argument("exclusion needs at least two rates (nothing left after removing one)");
    if (k >= rates.size()) throw std::out_of_range("relay index out of range");
    std::vector<double> rest;
    rest.reserve(rates.size() - 1);
    for (std::size_t i = 0; i < rates.size(); ++i)
        if (i != k) rest.push_back(rates[i]);
    return rest;
}

} // namespace detail

/// PDF of max_{i != k} X_i as an exponential mixture. `k` is zero-based.
/// Each nonempty subset S of the remaining indices contributes
/// -(-1)^|S| a_S exp(-a_S x) with a_S the subset's rate sum.
[[nodiscard]] inline ExpMixture<double> excl_max_pdf(std::span<const double> rates, std::size_t k) {
    detail::require_rates(rates);
    const auto rest = detail::without_index(rates, k);
    require_subset_size(rest.size());
    ExpMixture<double> out;
    out.terms.reserve((std::size_t{1} << rest.size()) - 1);
    for_each_subset(static_cast<int>(rest.size()), [&](std::uint32_t mask, int m) {
        const double a = subset_rate(rest, mask);
        const double sign = (m % 2 == 0) ? -1.0 : 1.0;
        out.terms.push_back({sign * a, a});
    });
    return out;
}

/// Rate of min_{i != k} X_i, which is exponential with the summed rate.
[[nodiscard]] inline double excl_min_rate(std::span<const double> rates, std::size_t k) {
    detail::require_rates(rates);
    const auto rest = detail::without_index(rates, k);
    CompensatedSum<> s;
    for (double r : rest) s += r;
    return s.value();
}

/// PDF of X_a + X_b for X_a ~ Exp(rate_a), X_b ~ Exp(rate_b):
/// f(x) = b1 exp(-rate1 x) + b2 exp(-rate2 x), with rate1 = rate_b, rate2 = rate_a.
/// When the rates coincide the sum is Erlang-2 and `degenerate` is set.
struct SumPairCoeffs {
    double b1 = 0.0;
    double b2 = 0.0;
    double rate1 = 0.0;
    double rate2 = 0.0;
    bool degenerate = false;

    [[nodiscard]] double pdf(double x) const {
        if (x < 0.0) return 0.0;
        if (degenerate) return rate2 * rate2 * x * std::exp(-rate2 * x);
        return b1 * std::exp(-rate1 * x) + b2 * std::exp(-rate2 * x);
    }

    [[nodiscard]] double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        if (degenerate) {
            const double u = rate2 * x;
            return -std::expm1(-u) - u * std::exp(-u);
        }
        return -(b1 / rate1) * std::expm1(-rate1 * x) - (b2 / rate2) * std::expm1(-rate2 * x);
    }
};

[[nodiscard]] inline SumPairCoeffs sum_pair_coeffs(double rate_a, double rate_b) {
    if (!(rate_a > 0.0) || !(rate_b > 0.0) || !std::isfinite(rate_a) || !std::isfinite(rate_b))
        throw std::invalid_argument("rates must be finite and positive");
    SumPairCoeffs c;
    c.rate1 = rate_b;
    c.rate2 = rate_a;
    if (std::abs(rate_a - rate_b) <= kRateEqualTol * std::max(rate_a, rate_b)) {
        c.degenerate = true;
        c.rate1 = c.rate2 = rate_a;
        return c;
    }
    c.b1 = rate_a * rate_b / (rate_a - rate_b);
    c.b2 = rate_a * rate_b / (rate_b - rate_a);
    return c;
}

using HypoexpMixture = ExpMixture<std::complex<double>>;

/// Rates whose relative gap to a neighbour is below this are evaluated
/// together on a contour instead of through 1 / (l_j - l_i) coefficients.
inline constexpr double kClusterGap = 0.05;

namespace detail {

/// Groups of indices whose sorted rates chain together within kClusterGap.
inline std::vector<std::vector<std::size_t>> rate_groups(std::span<const double> rates) {
    std::vector<std::size_t> order(rates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rates[a] < rates[b]; });
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const bool joins = i > 0 && rates[order[i]] - rates[order[i - 1]] < kClusterGap * rates[order[i]];
        if (!joins) groups.emplace_back();
        groups.back().push_back(order[i]);
    }
    return groups;
}

} // namespace detail

/// PDF of sum_i X_i, X_i ~ Exp(rates[i]) independent, as
///   f(x) = sum_i C_i e^{-l_i x},  C_i = prod_j l_j / prod_{j != i} (l_j - l_i).
/// Isolated rates keep their term. A group of close or equal rates G is
/// replaced by trapezoid nodes of the contour integral
///   sum_{i in G} C_i h(l_i) = prod_j l_j (-1)^{n-1} / (2 pi i) oint h(z) / prod_j (z - l_j) dz
/// on a circle around G that excludes the other rates and the origin. Any h
/// analytic in Re z > 0 (exponentials, 1 / (a + rho z), ...) then sums over
/// the returned terms exactly as over the true rates, without the cancellation
/// that 1 / (l_j - l_i) causes when rates nearly coincide.
[[nodiscard]] inline HypoexpMixture hypoexp_pdf(std::span<const double> rates) {
    using C = std::complex<double>;
    detail::require_rates(rates);
    const std::size_t n = rates.size();
    double prod_all = 1.0;
    for (double l : rates) prod_all *= l;

    HypoexpMixture out;
    for (const auto& group : detail::rate_groups(rates)) {
        if (group.size() == 1) {
            const double li = rates[group[0]];
            double denom = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != group[0]) denom *= rates[j] - li;
            out.terms.push_back({C(prod_all / denom), C(li)});
            continue;
        }
        double centre = 0.0;
        for (std::size_t i : group) centre += rates[i];
        centre /= static_cast<double>(group.size());
        double inner = 0.0;
        for (std::size_t i : group) inner = std::max(inner, std::abs(rates[i] - centre));
        double outer = centre;  // the origin must stay outside
        for (std::size_t j = 0; j < n; ++j)
            if (std::find(group.begin(), group.end(), j) == group.end())
                outer = std::min(outer, std::abs(rates[j] - centre));
        outer *= 0.9;

        // trapezoid error decays like (inner / r)^Q + (r / outer)^Q
        const double radius = inner <= 0.25 * outer ? 0.5 * outer : std::sqrt(inner * outer);
        const double ratio = std::max(inner / radius, radius / outer);
        if (!(ratio < 0.99)) throw std::invalid_argument("rates chain too widely for contour evaluation");
        const auto q = static_cast<int>(
            std::clamp(std::ceil(std::log(1e-18) / std::log(ratio) / 4.0) * 4.0, 16.0, 4096.0));
        const double sign = (n % 2 == 1) ? 1.0 : -1.0;
        for (int k = 0; k < q; ++k) {
            const C w = std::polar(radius, 2.0 * std::numbers::pi * (k + 0.5) / q);
            const C z = centre + w;
            C denom = 1.0;
            for (double l : rates) denom *= z - l;
            out.terms.push_back({sign * prod_all * w / (static_cast<double>(q) * denom), z});
        }
    }
    return out;
}

/// CDF of the hypoexponential sum; 0 at the origin, clamped to [0, 1].
[[nodiscard]] inline double hypoexp_cdf(std::span<const double> rates, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("x must be nonnegative");
    const auto pdf = hypoexp_pdf(rates);
    return std::clamp(pdf.integral_to(x), 0.0, 1.0);
}

} // namespace relaysec
