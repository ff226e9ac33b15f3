#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature on finite intervals.

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaysec {

/// The requested tolerance could not be met. Carries the best estimate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    [[nodiscard]] double estimate() const { return estimate_; }
    [[nodiscard]] double error_bound() const { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

struct IntegrationResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

namespace detail {

// Kronrod abscissae; odd indices are the Gauss 7-point nodes
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    int depth;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b, int depth) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double f1[7], f2[7];
    const double fc = f(centre);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    double magnitude = kWgk[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        kronrod += kWgk[j] * (f1[j] + f2[j]);
        magnitude += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1[j] + f2[j]);
    }
    // QUADPACK error scaling: |K - G| rescaled against the spread of f
    // around its mean, floored at the roundoff level of the rule
    const double mean = 0.5 * kronrod;
    double spread = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) spread += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    spread *= half;
    magnitude *= half;
    double err = std::abs((kronrod - gauss) * half);
    if (spread != 0.0 && err != 0.0) err = spread * std::min(1.0, std::pow(200.0 * err / spread, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (magnitude > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * magnitude, err);
    return {a, b, kronrod * half, err, depth};
}

} // namespace detail

/// Integrates f over [a, b] until the summed error estimate is below
/// max(abs_tol, rel_tol |I|). Segments are bisected in order of decreasing
/// error; a segment at `max_depth` bisections is frozen. Returns with
/// converged = false when the budget runs out.
template <class F>
IntegrationResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                                     int max_depth = 40, int max_segments = 4000) {
    IntegrationResult out;
    if (a == b) return out;
    if (!(b > a)) throw std::invalid_argument("integration bounds must satisfy a <= b");

    std::priority_queue<detail::Segment> open;
    std::vector<detail::Segment> frozen;
    open.push(detail::gk15(f, a, b, 0));
    out.evaluations = 15;
    int segments = 1;

    const auto totals = [&](double& value, double& error) {
        value = 0.0;
        error = 0.0;
        auto copy = open;
        while (!copy.empty()) {
            value += copy.top().value;
            error += copy.top().error;
            copy.pop();
        }
        for (const auto& s : frozen) {
            value += s.value;
            error += s.error;
        }
    };

    // running sums avoid re-walking the heap every step
    double value = open.top().value;
    double error = open.top().error;
    while (true) {
        if (error <= std::max(abs_tol, rel_tol * std::abs(value))) break;
        if (open.empty() || segments >= max_segments) {
            out.converged = false;
            break;
        }
        const detail::Segment worst = open.top();
        open.pop();
        if (worst.depth >= max_depth) {
            frozen.push_back(worst);
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gk15(f, worst.a, mid, worst.depth + 1);
        const auto right = detail::gk15(f, mid, worst.b, worst.depth + 1);
        out.evaluations += 30;
        ++segments;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        open.push(left);
        open.push(right);
    }
    totals(out.value, out.error);
    if (out.error <= std::max(abs_tol, rel_tol * std::abs(out.value))) out.converged = true;
    return out;
}

/// Smallest x (found by doubling then bisection) with survival(x) <= mass.
/// `survival` must be non-increasing.
template <class S>
double tail_cutoff(S&& survival, double scale, double mass) {
    double hi = scale;
    int guard = 0;
    while (survival(hi) > mass) {
        hi *= 2.0;
        if (++guard > 200) throw std::runtime_error("tail cutoff search diverged");
    }
    double lo = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (survival(mid) > mass)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

} // namespace relaysec
