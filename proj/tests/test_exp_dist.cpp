#include "relaysec/exp_dist.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace relaysec;
using testing_support::simpson;

namespace {

double product_cdf(const std::vector<double>& rates, double x) {
    double p = 1.0;
    for (double r : rates) p *= -std::expm1(-r * x);
    return p;
}

double erlang_cdf(int m, double rate, double x) {
    // 1 - e^{-rx} sum_{j<m} (rx)^j / j!
    double term = 1.0, s = 0.0;
    for (int j = 0; j < m; ++j) {
        s += term;
        term *= rate * x / (j + 1);
    }
    return 1.0 - std::exp(-rate * x) * s;
}

} // namespace

TEST(MaxExpCdf, Examples) {
    EXPECT_EQ(max_exp_cdf(std::vector<double>{1.0}, 0.0), 0.0);
    EXPECT_NEAR(max_exp_cdf(std::vector<double>{1.0, 2.0}, std::log(2.0)), 0.375, 1e-15);
    const std::vector<double> r{0.5, 1.5, 2.5};
    EXPECT_NEAR(max_exp_cdf(r, 1.0), product_cdf(r, 1.0), 1e-12 * product_cdf(r, 1.0));
}

TEST(MaxExpCdf, Errors) {
    EXPECT_THROW((void)max_exp_cdf(std::vector<double>{}, 1.0), std::invalid_argument);
    EXPECT_THROW((void)max_exp_cdf(std::vector<double>{1.0, 0.0}, 1.0), std::invalid_argument);
    EXPECT_THROW((void)max_exp_cdf(std::vector<double>{1.0, -2.0}, 1.0), std::invalid_argument);
}

// Inclusion-exclusion against the product form on random inputs. Inputs are
// restricted to the region where the product is not itself tiny, since a
// relative check on an alternating sum near zero measures only cancellation.
TEST(MaxExpCdf, MatchesProductForm) {
    testing_support::ConfigGen gen(21);
    for (int i = 0; i < 3000; ++i) {
        const int n = gen.relays(1, 6);
        std::vector<double> r(n);
        for (double& v : r) v = gen.rate(0.1, 10.0);
        const double lo = 1.0 / *std::min_element(r.begin(), r.end());
        const double x = gen.uniform(0.2 * lo, 20.0 * lo);
        const double exact = product_cdf(r, x);
        if (exact < 1e-3) continue;
        EXPECT_NEAR(max_exp_cdf(r, x), exact, 1e-12 * exact) << "n=" << n << " x=" << x;
    }
}

TEST(ExclMaxPdf, SingleRemaining) {
    const auto f = excl_max_pdf(std::vector<double>{1.0, 3.0}, 0);
    ASSERT_EQ(f.terms.size(), 1u);
    EXPECT_EQ(f.terms[0].coeff, 3.0);
    EXPECT_EQ(f.terms[0].rate, 3.0);
}

// PDF of max{Exp(1), Exp(2)} is e^{-x} + 2e^{-2x} - 3e^{-3x}.
TEST(ExclMaxPdf, ThreeRatesDropLast) {
    const auto f = excl_max_pdf(std::vector<double>{1.0, 2.0, 3.0}, 2);
    const double expected = std::exp(-1.0) + 2.0 * std::exp(-2.0) - 3.0 * std::exp(-3.0);
    EXPECT_NEAR(f(1.0), expected, 1e-15);
    EXPECT_NEAR(f(1.0), 0.48918881, 1e-8);
}

TEST(ExclMaxPdf, NeedsTwoRates) {
    EXPECT_THROW((void)excl_max_pdf(std::vector<double>{1.0}, 0), std::invalid_argument);
    EXPECT_THROW((void)excl_max_pdf(std::vector<double>{1.0, 2.0}, 2), std::out_of_range);
}

TEST(ExclMaxPdf, MatchesNumericalDerivative) {
    testing_support::ConfigGen gen(22);
    for (int i = 0; i < 200; ++i) {
        const int n = gen.relays(2, 6);
        std::vector<double> r(n);
        for (double& v : r) v = gen.rate(0.2, 5.0);
        const auto k = static_cast<std::size_t>(gen.relays(0, n - 1));
        std::vector<double> rest;
        for (int j = 0; j < n; ++j)
            if (static_cast<std::size_t>(j) != k) rest.push_back(r[j]);
        const auto f = excl_max_pdf(r, k);
        const double x = gen.uniform(0.05, 5.0);
        const double h = 1e-5;
        const double derivative = (product_cdf(rest, x + h) - product_cdf(rest, x - h)) / (2 * h);
        EXPECT_NEAR(f(x), derivative, 1e-6);
    }
}

TEST(ExclMinRate, Examples) {
    EXPECT_EQ(excl_min_rate(std::vector<double>{1, 2, 3}, 1), 4.0);
    EXPECT_EQ(excl_min_rate(std::vector<double>{5, 5}, 0), 5.0);
    EXPECT_EQ(excl_min_rate(std::vector<double>{0.5, 0.25, 0.125, 0.0625}, 0), 0.4375);
    EXPECT_THROW((void)excl_min_rate(std::vector<double>{1.0}, 0), std::invalid_argument);
}

TEST(SumPairCoeffs, DistinctRates) {
    const auto c = sum_pair_coeffs(1.0, 2.0);
    EXPECT_FALSE(c.degenerate);
    EXPECT_EQ(c.b1, -2.0);
    EXPECT_EQ(c.rate1, 2.0);
    EXPECT_EQ(c.b2, 2.0);
    EXPECT_EQ(c.rate2, 1.0);
    for (double x : {0.1, 1.0, 3.0}) EXPECT_NEAR(c.pdf(x), 2 * std::exp(-x) - 2 * std::exp(-2 * x), 1e-15);
}

TEST(SumPairCoeffs, EqualRatesAreErlang) {
    const auto c = sum_pair_coeffs(2.0, 2.0);
    EXPECT_TRUE(c.degenerate);
    for (double x : {0.1, 1.0, 3.0}) EXPECT_NEAR(c.pdf(x), 4 * x * std::exp(-2 * x), 1e-15);
    EXPECT_NEAR(c.cdf(1.0), erlang_cdf(2, 2.0, 1.0), 1e-15);
}

// Oracle: the convolution integral evaluated by Simpson's rule.
TEST(SumPairCoeffs, MatchesNumericalConvolution) {
    const auto c = sum_pair_coeffs(3.0, 1.0);
    const double conv = simpson([](double u) { return 3 * std::exp(-3 * u) * std::exp(-(0.5 - u)); }, 0.0, 0.5);
    EXPECT_NEAR(c.pdf(0.5), conv, 1e-12);
    EXPECT_NEAR(c.pdf(0.5), 1.5 * (std::exp(-0.5) - std::exp(-1.5)), 1e-15);
    EXPECT_NEAR(c.pdf(0.5), 0.5751, 5e-5);
}

TEST(SumPairCoeffs, Normalised) {
    testing_support::ConfigGen gen(23);
    for (int i = 0; i < 1000; ++i) {
        const double a = gen.rate(), b = gen.rate();
        const auto c = sum_pair_coeffs(a, b);
        if (!c.degenerate) EXPECT_NEAR(c.b1 / c.rate1 + c.b2 / c.rate2, 1.0, 1e-9);
    }
    EXPECT_THROW((void)sum_pair_coeffs(0.0, 1.0), std::invalid_argument);
}

// Near-equal rates: the distinct-rate formula and the Erlang-2 limit agree.
TEST(SumPairCoeffs, DegenerateContinuity) {
    for (double a : {0.3, 1.0, 7.0}) {
        const auto erlang = sum_pair_coeffs(a, a);
        const auto near = sum_pair_coeffs(a * (1 + 2e-9), a);
        ASSERT_FALSE(near.degenerate);
        const auto grouped = hypoexp_pdf(std::vector<double>{a, a});
        double sup = 0.0, sup_grouped = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double x = 20.0 / a * i / 1000.0;
            sup = std::max(sup, std::abs(near.pdf(x) - erlang.pdf(x)));
            sup_grouped = std::max(sup_grouped, std::abs(grouped(x) - erlang.pdf(x)));
        }
        EXPECT_LT(sup, 1e-6 * a);
        EXPECT_LT(sup_grouped, 1e-12 * a);
    }
}

TEST(Hypoexp, TwoRates) {
    const auto f = hypoexp_pdf(std::vector<double>{1.0, 2.0});
    EXPECT_NEAR(f(1.0), 0.465088, 1e-6);
    EXPECT_NEAR(f(1.0), 2 * std::exp(-1.0) - 2 * std::exp(-2.0), 1e-15);
}

TEST(Hypoexp, SingleRateIsExponential) {
    for (double r : {0.1, 1.0, 4.0}) {
        const auto f = hypoexp_pdf(std::vector<double>{r});
        for (double x : {0.0, 0.5, 3.0}) EXPECT_EQ(f(x), r * std::exp(-r * x));
        EXPECT_NEAR(hypoexp_cdf(std::vector<double>{r}, 2.0), -std::expm1(-2.0 * r), 1e-16);
    }
}

// Oracle: nested numerical convolution of three exponential densities.
TEST(Hypoexp, ThreeRatesMatchesConvolution) {
    const auto f12 = [](double u) {
        return simpson([u](double v) { return std::exp(-v) * 2 * std::exp(-2 * (u - v)); }, 0.0, u, 400);
    };
    const double conv = simpson([&](double u) { return f12(u) * 3 * std::exp(-3 * (1.0 - u)); }, 0.0, 1.0, 400);
    const auto f = hypoexp_pdf(std::vector<double>{1.0, 2.0, 3.0});
    EXPECT_NEAR(f(1.0), conv, 1e-10);
}

TEST(Hypoexp, CdfExamples) {
    EXPECT_NEAR(hypoexp_cdf(std::vector<double>{1.0, 2.0}, 50.0), 1.0, 1e-12);
    EXPECT_EQ(hypoexp_cdf(std::vector<double>{1.0, 2.0, 3.0}, 0.0), 0.0);
    const auto f = hypoexp_pdf(std::vector<double>{1.0, 2.0, 3.0});
    const double integral = simpson([&](double x) { return f(x); }, 0.0, 2.0, 4000);
    EXPECT_NEAR(hypoexp_cdf(std::vector<double>{1.0, 2.0, 3.0}, 2.0), integral, 1e-12);
}

TEST(Hypoexp, CdfMonotone) {
    const std::vector<double> r{0.3, 1.1, 2.0, 5.0};
    double prev = 0.0;
    for (int i = 1; i <= 500; ++i) {
        const double v = hypoexp_cdf(r, 0.05 * i);
        EXPECT_GE(v, prev - 1e-15);
        prev = v;
    }
    EXPECT_NEAR(prev, 1.0, 1e-3);
}

TEST(Hypoexp, PermutationInvariant) {
    testing_support::ConfigGen gen(24);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> r(static_cast<std::size_t>(gen.relays(2, 6)));
        for (double& v : r) v = gen.rate(0.2, 5.0);
        const auto f = hypoexp_pdf(r);
        std::shuffle(r.begin(), r.end(), gen.engine());
        const auto g = hypoexp_pdf(r);
        for (double x : {0.1, 1.0, 4.0}) EXPECT_NEAR(f(x), g(x), 1e-12 * std::max(1.0, f(x)));
    }
}

// Every mixture used as a PDF integrates to one and stays nonnegative.
TEST(Mixtures, NormalisedAndNonnegative) {
    testing_support::ConfigGen gen(25);
    for (int i = 0; i < 200; ++i) {
        const int n = gen.relays(2, 6);
        std::vector<double> r(n);
        for (double& v : r) v = gen.rate(0.1, 10.0);
        const double min_rate = *std::min_element(r.begin(), r.end());
        const auto k = static_cast<std::size_t>(gen.relays(0, n - 1));

        const auto h = hypoexp_pdf(r);
        const auto e = excl_max_pdf(r, k);
        EXPECT_NEAR(h.mass(), 1.0, 1e-9);
        EXPECT_NEAR(e.mass(), 1.0, 1e-9);
        for (int j = 0; j <= 1000; ++j) {
            const double x = 20.0 / min_rate * j / 1000.0;
            EXPECT_GE(h(x), -1e-12);
            EXPECT_GE(e(x), -1e-12);
        }
    }
}

// Coincident rates go through contour nodes and must reproduce the Erlang law.
TEST(Hypoexp, RepeatedRatesMatchErlang) {
    for (int m = 2; m <= 8; ++m) {
        for (double rate : {0.25, 1.0, 3.0}) {
            const std::vector<double> r(static_cast<std::size_t>(m), rate);
            for (double x : {0.5, 2.0, 6.0, 15.0}) {
                const double xs = x / rate;
                EXPECT_NEAR(hypoexp_cdf(r, xs), erlang_cdf(m, rate, xs), 1e-8) << "m=" << m;
            }
            EXPECT_NEAR(hypoexp_pdf(r).mass(), 1.0, 1e-9);
        }
    }
}

TEST(Hypoexp, MixedClusterMatchesConvolution) {
    // Exp(1) + Erlang-2(2) through its convolution density
    const std::vector<double> r{1.0, 2.0, 2.0};
    const auto f = hypoexp_pdf(r);
    const double conv = simpson([](double u) { return std::exp(-u) * 4 * (1.5 - u) * std::exp(-2 * (1.5 - u)); },
                                0.0, 1.5, 2000);
    EXPECT_NEAR(f(1.5), conv, 1e-9);
}

// Nearly equal rates against the distinct-rate formula at 60 digits (mpmath).
TEST(Hypoexp, NearlyEqualRates) {
    struct Case {
        double delta;
        double x;
        double pdf;
    };
    const Case cases[] = {
        {1e-5, 0.3, 0.0022762358487928494867}, {1e-5, 2.0, 0.13134105173811365802},
        {1e-5, 9.0, 0.033108438290725481481},  {1e-7, 0.3, 0.0022761611981576426097},
        {1e-7, 2.0, 0.13133825873219183453},   {1e-7, 9.0, 0.033109528913303195216},
    };
    for (const auto& c : cases) {
        const std::vector<double> r{0.7, 0.7 * (1 + c.delta), 0.7 * (1 + 2.5 * c.delta), 2.0};
        const auto f = hypoexp_pdf(r);
        EXPECT_NEAR(f(c.x), c.pdf, 1e-14) << "delta " << c.delta << " x " << c.x;
        EXPECT_NEAR(f.mass(), 1.0, 1e-13);
    }
}

TEST(Hypoexp, CloseRatesApproachErlang) {
    for (double delta : {1e-12, 1e-9, 1e-7}) {
        const std::vector<double> r{1.5, 1.5 * (1 + delta), 1.5 * (1 - delta)};
        for (double x : {0.2, 1.0, 5.0}) EXPECT_NEAR(hypoexp_cdf(r, x), erlang_cdf(3, 1.5, x), 1e-12);
    }
}

TEST(CompensatedSum, RecoversCancellation) {
    CompensatedSum<> s;
    s += 1e16;
    s += 1.0;
    s += -1e16;
    EXPECT_EQ(s.value(), 1.0);
}
