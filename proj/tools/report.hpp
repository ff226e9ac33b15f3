#pragma once

// Qualitative checks printed after `relaysec reproduce`.

#include "relaysec/analytic.hpp"
#include "relaysec/presets.hpp"
#include "relaysec/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace relaysec::report {

struct Claim {
    explicit Claim(std::string t) : text(std::move(t)) {}

    std::string text;
    bool pass = true;
    std::string detail;  // first counterexample
};

/// Analytic and Monte Carlo values of a finished sweep, keyed by grid point.
class SopTable {
public:
    using Key = std::tuple<std::string, double, Scheme, double>;

    void add(const SweepRow& row) {
        if (!row.result) return;
        const Key key{row.network, row.snr_db, row.scheme, row.rs};
        if (row.engine == Engine::Analytic) analytic_[key] = row.result->value;
        if (row.engine == Engine::MonteCarlo) mc_[key] = *row.result;
    }

    [[nodiscard]] double at(const std::string& net, double snr, Scheme s, double rs) const {
        const auto it = analytic_.find({net, snr, s, rs});
        if (it == analytic_.end()) throw std::runtime_error("missing analytic value for " + net);
        return it->second;
    }

    /// Largest |mc - analytic| in units of the binomial sigma at the analytic value.
    [[nodiscard]] std::pair<double, std::size_t> worst_mc_z() const {
        double worst = 0.0;
        std::size_t n = 0;
        for (const auto& [key, mc] : mc_) {
            const auto it = analytic_.find(key);
            if (it == analytic_.end()) continue;
            const double p = it->second;
            const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(*mc.trials));
            worst = std::max(worst, std::abs(mc.value - p) / sigma);
            ++n;
        }
        return {worst, n};
    }

private:
    std::map<Key, double> analytic_;
    std::map<Key, SopResult> mc_;
};

inline std::string fmt(double v) { return detail::format_number(v); }

inline std::string at_point(double snr, double rs) { return "at " + fmt(snr) + " dB, rs = " + fmt(rs); }

inline void fail(Claim& c, const std::string& why) {
    if (c.pass) c.detail = why;
    c.pass = false;
}

inline std::vector<Claim> fig2_claims(const SweepSpec& spec, const SopTable& t) {
    Claim up{"MAX_E SOP strictly increases with N at every SNR >= 5 dB"};
    Claim down{"MIN_E SOP strictly decreases with N at every SNR >= 5 dB"};
    Claim rate{"SOP at rs = 1 exceeds SOP at rs = 0 everywhere"};
    Claim gaps{"gaps between successive N shrink as N grows"};
    const auto& nets = spec.networks;
    for (double snr : spec.grid()) {
        for (double rs : spec.rs_values) {
            for (Scheme s : spec.schemes) {
                std::vector<double> v;
                for (const auto& n : nets) v.push_back(t.at(n.label, snr, s, rs));
                for (std::size_t i = 1; i < v.size() && snr >= 5.0; ++i) {
                    if (s == Scheme::MaxE && !(v[i] > v[i - 1])) fail(up, nets[i].label + " " + at_point(snr, rs));
                    if (s == Scheme::MinE && !(v[i] < v[i - 1])) fail(down, nets[i].label + " " + at_point(snr, rs));
                }
                for (std::size_t i = 2; i < v.size() && snr >= 5.0; ++i) {
                    if (!(std::abs(v[i] - v[i - 1]) < std::abs(v[i - 1] - v[i - 2])))
                        fail(gaps, std::string(to_string(s)) + " " + nets[i].label + " " + at_point(snr, rs));
                }
            }
        }
        if (spec.rs_values.size() >= 2) {
            for (const auto& n : nets)
                for (Scheme s : spec.schemes)
                    for (std::size_t i = 1; i < spec.rs_values.size(); ++i)
                        if (!(t.at(n.label, snr, s, spec.rs_values[i]) > t.at(n.label, snr, s, spec.rs_values[i - 1])))
                            fail(rate, n.label + " " + std::string(to_string(s)) + " at " + fmt(snr) + " dB");
        }
    }
    return {up, down, rate, gaps};
}

inline std::vector<Claim> fig3_claims(const SweepSpec& spec, const SopTable& t) {
    const auto grid = spec.grid();
    std::vector<Claim> out;
    if (grid.size() < 2) return out;
    const double hi = grid.back();
    const double lo = hi - 2.0;
    for (const auto& n : spec.networks) {
        const bool unbalanced = n.label.rfind("unbalanced", 0) == 0;
        Claim c{n.label + (unbalanced ? ": relative change over the last 2 dB < 2%"
                                      : ": relative change over the last 2 dB > 10%")};
        for (Scheme s : spec.schemes) {
            for (double rs : spec.rs_values) {
                const double a = t.at(n.label, lo, s, rs);
                const double b = t.at(n.label, hi, s, rs);
                const double change = std::abs(a - b) / b;
                const bool ok = unbalanced ? change < 0.02 : change > 0.10;
                if (!ok) fail(c, std::string(to_string(s)) + " rs = " + fmt(rs) + " changes by " + fmt(100 * change) + "%");
            }
        }
        out.push_back(c);
    }
    return out;
}

inline std::vector<Claim> fig4_claims(const SweepSpec& spec, const SopTable& t) {
    Claim worst{"SOP(MAX_E) >= SOP(MRC_MRC) >= SOP(MAX_MRC) at every grid point"};
    Claim min_e{"SOP(MIN_E) >= SOP(MAX_MRC) at every grid point"};
    for (const auto& n : spec.networks) {
        for (double snr : spec.grid()) {
            for (double rs : spec.rs_values) {
                const double e = t.at(n.label, snr, Scheme::MaxE, rs);
                const double m = t.at(n.label, snr, Scheme::MinE, rs);
                const double x = t.at(n.label, snr, Scheme::MaxMrc, rs);
                const double r = t.at(n.label, snr, Scheme::MrcMrc, rs);
                if (!(e >= r && r >= x)) fail(worst, n.label + " " + at_point(snr, rs));
                if (!(m >= x)) fail(min_e, n.label + " " + at_point(snr, rs));
            }
        }
    }
    return {worst, min_e};
}

struct SlopeRow {
    std::string network;
    int n_relays;
    Scheme scheme;
    double rs;
    double slope;
};

inline std::vector<SlopeRow> slopes(const SweepSpec& spec) {
    std::vector<SlopeRow> out;
    for (const auto& n : spec.networks)
        for (Scheme s : spec.schemes)
            for (double rs : spec.rs_values)
                out.push_back({n.label, n.n_relays, s, rs,
                               diversity_slope(
                                   s, [&](double snr) { return n.at(snr); }, SecrecyTarget(rs), spec.slope_lo_db,
                                   spec.slope_hi_db)});
    return out;
}

/// Slopes of `schemes` differ by less than 0.1 between any two networks.
inline Claim slopes_parallel(const std::vector<SlopeRow>& rows, const std::vector<Scheme>& schemes) {
    Claim c{"slopes of each scheme agree within 0.1 across N"};
    for (const auto& a : rows)
        for (const auto& b : rows)
            if (a.scheme == b.scheme && a.rs == b.rs && &a < &b &&
                std::find(schemes.begin(), schemes.end(), a.scheme) != schemes.end() &&
                !(std::abs(a.slope - b.slope) < 0.1))
                fail(c, std::string(to_string(a.scheme)) + " " + a.network + " vs " + b.network);
    return c;
}

/// For each scheme, the slope at the largest N beats the smallest N by 0.5.
inline Claim slopes_grow(const std::vector<SlopeRow>& rows, const std::vector<Scheme>& schemes) {
    Claim c{"MAX_MRC and MRC_MRC slopes grow by >= 0.5 from the smallest to the largest N"};
    for (Scheme s : schemes) {
        const SlopeRow* lo = nullptr;
        const SlopeRow* hi = nullptr;
        for (const auto& r : rows) {
            if (r.scheme != s) continue;
            if (!lo || r.n_relays < lo->n_relays) lo = &r;
            if (!hi || r.n_relays > hi->n_relays) hi = &r;
        }
        if (lo && hi && !(hi->slope - lo->slope >= 0.5))
            fail(c, std::string(to_string(s)) + " grows by " + fmt(hi->slope - lo->slope));
    }
    return c;
}

/// Writes the slope table and the claims for `figure`; returns true when
/// every claim holds.
inline bool write_report(std::ostream& os, const std::string& figure, const SweepSpec& spec, const SopTable& t) {
    std::vector<Claim> claims;
    const auto rows = slopes(spec);
    if (figure == "fig2") {
        claims = fig2_claims(spec, t);
        claims.push_back(slopes_parallel(rows, {Scheme::MaxE, Scheme::MinE}));
    } else if (figure == "fig3") {
        claims = fig3_claims(spec, t);
    } else if (figure == "fig4") {
        claims = fig4_claims(spec, t);
        claims.push_back(slopes_grow(rows, {Scheme::MaxMrc, Scheme::MrcMrc}));
    }

    os << figure << " slopes over [" << fmt(spec.slope_lo_db) << ", " << fmt(spec.slope_hi_db) << "] dB\n";
    os << "network,n_relays,scheme,rs,slope\n";
    for (const auto& r : rows)
        os << r.network << ',' << r.n_relays << ',' << to_string(r.scheme) << ',' << fmt(r.rs) << ',' << fmt(r.slope)
           << '\n';
    os << '\n';
    bool all = true;
    for (const auto& c : claims) {
        os << (c.pass ? "PASS " : "FAIL ") << c.text;
        if (!c.pass) os << " (" << c.detail << ")";
        os << '\n';
        all = all && c.pass;
    }
    const auto [z, n] = t.worst_mc_z();
    if (n > 0) os << "monte carlo: worst deviation " << fmt(z) << " sigma over " << n << " points\n";
    return all;
}

} // namespace relaysec::report
