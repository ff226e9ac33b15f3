#pragma once

// SNR sweeps: how each link's mean SNR follows the x-axis, the grid spec, the
// evaluation loop and the CSV format of its rows.

#include "relaysec/analytic.hpp"
#include "relaysec/core.hpp"
#include "relaysec/monte_carlo.hpp"
#include "relaysec/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace relaysec {

/// How one link's mean SNR is derived from the x-axis SNR.
struct LinkPolicy {
    enum class Kind {
        FixedDb,   // values are mean SNRs in dB
        Fraction,  // values are linear fractions of the axis SNR
        EqualSplit,// half of the axis SNR (linear)
        Axis,      // the axis SNR itself
    };
    Kind kind = Kind::Axis;
    std::vector<double> values;  // one entry for all relays, or one per relay

    static LinkPolicy fixed_db(std::vector<double> db) { return {Kind::FixedDb, std::move(db)}; }
    static LinkPolicy fraction(std::vector<double> f) { return {Kind::Fraction, std::move(f)}; }
    static LinkPolicy equal_split() { return {Kind::EqualSplit, {}}; }
    static LinkPolicy axis() { return {Kind::Axis, {}}; }

    [[nodiscard]] double value_for(int k) const {
        if (values.empty()) throw std::invalid_argument("link policy has no values");
        return values.size() == 1 ? values.front() : values.at(static_cast<std::size_t>(k));
    }

    /// Exponential rate of the link for relay k when the x-axis reads axis_db.
    [[nodiscard]] double rate(double axis_db, int k = 0) const {
        switch (kind) {
        case Kind::FixedDb: return db_to_rate(value_for(k));
        case Kind::Fraction: return 1.0 / (value_for(k) * db_to_linear(axis_db));
        case Kind::EqualSplit: return 2.0 / db_to_linear(axis_db);
        case Kind::Axis: return db_to_rate(axis_db);
        }
        throw std::logic_error("unknown link policy");
    }
};

[[nodiscard]] inline std::string_view to_string(LinkPolicy::Kind k) {
    switch (k) {
    case LinkPolicy::Kind::FixedDb: return "fixed_db";
    case LinkPolicy::Kind::Fraction: return "fraction";
    case LinkPolicy::Kind::EqualSplit: return "equal_split";
    case LinkPolicy::Kind::Axis: return "axis";
    }
    return "?";
}

/// A family of networks indexed by the x-axis SNR.
struct NetworkTemplate {
    std::string label;
    int n_relays = 1;
    LinkPolicy beta_sk, beta_kd, beta_sd, alpha_ke, alpha_se;

    [[nodiscard]] NetworkConfig at(double axis_db) const {
        NetworkConfig c;
        c.n_relays = n_relays;
        for (int k = 0; k < n_relays; ++k) {
            c.beta_sk.push_back(beta_sk.rate(axis_db, k));
            c.beta_kd.push_back(beta_kd.rate(axis_db, k));
            c.alpha_ke.push_back(alpha_ke.rate(axis_db, k));
        }
        c.beta_sd = beta_sd.rate(axis_db);
        c.alpha_se = alpha_se.rate(axis_db);
        return c;
    }

    void validate() const {
        if (n_relays < 1) throw std::invalid_argument(label + ": relay count must be at least 1");
        const auto check = [&](const char* name, const LinkPolicy& p, bool per_relay) {
            const bool needs_values = p.kind == LinkPolicy::Kind::FixedDb || p.kind == LinkPolicy::Kind::Fraction;
            if (needs_values && p.values.empty())
                throw std::invalid_argument(label + "." + name + ": policy needs values");
            if (!needs_values && !p.values.empty())
                throw std::invalid_argument(label + "." + name + ": policy takes no values");
            if (p.values.size() > 1 && (!per_relay || static_cast<int>(p.values.size()) != n_relays))
                throw std::invalid_argument(label + "." + name + ": expected 1" +
                                            (per_relay ? " or " + std::to_string(n_relays) : std::string()) +
                                            " values, got " + std::to_string(p.values.size()));
            for (double v : p.values) {
                if (!std::isfinite(v)) throw std::invalid_argument(label + "." + name + ": value must be finite");
                if (p.kind == LinkPolicy::Kind::Fraction && !(v > 0.0))
                    throw std::invalid_argument(label + "." + name + ": fraction must be positive");
            }
        };
        check("beta_sk", beta_sk, true);
        check("beta_kd", beta_kd, true);
        check("beta_sd", beta_sd, false);
        check("alpha_ke", alpha_ke, true);
        check("alpha_se", alpha_se, false);
    }
};

struct SweepSpec {
    double snr_start_db = 0.0;
    double snr_stop_db = 40.0;
    double snr_step_db = 1.0;
    std::vector<double> rs_values{0.0, 1.0};
    std::vector<Scheme> schemes;
    std::vector<Engine> engines{Engine::Analytic};
    std::vector<NetworkTemplate> networks;
    McSettings mc;
    QuadSettings quad;
    double slope_lo_db = 30.0;
    double slope_hi_db = 40.0;

    [[nodiscard]] std::vector<double> grid() const {
        std::vector<double> out;
        const double span = snr_stop_db - snr_start_db;
        const auto steps = static_cast<long>(std::floor(span / snr_step_db + 1e-9));
        for (long i = 0; i <= steps; ++i) out.push_back(snr_start_db + static_cast<double>(i) * snr_step_db);
        return out;
    }

    void validate() const {
        if (!std::isfinite(snr_start_db) || !std::isfinite(snr_stop_db) || snr_stop_db < snr_start_db)
            throw std::invalid_argument("snr range must be finite with start <= stop");
        if (!(snr_step_db > 0.0)) throw std::invalid_argument("snr step must be positive");
        if (rs_values.empty()) throw std::invalid_argument("rs_values is empty");
        for (double rs : rs_values) (void)SecrecyTarget{rs};
        if (schemes.empty()) throw std::invalid_argument("schemes is empty");
        if (engines.empty()) throw std::invalid_argument("engines is empty");
        if (networks.empty()) throw std::invalid_argument("networks is empty");
        if (!(slope_hi_db > slope_lo_db)) throw std::invalid_argument("slope window must satisfy lo < hi");
        for (const auto& n : networks) n.validate();
        mc.validate();
        quad.validate();
    }
};

struct SweepRow {
    std::string network;
    double snr_db = 0.0;
    Scheme scheme = Scheme::MaxE;
    double rs = 0.0;
    Engine engine = Engine::Analytic;
    std::optional<SopResult> result;
    std::string status = "ok";
};

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return {buf, r.ptr};
}

inline std::string csv_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
    return s;
}

} // namespace detail

inline constexpr std::string_view kCsvHeader = "snr_db,scheme,rs,engine,sop,ci_halfwidth,trials,seed,status";

inline void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

/// One CSV line. `snr_db` is left empty when there is no x-axis.
inline void write_csv_row(std::ostream& os, std::optional<double> snr_db, Scheme scheme, double rs, Engine engine,
                          const std::optional<SopResult>& r, const std::string& status) {
    using detail::format_number;
    if (snr_db) os << format_number(*snr_db);
    os << ',' << to_string(scheme) << ',' << format_number(rs) << ',' << to_string(engine) << ',';
    if (r) {
        os << format_number(r->value) << ',';
        if (r->ci_halfwidth) os << format_number(*r->ci_halfwidth);
        os << ',';
        if (r->trials) os << *r->trials;
        os << ',';
        if (r->seed) os << *r->seed;
    } else {
        os << ",,,";
    }
    os << ',' << detail::csv_safe(status) << '\n';
}

inline void write_csv_row(std::ostream& os, const SweepRow& row) {
    write_csv_row(os, row.snr_db, row.scheme, row.rs, row.engine, row.result, row.status);
}

/// Evaluates one network family over the grid. Rows are ordered by SNR, then
/// scheme, then rs, then engine. Monte Carlo rows at one SNR share their
/// realizations. Engine failures become rows with an error status. Grid
/// points are spread over `workers` threads; the output does not depend on
/// the thread count.
[[nodiscard]] inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const NetworkTemplate& network,
                                                     unsigned workers = 1) {
    spec.validate();
    const auto snrs = spec.grid();
    const std::size_t per_point = spec.schemes.size() * spec.rs_values.size() * spec.engines.size();
    std::vector<SweepRow> rows(snrs.size() * per_point);

    const auto run_point = [&](std::size_t p) {
        const double snr = snrs[p];
        const NetworkConfig config = network.at(snr);

        std::optional<std::vector<SopResult>> mc;
        std::string mc_error;
        const bool wants_mc = std::find(spec.engines.begin(), spec.engines.end(), Engine::MonteCarlo) !=
                              spec.engines.end();
        if (wants_mc) {
            std::vector<McQuery> queries;
            for (Scheme s : spec.schemes)
                for (double rs : spec.rs_values) queries.push_back({s, SecrecyTarget(rs)});
            try {
                mc = estimate_sop(config, queries, spec.mc, 1);
            } catch (const std::exception& e) {
                mc_error = e.what();
            }
        }

        std::size_t i = p * per_point;
        std::size_t q = 0;
        for (Scheme s : spec.schemes) {
            for (double rs : spec.rs_values) {
                for (Engine e : spec.engines) {
                    SweepRow& row = rows[i++];
                    row.network = network.label;
                    row.snr_db = snr;
                    row.scheme = s;
                    row.rs = rs;
                    row.engine = e;
                    try {
                        switch (e) {
                        case Engine::Analytic: row.result = sop_analytic(config, s, SecrecyTarget(rs)); break;
                        case Engine::Quadrature:
                            row.result = sop_quadrature(config, s, SecrecyTarget(rs), spec.quad);
                            break;
                        case Engine::MonteCarlo:
                            if (!mc) throw std::runtime_error(mc_error);
                            row.result = (*mc)[q];
                            break;
                        }
                    } catch (const std::exception& ex) {
                        row.status = std::string("error: ") + ex.what();
                    }
                }
                ++q;
            }
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const auto n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, snrs.size()));
    if (n_threads <= 1) {
        for (std::size_t p = 0; p < snrs.size(); ++p) run_point(p);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t p = next++; p < snrs.size(); p = next++) run_point(p);
            });
    }
    return rows;
}

} // namespace relaysec
