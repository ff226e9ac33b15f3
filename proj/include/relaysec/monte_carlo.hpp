#pragma once

// Monte Carlo SOP estimator. Trials are split into fixed-size chunks and each
// chunk draws from its own generator seeded by (seed, chunk index), so the
// estimate does not depend on how many threads consume the chunks.

#include "relaysec/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace relaysec {

struct McSettings {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    std::uint64_t chunk_size = 65'536;

    void validate() const {
        if (trials == 0) throw std::invalid_argument("trials must be positive");
        if (chunk_size == 0) throw std::invalid_argument("chunk_size must be positive");
    }
};

/// One draw of every link SNR.
struct ChannelRealization {
    std::vector<double> gamma_sk;
    std::vector<double> gamma_kd;
    double gamma_sd = 0.0;
    std::vector<double> gamma_ke;
    double gamma_se = 0.0;
};

/// Generator for one chunk of trials.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t chunk) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
        engine_.seed(seq);
    }

    /// Uniform on (0, 1], 53 random bits.
    double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    std::mt19937_64 engine_;
};

/// Draws every link SNR in a fixed order: g_sk, g_kd, g_sd, g_ke, g_se.
inline void sample_into(const NetworkConfig& config, RandomStream& stream, ChannelRealization& out) {
    const auto n = static_cast<std::size_t>(config.n_relays);
    out.gamma_sk.resize(n);
    out.gamma_kd.resize(n);
    out.gamma_ke.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.gamma_sk[k] = stream.exponential(config.beta_sk[k]);
    for (std::size_t k = 0; k < n; ++k) out.gamma_kd[k] = stream.exponential(config.beta_kd[k]);
    out.gamma_sd = stream.exponential(config.beta_sd);
    for (std::size_t k = 0; k < n; ++k) out.gamma_ke[k] = stream.exponential(config.alpha_ke[k]);
    out.gamma_se = stream.exponential(config.alpha_se);
}

[[nodiscard]] inline ChannelRealization sample_realization(const NetworkConfig& config, RandomStream& stream) {
    ChannelRealization r;
    sample_into(config, stream, r);
    return r;
}

struct SnrPair {
    double gamma_m;
    double gamma_e;
};

/// Combined destination and eavesdropper SNRs under `scheme`. Selection ties
/// go to the lowest relay index.
[[nodiscard]] inline SnrPair run_scheme(const ChannelRealization& r, Scheme scheme) {
    const std::size_t n = r.gamma_ke.size();
    const auto dual_hop = [&](std::size_t k) { return std::min(r.gamma_sk[k], r.gamma_kd[k]); };
    switch (scheme) {
    case Scheme::MaxE:
    case Scheme::MinE: {
        std::size_t pick = 0;
        for (std::size_t k = 1; k < n; ++k) {
            const bool better = scheme == Scheme::MaxE ? r.gamma_ke[k] > r.gamma_ke[pick]
                                                       : r.gamma_ke[k] < r.gamma_ke[pick];
            if (better) pick = k;
        }
        return {r.gamma_sd + dual_hop(pick), r.gamma_se + r.gamma_ke[pick]};
    }
    case Scheme::MaxMrc:
    case Scheme::MrcMrc: {
        double gm = r.gamma_sd;
        for (std::size_t k = 0; k < n; ++k) gm += dual_hop(k);
        double ge = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            ge = scheme == Scheme::MaxMrc ? std::max(ge, r.gamma_ke[k]) : ge + r.gamma_ke[k];
        return {gm, r.gamma_se + ge};
    }
    }
    throw std::logic_error("unknown scheme");
}

/// 95% half-width for an outage fraction. Switches to the Wilson interval
/// when fewer than ten outages (or non-outages) are expected.
[[nodiscard]] inline double binomial_halfwidth(double p_hat, std::uint64_t trials) {
    constexpr double z = 1.96;
    const double n = static_cast<double>(trials);
    if (p_hat * n >= 10.0 && (1.0 - p_hat) * n >= 10.0) return z * std::sqrt(p_hat * (1.0 - p_hat) / n);
    const double z2 = z * z;
    return z / (1.0 + z2 / n) * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n));
}

struct McQuery {
    Scheme scheme;
    SecrecyTarget target;
};

/// Estimates every query from the same realizations. Entry i of the result
/// equals what a single-query call for queries[i] returns. `workers` = 0 uses
/// the hardware concurrency.
[[nodiscard]] inline std::vector<SopResult> estimate_sop(const NetworkConfig& config, std::span<const McQuery> queries,
                                                         const McSettings& settings, unsigned workers = 1) {
    require_valid(config);
    settings.validate();
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

    const std::uint64_t chunks = (settings.trials + settings.chunk_size - 1) / settings.chunk_size;
    const std::size_t q = queries.size();
    std::vector<std::uint64_t> counts(chunks * q, 0);

    const auto run_chunk = [&](std::uint64_t c) {
        RandomStream stream(settings.seed, c);
        ChannelRealization r;
        const std::uint64_t begin = c * settings.chunk_size;
        const std::uint64_t end = std::min(settings.trials, begin + settings.chunk_size);
        std::uint64_t* row = counts.data() + c * q;
        for (std::uint64_t t = begin; t < end; ++t) {
            sample_into(config, stream, r);
            for (std::size_t i = 0; i < q; ++i) {
                const auto [gm, ge] = run_scheme(r, queries[i].scheme);
                row[i] += queries[i].target.is_outage(gm, ge) ? 1 : 0;
            }
        }
    };

    const auto n_threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
    if (n_threads <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_threads; ++w) {
            pool.emplace_back([&] {
                try {
                    for (std::uint64_t c = next++; c < chunks; c = next++) run_chunk(c);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        pool.clear();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<SopResult> out(q);
    for (std::size_t i = 0; i < q; ++i) {
        std::uint64_t hits = 0;
        for (std::uint64_t c = 0; c < chunks; ++c) hits += counts[c * q + i];
        const double p = static_cast<double>(hits) / static_cast<double>(settings.trials);
        out[i].engine = Engine::MonteCarlo;
        out[i].raw = p;
        out[i].value = p;
        out[i].trials = settings.trials;
        out[i].seed = settings.seed;
        out[i].ci_halfwidth = binomial_halfwidth(p, settings.trials);
    }
    return out;
}

[[nodiscard]] inline SopResult estimate_sop(const NetworkConfig& config, Scheme scheme, const SecrecyTarget& target,
                                            const McSettings& settings, unsigned workers = 1) {
    const McQuery query{scheme, target};
    return estimate_sop(config, std::span<const McQuery>(&query, 1), settings, workers).front();
}

} // namespace relaysec
