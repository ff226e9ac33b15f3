#pragma once

// Domain types shared by every SOP engine: the network description, the
// evaluation schemes, the secrecy threshold and the result record.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relaysec {

/// Largest relay count accepted by the analytic and quadrature engines. The
/// inclusion-exclusion sums grow as 2^N and lose precision past this point.
inline constexpr int kMaxAnalyticRelays = 8;

/// Thrown when an engine is asked for a network it cannot evaluate.
class UnsupportedSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exponential rate parameters of every link, linear scale. A link SNR with
/// rate r has mean 1/r.
struct NetworkConfig {
    int n_relays = 0;
    std::vector<double> beta_sk;  // source -> relay k
    std::vector<double> beta_kd;  // relay k -> destination
    double beta_sd = 0.0;         // source -> destination
    std::vector<double> alpha_ke; // relay k -> eavesdropper
    double alpha_se = 0.0;        // source -> eavesdropper

    /// Rate of the dual-hop DF link through relay k, min(g_sk, g_kd) ~ Exp(b_sk + b_kd).
    [[nodiscard]] double beta_kD(int k) const { return beta_sk[k] + beta_kd[k]; }

    /// {beta_sd, beta_1D, ..., beta_ND}: rates of the branches the destination combines.
    [[nodiscard]] std::vector<double> legitimate_rates() const {
        std::vector<double> out{beta_sd};
        for (int k = 0; k < n_relays; ++k) out.push_back(beta_kD(k));
        return out;
    }

    /// {alpha_se, alpha_1e, ..., alpha_Ne}.
    [[nodiscard]] std::vector<double> eavesdropper_rates() const {
        std::vector<double> out{alpha_se};
        out.insert(out.end(), alpha_ke.begin(), alpha_ke.end());
        return out;
    }
};

enum class Scheme { MaxE, MinE, MaxMrc, MrcMrc };

inline constexpr Scheme kAllSchemes[] = {Scheme::MaxE, Scheme::MinE, Scheme::MaxMrc, Scheme::MrcMrc};

[[nodiscard]] constexpr std::string_view to_string(Scheme s) {
    switch (s) {
    case Scheme::MaxE: return "MAX_E";
    case Scheme::MinE: return "MIN_E";
    case Scheme::MaxMrc: return "MAX_MRC";
    case Scheme::MrcMrc: return "MRC_MRC";
    }
    return "?";
}

/// Accepts the canonical tag ("MAX_E") and the hyphenated form ("MAX-E"), any case.
[[nodiscard]] inline std::optional<Scheme> parse_scheme(std::string_view text) {
    std::string norm;
    for (char c : text) {
        if (c == '-') c = '_';
        norm.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    for (Scheme s : kAllSchemes)
        if (norm == to_string(s)) return s;
    return std::nullopt;
}

enum class Engine { Analytic, MonteCarlo, Quadrature };

[[nodiscard]] constexpr std::string_view to_string(Engine e) {
    switch (e) {
    case Engine::Analytic: return "analytic";
    case Engine::MonteCarlo: return "mc";
    case Engine::Quadrature: return "quad";
    }
    return "?";
}

[[nodiscard]] inline std::optional<Engine> parse_engine(std::string_view text) {
    if (text == "analytic") return Engine::Analytic;
    if (text == "mc" || text == "monte_carlo") return Engine::MonteCarlo;
    if (text == "quad" || text == "quadrature") return Engine::Quadrature;
    return std::nullopt;
}

/// Threshold secrecy rate rs (bits per channel use) and the SNR ratio
/// rho = 2^(2 rs) it induces on (1 + g_M) / (1 + g_E).
class SecrecyTarget {
public:
    explicit SecrecyTarget(double rs) : rs_(rs), rho_(std::exp2(2.0 * rs)) {
        if (!(rs >= 0.0) || !std::isfinite(rs))
            throw std::invalid_argument("secrecy rate threshold must be finite and nonnegative");
    }

    [[nodiscard]] double rs() const { return rs_; }
    [[nodiscard]] double rho() const { return rho_; }

    /// Outage event on one realization. Strict inequality; ties are not outages.
    [[nodiscard]] bool is_outage(double gamma_m, double gamma_e) const {
        return 1.0 + gamma_m < rho_ * (1.0 + gamma_e);
    }

private:
    double rs_;
    double rho_;
};

struct SopResult {
    double value = 0.0;  // clipped to [0, 1]
    double raw = 0.0;    // before clipping
    Engine engine = Engine::Analytic;
    std::optional<std::uint64_t> trials;
    std::optional<double> ci_halfwidth;
    std::optional<std::uint64_t> seed;
    std::optional<double> error_bound;  // quadrature only

    [[nodiscard]] double ci_low() const { return std::max(0.0, value - ci_halfwidth.value_or(0.0)); }
    [[nodiscard]] double ci_high() const { return std::min(1.0, value + ci_halfwidth.value_or(0.0)); }
};

[[nodiscard]] inline double clip_probability(double p) { return std::min(1.0, std::max(0.0, p)); }

/// Exponential rate for a link whose average SNR is `mean_snr_db`.
[[nodiscard]] inline double db_to_rate(double mean_snr_db) {
    if (!std::isfinite(mean_snr_db)) throw std::invalid_argument("mean SNR in dB must be finite");
    return std::pow(10.0, -mean_snr_db / 10.0);
}

[[nodiscard]] inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Effective SNR of a decode-and-forward hop pair.
[[nodiscard]] inline double dual_hop_snr(double gamma_sk, double gamma_kd) {
    if (gamma_sk < 0.0 || gamma_kd < 0.0) throw std::invalid_argument("SNR must be nonnegative");
    return std::min(gamma_sk, gamma_kd);
}

/// 0.5 log2((1 + gamma_m) / (1 + gamma_e)) without the positive-part clamp.
[[nodiscard]] inline double signed_secrecy_rate(double gamma_m, double gamma_e) {
    return 0.5 * (std::log2(1.0 + gamma_m) - std::log2(1.0 + gamma_e));
}

/// Achievable secrecy rate over two time slots, in bits per channel use.
[[nodiscard]] inline double secrecy_rate(double gamma_m, double gamma_e) {
    if (gamma_m < 0.0 || gamma_e < 0.0) throw std::invalid_argument("SNR must be nonnegative");
    return std::max(0.0, signed_secrecy_rate(gamma_m, gamma_e));
}

struct ConfigViolation {
    std::string field;
    std::string message;
};

/// Every invariant violation in `config`; empty when the config is usable.
[[nodiscard]] inline std::vector<ConfigViolation> validate_config(const NetworkConfig& config) {
    std::vector<ConfigViolation> out;
    const auto check_rate = [&out](const std::string& field, double r) {
        if (!std::isfinite(r) || !(r > 0.0))
            out.push_back({field, "rate must be strictly positive"});
    };
    if (config.n_relays < 1) out.push_back({"n_relays", "relay count must be at least 1"});

    const auto check_list = [&](const std::string& name, const std::vector<double>& v) {
        if (static_cast<int>(v.size()) != config.n_relays) {
            out.push_back({name, "length mismatch: expected " + std::to_string(config.n_relays) +
                                     " entries, got " + std::to_string(v.size())});
        }
        for (std::size_t i = 0; i < v.size(); ++i) check_rate(name + "[" + std::to_string(i) + "]", v[i]);
    };
    check_list("beta_sk", config.beta_sk);
    check_list("beta_kd", config.beta_kd);
    check_list("alpha_ke", config.alpha_ke);
    check_rate("beta_sd", config.beta_sd);
    check_rate("alpha_se", config.alpha_se);

    if (config.beta_sk.size() == config.beta_kd.size()) {
        for (std::size_t k = 0; k < config.beta_sk.size(); ++k) {
            const double sum = config.beta_sk[k] + config.beta_kd[k];
            if (!std::isfinite(sum) || !(sum > 0.0))
                out.push_back({"beta_kD[" + std::to_string(k) + "]", "rate must be strictly positive"});
        }
    }
    return out;
}

/// Throws std::invalid_argument naming the first violation.
inline void require_valid(const NetworkConfig& config) {
    const auto violations = validate_config(config);
    if (!violations.empty())
        throw std::invalid_argument(violations.front().field + ": " + violations.front().message);
}

inline void require_analytic_size(const NetworkConfig& config) {
    if (config.n_relays > kMaxAnalyticRelays) {
        throw UnsupportedSizeError("N = " + std::to_string(config.n_relays) + " exceeds the limit of " +
                                   std::to_string(kMaxAnalyticRelays) +
                                   " relays for closed-form evaluation; use the Monte Carlo engine");
    }
}

/// Config with identical statistics on every relay branch.
[[nodiscard]] inline NetworkConfig uniform_config(int n, double beta_sk, double beta_kd, double beta_sd,
                                                  double alpha_ke, double alpha_se) {
    NetworkConfig c;
    c.n_relays = n;
    c.beta_sk.assign(n, beta_sk);
    c.beta_kd.assign(n, beta_kd);
    c.beta_sd = beta_sd;
    c.alpha_ke.assign(n, alpha_ke);
    c.alpha_se = alpha_se;
    return c;
}

} // namespace relaysec
