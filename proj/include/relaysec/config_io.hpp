#pragma once

// JSON input: network configs with per-link mean SNRs in dB, and sweep specs.

#include "relaysec/core.hpp"
#include "relaysec/sweep.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace relaysec {

/// Malformed or invalid input file. The message starts with the offending field.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

using nlohmann::json;

inline json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw InputError(where + key + ": missing");
    return obj.at(key);
}

inline double number(const json& v, const std::string& field) {
    if (!v.is_number()) throw InputError(field + ": expected a number");
    return v.get<double>();
}

/// {"mean_snr_db": x} or {"rate": r}; exactly one of the two.
inline double link_rate(const json& v, const std::string& field) {
    if (!v.is_object()) throw InputError(field + ": expected an object with mean_snr_db or rate");
    const bool db = v.contains("mean_snr_db");
    const bool rate = v.contains("rate");
    if (db == rate) throw InputError(field + ": give exactly one of mean_snr_db and rate");
    if (db) {
        const double x = number(v.at("mean_snr_db"), field + ".mean_snr_db");
        if (!std::isfinite(x)) throw InputError(field + ".mean_snr_db: must be finite");
        return db_to_rate(x);
    }
    return number(v.at("rate"), field + ".rate");
}

inline std::vector<double> link_rates(const json& v, const std::string& field) {
    if (!v.is_array()) throw InputError(field + ": expected an array with one entry per relay");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(link_rate(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<double> number_list(const json& v, const std::string& field) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw InputError(field + ": expected a number or an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

inline LinkPolicy link_policy(const json& v, const std::string& field) {
    const std::string where = field + ".";
    const auto& kind = require(v, "policy", where);
    if (!kind.is_string()) throw InputError(field + ".policy: expected a string");
    const auto name = kind.get<std::string>();
    if (name == "fixed_db") return LinkPolicy::fixed_db(number_list(require(v, "db", where), field + ".db"));
    if (name == "fraction")
        return LinkPolicy::fraction(number_list(require(v, "fractions", where), field + ".fractions"));
    if (name == "equal_split") return LinkPolicy::equal_split();
    if (name == "axis") return LinkPolicy::axis();
    throw InputError(field + ".policy: unknown policy '" + name + "'");
}

inline json policy_to_json(const LinkPolicy& p) {
    json out{{"policy", std::string(to_string(p.kind))}};
    if (p.kind == LinkPolicy::Kind::FixedDb) out["db"] = p.values;
    if (p.kind == LinkPolicy::Kind::Fraction) out["fractions"] = p.values;
    return out;
}

template <class T, class Parse>
std::vector<T> parse_names(const json& v, const std::string& field, Parse parse) {
    if (!v.is_array()) throw InputError(field + ": expected an array of strings");
    std::vector<T> out;
    for (const auto& item : v) {
        if (!item.is_string()) throw InputError(field + ": expected an array of strings");
        const auto parsed = parse(item.template get<std::string>());
        if (!parsed) throw InputError(field + ": unknown name '" + item.template get<std::string>() + "'");
        out.push_back(*parsed);
    }
    return out;
}

} // namespace detail

/// Parses and validates a network config document.
[[nodiscard]] inline NetworkConfig network_from_json(const nlohmann::json& doc) {
    using namespace detail;
    NetworkConfig c;
    const auto& n = require(doc, "n_relays", "");
    if (!n.is_number_integer()) throw InputError("n_relays: expected an integer");
    c.n_relays = n.get<int>();
    const auto& links = require(doc, "links", "");
    c.beta_sk = link_rates(require(links, "beta_sk", "links."), "links.beta_sk");
    c.beta_kd = link_rates(require(links, "beta_kd", "links."), "links.beta_kd");
    c.beta_sd = link_rate(require(links, "beta_sd", "links."), "links.beta_sd");
    c.alpha_ke = link_rates(require(links, "alpha_ke", "links."), "links.alpha_ke");
    c.alpha_se = link_rate(require(links, "alpha_se", "links."), "links.alpha_se");

    const auto violations = validate_config(c);
    if (!violations.empty()) {
        std::string msg;
        for (const auto& v : violations) {
            if (!msg.empty()) msg += "; ";
            msg += (v.field == "n_relays" ? "" : "links.") + v.field + ": " + v.message;
        }
        throw InputError(msg);
    }
    return c;
}

[[nodiscard]] inline NetworkConfig load_network_config(const std::string& path) {
    return network_from_json(detail::parse_json_file(path));
}

[[nodiscard]] inline SweepSpec sweep_spec_from_json(const nlohmann::json& doc) {
    using namespace detail;
    SweepSpec s;
    s.snr_start_db = number(require(doc, "snr_start_db", ""), "snr_start_db");
    s.snr_stop_db = number(require(doc, "snr_stop_db", ""), "snr_stop_db");
    s.snr_step_db = number(require(doc, "snr_step_db", ""), "snr_step_db");
    s.rs_values = number_list(require(doc, "rs_values", ""), "rs_values");
    s.schemes = parse_names<Scheme>(require(doc, "schemes", ""), "schemes",
                                    [](const std::string& t) { return parse_scheme(t); });
    if (doc.contains("engines"))
        s.engines = parse_names<Engine>(doc.at("engines"), "engines",
                                        [](const std::string& t) { return parse_engine(t); });
    if (doc.contains("mc")) {
        const auto& mc = doc.at("mc");
        if (mc.contains("trials")) s.mc.trials = mc.at("trials").get<std::uint64_t>();
        if (mc.contains("seed")) s.mc.seed = mc.at("seed").get<std::uint64_t>();
        if (mc.contains("chunk_size")) s.mc.chunk_size = mc.at("chunk_size").get<std::uint64_t>();
    }
    if (doc.contains("quad")) {
        const auto& q = doc.at("quad");
        if (q.contains("rel_tol")) s.quad.rel_tol = number(q.at("rel_tol"), "quad.rel_tol");
        if (q.contains("abs_tol")) s.quad.abs_tol = number(q.at("abs_tol"), "quad.abs_tol");
    }
    if (doc.contains("slope_window_db")) {
        const auto w = number_list(doc.at("slope_window_db"), "slope_window_db");
        if (w.size() != 2) throw InputError("slope_window_db: expected [lo, hi]");
        s.slope_lo_db = w[0];
        s.slope_hi_db = w[1];
    }
    const auto& nets = require(doc, "networks", "");
    if (!nets.is_array()) throw InputError("networks: expected an array");
    for (std::size_t i = 0; i < nets.size(); ++i) {
        const std::string where = "networks[" + std::to_string(i) + "].";
        const auto& n = nets[i];
        NetworkTemplate t;
        t.label = n.contains("label") ? n.at("label").get<std::string>() : "network" + std::to_string(i);
        const auto& nr = require(n, "n_relays", where);
        if (!nr.is_number_integer()) throw InputError(where + "n_relays: expected an integer");
        t.n_relays = nr.get<int>();
        const auto& links = require(n, "links", where);
        const std::string lw = where + "links.";
        t.beta_sk = link_policy(require(links, "beta_sk", lw), lw + "beta_sk");
        t.beta_kd = link_policy(require(links, "beta_kd", lw), lw + "beta_kd");
        t.beta_sd = link_policy(require(links, "beta_sd", lw), lw + "beta_sd");
        t.alpha_ke = link_policy(require(links, "alpha_ke", lw), lw + "alpha_ke");
        t.alpha_se = link_policy(require(links, "alpha_se", lw), lw + "alpha_se");
        s.networks.push_back(std::move(t));
    }
    try {
        s.validate();
    } catch (const InputError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return s;
}

[[nodiscard]] inline SweepSpec load_sweep_spec(const std::string& path) {
    try {
        return sweep_spec_from_json(detail::parse_json_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

[[nodiscard]] inline nlohmann::json to_json(const SweepSpec& s) {
    using detail::json;
    json nets = json::array();
    for (const auto& n : s.networks) {
        nets.push_back({{"label", n.label},
                        {"n_relays", n.n_relays},
                        {"links",
                         {{"beta_sk", detail::policy_to_json(n.beta_sk)},
                          {"beta_kd", detail::policy_to_json(n.beta_kd)},
                          {"beta_sd", detail::policy_to_json(n.beta_sd)},
                          {"alpha_ke", detail::policy_to_json(n.alpha_ke)},
                          {"alpha_se", detail::policy_to_json(n.alpha_se)}}}});
    }
    json schemes = json::array();
    for (Scheme sc : s.schemes) schemes.push_back(std::string(to_string(sc)));
    json engines = json::array();
    for (Engine e : s.engines) engines.push_back(std::string(to_string(e)));
    return {{"snr_start_db", s.snr_start_db},
            {"snr_stop_db", s.snr_stop_db},
            {"snr_step_db", s.snr_step_db},
            {"rs_values", s.rs_values},
            {"schemes", schemes},
            {"engines", engines},
            {"mc", {{"trials", s.mc.trials}, {"seed", s.mc.seed}, {"chunk_size", s.mc.chunk_size}}},
            {"quad", {{"rel_tol", s.quad.rel_tol}, {"abs_tol", s.quad.abs_tol}}},
            {"slope_window_db", {s.slope_lo_db, s.slope_hi_db}},
            {"networks", nets}};
}

} // namespace relaysec
