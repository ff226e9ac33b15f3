#pragma once

// Parameter sets of the three reference figures. Data only.

#include "relaysec/sweep.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace relaysec::presets {

/// Equal eavesdropper links at 3 dB, hop SNRs split equally from the axis.
[[nodiscard]] inline NetworkTemplate fig2_network(int n) {
    return {"N" + std::to_string(n),
            n,
            LinkPolicy::equal_split(),
            LinkPolicy::equal_split(),
            LinkPolicy::fixed_db({3.0}),
            LinkPolicy::fixed_db({3.0}),
            LinkPolicy::fixed_db({0.0})};
}

/// Eavesdropper links at 0, 3, 6, 9 dB (first n of them). The unbalanced
/// variant pins the first hop at 30 dB and puts the axis SNR on the second.
[[nodiscard]] inline NetworkTemplate fig3_network(int n, bool balanced) {
    if (n < 1 || n > 4) throw std::invalid_argument("fig3 networks exist for 1 to 4 relays");
    const std::vector<double> eve{0.0, 3.0, 6.0, 9.0};
    return {std::string(balanced ? "balanced" : "unbalanced") + (n == 4 ? "" : "_N" + std::to_string(n)),
            n,
            balanced ? LinkPolicy::equal_split() : LinkPolicy::fixed_db({30.0}),
            balanced ? LinkPolicy::equal_split() : LinkPolicy::axis(),
            LinkPolicy::fixed_db({3.0}),
            LinkPolicy::fixed_db(std::vector<double>(eve.begin(), eve.begin() + n)),
            LinkPolicy::fixed_db({0.0})};
}

/// Each hop of relay k gets a fixed fraction of the linear axis SNR; over
/// both hops and all relays the fractions add to one.
[[nodiscard]] inline NetworkTemplate fig4_network(int n) {
    std::vector<double> eve_db, share;
    switch (n) {
    case 1: eve_db = {9.0}, share = {0.5}; break;
    case 2: eve_db = {6.0, 9.0}, share = {0.2, 0.3}; break;
    case 3: eve_db = {3.0, 6.0, 9.0}, share = {0.1, 0.15, 0.25}; break;
    case 4: eve_db = {0.0, 3.0, 6.0, 9.0}, share = {0.05, 0.1, 0.15, 0.2}; break;
    default: throw std::invalid_argument("fig4 networks exist for 1 to 4 relays");
    }
    return {"N" + std::to_string(n),
            n,
            LinkPolicy::fraction(share),
            LinkPolicy::fraction(share),
            LinkPolicy::fixed_db({3.0}),
            LinkPolicy::fixed_db(eve_db),
            LinkPolicy::fixed_db({-3.0})};
}

[[nodiscard]] inline SweepSpec fig2() {
    SweepSpec s;
    s.schemes = {Scheme::MaxE, Scheme::MinE};
    s.engines = {Engine::Analytic, Engine::MonteCarlo};
    s.rs_values = {0.0, 1.0};
    for (int n = 1; n <= 4; ++n) s.networks.push_back(fig2_network(n));
    return s;
}

[[nodiscard]] inline SweepSpec fig3() {
    SweepSpec s;
    s.schemes = {Scheme::MaxE, Scheme::MinE};
    s.engines = {Engine::Analytic, Engine::MonteCarlo};
    s.rs_values = {0.0, 1.0};
    s.networks = {fig3_network(4, true), fig3_network(4, false)};
    return s;
}

[[nodiscard]] inline SweepSpec fig4() {
    SweepSpec s;
    s.schemes = {Scheme::MaxE, Scheme::MinE, Scheme::MaxMrc, Scheme::MrcMrc};
    s.engines = {Engine::Analytic, Engine::MonteCarlo};
    s.rs_values = {1.0};
    s.networks = {fig4_network(2), fig4_network(4)};
    return s;
}

[[nodiscard]] inline SweepSpec by_name(const std::string& name) {
    if (name == "fig2") return fig2();
    if (name == "fig3") return fig3();
    if (name == "fig4") return fig4();
    throw std::invalid_argument("unknown figure '" + name + "' (expected fig2, fig3 or fig4)");
}

} // namespace relaysec::presets
