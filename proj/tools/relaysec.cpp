// relaysec: secrecy outage probability of relay networks from the command line.
//
//   relaysec eval --config net.json --scheme MAX_E --rs 1 --engine mc
//   relaysec sweep --spec sweep.json --out sop.csv
//   relaysec reproduce fig2 --out results/
//   relaysec slope --spec sweep.json
//
// Exit codes: 0 success, 1 engine error, 2 invalid input.

#include "relaysec/analytic.hpp"
#include "relaysec/config_io.hpp"
#include "relaysec/monte_carlo.hpp"
#include "relaysec/presets.hpp"
#include "relaysec/quadrature.hpp"
#include "relaysec/sweep.hpp"
#include "report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace relaysec;

namespace {

constexpr int kEngineError = 1;
constexpr int kInputError = 2;

struct Overrides {
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> chunk_size;
    std::optional<double> rel_tol;
    unsigned workers = 0;

    void apply(SweepSpec& s) const {
        if (trials) s.mc.trials = *trials;
        if (seed) s.mc.seed = *seed;
        if (chunk_size) s.mc.chunk_size = *chunk_size;
        if (rel_tol) s.quad.rel_tol = *rel_tol;
    }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--trials", o.trials, "Monte Carlo trials per grid point")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Monte Carlo seed");
    cmd->add_option("--chunk-size", o.chunk_size, "trials per random stream")->check(CLI::PositiveNumber);
    cmd->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
}

/// Opens `path` for writing, or returns stdout for an empty path.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
        file_.open(path);
        if (!file_) throw InputError(path + ": cannot open for writing");
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

int cmd_eval(const std::string& config_path, Scheme scheme, double rs, Engine engine, const Overrides& o,
             const std::string& out) {
    const NetworkConfig config = load_network_config(config_path);
    const SecrecyTarget target(rs);
    SopResult r;
    switch (engine) {
    case Engine::Analytic: r = sop_analytic(config, scheme, target); break;
    case Engine::Quadrature: {
        QuadSettings q;
        if (o.rel_tol) q.rel_tol = *o.rel_tol;
        r = sop_quadrature(config, scheme, target, q);
        break;
    }
    case Engine::MonteCarlo: {
        McSettings m;
        if (o.trials) m.trials = *o.trials;
        if (o.seed) m.seed = *o.seed;
        if (o.chunk_size) m.chunk_size = *o.chunk_size;
        r = estimate_sop(config, scheme, target, m, o.workers);
        break;
    }
    }
    Output sink(out);
    write_csv_header(sink.stream());
    write_csv_row(sink.stream(), std::nullopt, scheme, rs, engine, r, "ok");
    return 0;
}

/// `base` for a single network, otherwise base with the label spliced in
/// before the extension.
std::string network_path(const std::string& base, const SweepSpec& spec, const NetworkTemplate& net) {
    if (spec.networks.size() == 1 || base.empty()) return base;
    const fs::path p(base);
    return (p.parent_path() / (p.stem().string() + "_" + net.label + p.extension().string())).string();
}

bool write_sweep(const SweepSpec& spec, const NetworkTemplate& net, const std::string& path, unsigned workers,
                 report::SopTable* table) {
    const auto rows = run_sweep(spec, net, workers);
    Output sink(path);
    write_csv_header(sink.stream());
    bool ok = true;
    for (const auto& row : rows) {
        write_csv_row(sink.stream(), row);
        if (row.status != "ok") ok = false;
        if (table) table->add(row);
    }
    return ok;
}

int cmd_sweep(const std::string& spec_path, const std::string& out, const Overrides& o) {
    SweepSpec spec = load_sweep_spec(spec_path);
    o.apply(spec);
    spec.validate();
    bool ok = true;
    for (const auto& net : spec.networks) {
        if (out.empty() && spec.networks.size() > 1) std::cout << "# " << net.label << '\n';
        ok = write_sweep(spec, net, network_path(out, spec, net), o.workers, nullptr) && ok;
    }
    if (!ok) std::cerr << "some grid points failed; see the status column\n";
    return ok ? 0 : kEngineError;
}

int cmd_reproduce(const std::string& figure, const std::string& out_dir, const Overrides& o, bool analytic_only) {
    SweepSpec spec = presets::by_name(figure);
    o.apply(spec);
    if (analytic_only) spec.engines = {Engine::Analytic};
    spec.validate();
    fs::create_directories(out_dir);

    std::ofstream(fs::path(out_dir) / (figure + "_spec.json")) << to_json(spec).dump(2) << '\n';

    report::SopTable table;
    bool ok = true;
    for (const auto& net : spec.networks) {
        const auto path = (fs::path(out_dir) / (figure + "_" + net.label + ".csv")).string();
        ok = write_sweep(spec, net, path, o.workers, &table) && ok;
    }
    if (!ok) {
        std::cerr << "some grid points failed; see the status column\n";
        return kEngineError;
    }
    std::ostringstream text;
    report::write_report(text, figure, spec, table);
    std::ofstream(fs::path(out_dir) / (figure + "_report.txt")) << text.str();
    std::cout << text.str();
    return 0;
}

int cmd_slope(const std::string& spec_path) {
    const SweepSpec spec = load_sweep_spec(spec_path);
    std::cout << "network,n_relays,scheme,rs,slope\n";
    for (const auto& r : report::slopes(spec))
        std::cout << r.network << ',' << r.n_relays << ',' << to_string(r.scheme) << ',' << report::fmt(r.rs) << ','
                  << report::fmt(r.slope) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secrecy outage probability of DF relay networks"};
    app.require_subcommand(1);

    Overrides o;
    std::string config_path, spec_path, out, figure, out_dir = "results";
    std::string scheme_name, engine_name = "analytic";
    double rs = 0.0;
    bool analytic_only = false;

    auto* eval = app.add_subcommand("eval", "evaluate one config, print one CSV row");
    eval->add_option("--config", config_path, "network config (JSON)")->required()->check(CLI::ExistingFile);
    eval->add_option("--scheme", scheme_name, "MAX_E, MIN_E, MAX_MRC or MRC_MRC")->required();
    eval->add_option("--rs", rs, "secrecy rate threshold, bits per channel use")->check(CLI::NonNegativeNumber);
    eval->add_option("--engine", engine_name, "analytic, mc or quad");
    eval->add_option("--out", out, "CSV output file (default stdout)");
    add_overrides(eval, o);

    auto* sweep = app.add_subcommand("sweep", "evaluate a sweep spec over its SNR grid");
    sweep->add_option("--spec", spec_path, "sweep spec (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out, "CSV output file; one file per network when several are listed");
    add_overrides(sweep, o);

    auto* reproduce = app.add_subcommand("reproduce", "run a figure preset, write CSVs and a report");
    reproduce->add_option("figure", figure, "fig2, fig3 or fig4")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    reproduce->add_option("--out", out_dir, "output directory")->capture_default_str();
    reproduce->add_flag("--analytic-only", analytic_only, "skip the Monte Carlo columns");
    add_overrides(reproduce, o);

    auto* slope = app.add_subcommand("slope", "high-SNR slope of every scheme and network in a spec");
    slope->add_option("--spec", spec_path, "sweep spec (JSON)")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }

    try {
        if (*eval) {
            const auto scheme = parse_scheme(scheme_name);
            if (!scheme) throw InputError("--scheme: unknown scheme '" + scheme_name + "'");
            const auto engine = parse_engine(engine_name);
            if (!engine) throw InputError("--engine: unknown engine '" + engine_name + "'");
            return cmd_eval(config_path, *scheme, rs, *engine, o, out);
        }
        if (*sweep) return cmd_sweep(spec_path, out, o);
        if (*reproduce) return cmd_reproduce(figure, out_dir, o, analytic_only);
        if (*slope) return cmd_slope(spec_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (estimate " << e.estimate() << ", error bound " << e.error_bound()
                  << ")\n";
        return kEngineError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEngineError;
    }
    return 0;
}
