// wlt: characteristics, exponential-moment bounds and Monte Carlo sweeps for
// weighted local times of eps*W.
//
//   wlt <subcommand> [--config run.json] [--measure '{...}'] [flags]
//
// Flags override values read from --config.

#include "wlt/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Flags {
    std::string config;
    std::string measure;
    std::string measure_file;
    std::optional<double> t;
    std::vector<double> eps;
    std::vector<double> starts;
    std::vector<double> horizons;
    std::optional<std::size_t> n_paths;
    std::optional<std::size_t> n_steps;
    std::optional<std::uint64_t> seed;
    std::optional<double> eta;
    std::optional<unsigned> workers;
    std::optional<double> p;
    std::optional<double> chi;
    std::optional<double> gamma;
    std::optional<double> lambda;
    std::optional<std::string> kind;
    std::optional<int> max_k;
    std::vector<int> ks;
    std::optional<std::string> output;
    std::optional<std::string> summary;
    std::optional<std::string> format;
};

void add_common(CLI::App& cmd, Flags& f) {
    cmd.add_option("--config", f.config, "JSON run config (flags override it)");
    cmd.add_option("--measure", f.measure, "inline JSON measure document");
    cmd.add_option("--measure-file", f.measure_file, "JSON measure document file");
    cmd.add_option("--t", f.t, "time horizon");
    cmd.add_option("--eps", f.eps, "noise levels")->delimiter(',');
    cmd.add_option("--x,--start", f.starts, "starting points")->delimiter(',');
    cmd.add_option("--output,-o", f.output, "output file (default stdout)");
    cmd.add_option("--format", f.format, "csv or json");
}

void add_simulation(CLI::App& cmd, Flags& f) {
    cmd.add_option("--n-paths", f.n_paths, "Monte Carlo paths (default 100000)");
    cmd.add_option("--n-steps", f.n_steps, "time steps per path (default 10000)");
    cmd.add_option("--seed", f.seed, "random seed (default 42)");
    cmd.add_option("--eta", f.eta, "kernel bandwidth in W units (default: bridge estimator)");
    cmd.add_option("--workers", f.workers, "worker threads (results do not depend on it)");
    cmd.add_option("--summary", f.summary, "also write the JSON summary to this file");
}

wlt::cli::RunConfig build_config(const Flags& f) {
    using namespace wlt;
    cli::RunConfig cfg;
    if (!f.config.empty()) cli::apply_document(cfg, load_document(f.config));
    if (!f.measure_file.empty()) cfg.measure = measure_from_json(load_document(f.measure_file));
    if (!f.measure.empty()) cfg.measure = parse_measure(f.measure);
    if (f.t) cfg.t = *f.t;
    if (!f.eps.empty()) cfg.epsilons = f.eps;
    if (!f.starts.empty()) cfg.starts = f.starts;
    if (!f.horizons.empty()) cfg.horizons = f.horizons;
    if (f.n_paths) cfg.sim.n_paths = *f.n_paths;
    if (f.n_steps) cfg.sim.n_steps = *f.n_steps;
    if (f.seed) cfg.sim.seed = *f.seed;
    if (f.eta) cfg.sim.eta = *f.eta;
    if (f.workers) cfg.sim.workers = *f.workers;
    if (f.p) cfg.p = *f.p;
    if (f.chi) cfg.chi = *f.chi;
    if (f.gamma) cfg.gamma = *f.gamma;
    if (f.lambda) cfg.lambda = *f.lambda;
    if (f.kind) cfg.bound_kinds = cli::parse_bound_kinds(*f.kind);
    if (f.max_k) cfg.max_k = *f.max_k;
    if (!f.ks.empty()) cfg.ks = f.ks;
    if (f.output) cfg.output = *f.output;
    if (f.summary) cfg.summary = *f.summary;
    if (f.format) cfg.format = cli::parse_format(*f.format);
    cli::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted local times of small-noise Brownian motion"};
    app.require_subcommand(1);
    Flags f;

    auto* characteristic = app.add_subcommand("characteristic", "tabulate E_x L_s^mu(eps W)");
    add_common(*characteristic, f);
    characteristic->add_option("--s", f.horizons, "time horizons (default t)")->delimiter(',');

    auto* bound = app.add_subcommand("bound", "exponential-moment bound certificates");
    add_common(*bound, f);
    bound->add_option("--kind", f.kind, "lemma2, khasminskii, composite or all (comma list)");
    bound->add_option("--lambda", f.lambda, "exponent multiplier (>= 1)");
    bound->add_option("--gamma", f.gamma, "concentration window half-width");
    bound->add_option("--p", f.p, "Hoelder exponent (> 1)");
    bound->add_option("--chi", f.chi, "diffuse concentration level");

    auto* estimate = app.add_subcommand("estimate", "Monte Carlo log E_x e^{L_t^mu(eps W)}");
    add_common(*estimate, f);
    add_simulation(*estimate, f);

    auto* sweep = app.add_subcommand("sweep", "eps sweep of eps^2 log E_x e^{L} vs the limit");
    add_common(*sweep, f);
    add_simulation(*sweep, f);

    auto* counterexample =
        app.add_subcommand("counterexample", "sweep the merging-pairs measure from x_k = k^2");
    add_common(*counterexample, f);
    add_simulation(*counterexample, f);
    counterexample->add_option("--K", f.max_k, "number of atom pairs (default 6)");
    counterexample->add_option("--k", f.ks, "start indices k (default all)")->delimiter(',');

    auto* khasminskii =
        app.add_subcommand("khasminskii", "check E_x e^{L_s*} <= 2 at the Khas'minskii horizon");
    add_common(*khasminskii, f);
    add_simulation(*khasminskii, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? wlt::cli::exit_ok : wlt::cli::exit_usage;
    }

    try {
        const wlt::cli::RunConfig cfg = build_config(f);
        std::ofstream file;
        if (!cfg.output.empty()) {
            file.open(cfg.output, std::ios::binary);
            if (!file) throw wlt::config_error("output", "cannot open " + cfg.output);
        }
        std::ostream& out = cfg.output.empty() ? std::cout : file;
        std::ofstream summary_file;
        std::ostream null_stream(nullptr);
        if (!cfg.summary.empty()) {
            summary_file.open(cfg.summary, std::ios::binary);
            if (!summary_file) throw wlt::config_error("summary", "cannot open " + cfg.summary);
        }
        std::ostream& summary = cfg.summary.empty() ? null_stream : summary_file;

        using namespace wlt::cli;
        if (characteristic->parsed()) return cmd_characteristic(cfg, out, std::cerr);
        if (bound->parsed()) return cmd_bound(cfg, out, std::cerr);
        if (estimate->parsed()) return cmd_estimate(cfg, out, summary);
        if (sweep->parsed()) return cmd_sweep(cfg, out, summary);
        if (counterexample->parsed()) return cmd_counterexample(cfg, out, summary);
        if (khasminskii->parsed()) return cmd_khasminskii(cfg, out, summary);
    } catch (const wlt::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return wlt::cli::exit_usage;
    } catch (const wlt::argument_error& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return wlt::cli::exit_usage;
    } catch (const wlt::validity_error& e) {
        std::cerr << "validity error: " << e.what() << '\n';
        return wlt::cli::exit_check_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return wlt::cli::exit_check_failed;
    }
    return wlt::cli::exit_usage;
}
