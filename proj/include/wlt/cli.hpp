#pragma once

// Subcommands of the `wlt` tool. Each takes a validated RunConfig, writes its
// table to `out` and diagnostics to `err`, and returns the process exit code:
//   0  all requested checks passed
//   1  a check failed or a bound was requested outside its validity range
//   2  malformed configuration or violated precondition

#include "wlt/bounds.hpp"
#include "wlt/characteristics.hpp"
#include "wlt/config.hpp"
#include "wlt/errors.hpp"
#include "wlt/experiments.hpp"
#include "wlt/measure.hpp"
#include "wlt/report.hpp"
#include "wlt/simulation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace wlt::cli {

enum class Format { csv, json };

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;

struct RunConfig {
    WeightedMeasure measure;
    double t = 1.0;
    std::vector<double> epsilons{1.0};
    std::vector<double> starts;    // empty: atom locations
    std::vector<double> horizons;  // characteristic times s; empty: {t}
    SimulationParams sim;
    double p = 2.0;
    double chi = 0.1;
    double gamma = 1.0;
    double lambda = 1.0;
    std::vector<std::string> bound_kinds{"lemma2"};
    int max_k = 6;
    std::vector<int> ks;  // counterexample starts k^2; empty: all
    std::string output;   // empty: stdout
    std::string summary;  // optional JSON summary path next to a CSV table
    Format format = Format::csv;
};

namespace detail {

inline std::vector<double> number_list(const nlohmann::json& v, const std::string& field) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(v.get<double>());
    } else if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_number()) throw config_error(field, "must contain only numbers");
            out.push_back(x.get<double>());
        }
    } else {
        throw config_error(field, "must be a number or an array of numbers");
    }
    return out;
}

inline double number(const nlohmann::json& v, const std::string& field) {
    if (!v.is_number()) throw config_error(field, "must be a number");
    return v.get<double>();
}

inline std::uint64_t count(const nlohmann::json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw config_error(field, "must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

inline std::string text(const nlohmann::json& v, const std::string& field) {
    if (!v.is_string()) throw config_error(field, "must be a string");
    return v.get<std::string>();
}

}  // namespace detail

[[nodiscard]] inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw config_error("format", "must be csv or json");
}

[[nodiscard]] inline std::vector<std::string> parse_bound_kinds(const std::string& s) {
    std::vector<std::string> kinds;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item == "all") {
            kinds.insert(kinds.end(), {"lemma2", "khasminskii", "composite"});
        } else if (item == "lemma2" || item == "khasminskii" || item == "composite") {
            kinds.push_back(item);
        } else {
            throw config_error("kind", "unknown bound kind '" + item + "'");
        }
    }
    if (kinds.empty()) throw config_error("kind", "must name at least one bound");
    return kinds;
}

/// Overlays the keys of a config document onto `cfg`.
inline void apply_document(RunConfig& cfg, const nlohmann::json& doc) {
    if (!doc.is_object()) throw config_error("config", "must be an object");
    for (const auto& [key, v] : doc.items()) {
        if (key == "measure") {
            cfg.measure = v.is_string() ? measure_from_json(load_document(v.get<std::string>()))
                                        : measure_from_json(v);
        } else if (key == "t") {
            cfg.t = detail::number(v, key);
        } else if (key == "epsilon") {
            cfg.epsilons = detail::number_list(v, key);
        } else if (key == "starts" || key == "x") {
            cfg.starts = detail::number_list(v, key);
        } else if (key == "s") {
            cfg.horizons = detail::number_list(v, key);
        } else if (key == "n_paths") {
            cfg.sim.n_paths = detail::count(v, key);
        } else if (key == "n_steps") {
            cfg.sim.n_steps = detail::count(v, key);
        } else if (key == "seed") {
            cfg.sim.seed = detail::count(v, key);
        } else if (key == "eta") {
            if (v.is_null()) {
                cfg.sim.eta.reset();
            } else {
                cfg.sim.eta = detail::number(v, key);
            }
        } else if (key == "workers") {
            cfg.sim.workers = static_cast<unsigned>(detail::count(v, key));
        } else if (key == "p") {
            cfg.p = detail::number(v, key);
        } else if (key == "chi") {
            cfg.chi = detail::number(v, key);
        } else if (key == "gamma") {
            cfg.gamma = detail::number(v, key);
        } else if (key == "lambda") {
            cfg.lambda = detail::number(v, key);
        } else if (key == "kind") {
            cfg.bound_kinds = parse_bound_kinds(detail::text(v, key));
        } else if (key == "K") {
            cfg.max_k = static_cast<int>(detail::count(v, key));
        } else if (key == "ks") {
            cfg.ks.clear();
            for (double k : detail::number_list(v, key)) cfg.ks.push_back(static_cast<int>(k));
        } else if (key == "output") {
            cfg.output = detail::text(v, key);
        } else if (key == "summary") {
            cfg.summary = detail::text(v, key);
        } else if (key == "format") {
            cfg.format = parse_format(detail::text(v, key));
        } else {
            throw config_error(key, "unknown key");
        }
    }
}

/// Checks the numeric fields every subcommand relies on.
inline void validate(const RunConfig& cfg) {
    auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v)) throw config_error(field, "must be finite and > 0");
    };
    positive(cfg.t, "t");
    if (cfg.epsilons.empty()) throw config_error("epsilon", "must not be empty");
    for (double e : cfg.epsilons) positive(e, "epsilon");
    for (double s : cfg.horizons) positive(s, "s");
    for (double x : cfg.starts) {
        if (!std::isfinite(x)) throw config_error("starts", "must be finite");
    }
    if (cfg.sim.n_paths < 1) throw config_error("n_paths", "must be >= 1");
    if (cfg.sim.n_steps < 1) throw config_error("n_steps", "must be >= 1");
    if (cfg.sim.eta) positive(*cfg.sim.eta, "eta");
    if (cfg.sim.workers < 1) throw config_error("workers", "must be >= 1");
    if (!(cfg.p > 1.0)) throw config_error("p", "must be > 1");
    positive(cfg.chi, "chi");
    positive(cfg.gamma, "gamma");
    if (!(cfg.lambda >= 1.0)) throw config_error("lambda", "must be >= 1");
    if (cfg.max_k < 1 || cfg.max_k > 40) throw config_error("K", "must be in [1, 40]");
    for (int k : cfg.ks) {
        if (k < 1 || k > cfg.max_k) throw config_error("ks", "must lie in [1, K]");
    }
}

namespace detail {

inline std::vector<double> decreasing_grid(std::vector<double> eps) {
    std::sort(eps.begin(), eps.end(), std::greater<>());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    return eps;
}

inline void write_json(std::ostream& os, const nlohmann::ordered_json& j) {
    os << j.dump(2) << '\n';
}

}  // namespace detail

inline int cmd_characteristic(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
    const std::vector<double> xs =
        cfg.starts.empty() ? wlt::detail::default_starts(cfg.measure) : cfg.starts;
    const std::vector<double> ss = cfg.horizons.empty() ? std::vector<double>{cfg.t} : cfg.horizons;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    if (cfg.format == Format::csv) out << "epsilon,s,x,value\n";
    for (double eps : cfg.epsilons) {
        for (double s : ss) {
            for (double x : xs) {
                const double v = characteristic({cfg.measure, eps, s, x});
                if (cfg.format == Format::csv) {
                    out << format_number(eps) << ',' << format_number(s) << ','
                        << format_number(x) << ',' << format_number(v) << '\n';
                } else {
                    rows.push_back({{"epsilon", eps}, {"s", s}, {"x", x}, {"value", v}});
                }
            }
        }
    }
    if (cfg.format == Format::json) {
        detail::write_json(out, {{"schema", report_schema},
                                 {"kind", "characteristic"},
                                 {"measure", describe(cfg.measure)},
                                 {"rows", rows}});
    }
    return exit_ok;
}

inline int cmd_bound(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    nlohmann::ordered_json certs = nlohmann::ordered_json::array();
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    if (cfg.format == Format::csv) {
        out << "kind,epsilon,log_bound,lambda,gamma,epsilon_max,t,vacuous\n";
    }
    for (double eps : cfg.epsilons) {
        for (const std::string& kind : cfg.bound_kinds) {
            try {
                BoundCertificate c;
                if (kind == "lemma2") {
                    c = lemma2_bound(cfg.measure, cfg.lambda, cfg.gamma, cfg.t, eps);
                } else if (kind == "khasminskii") {
                    c = khasminskii_bound(cfg.measure, eps, cfg.t);
                } else {
                    c = composite_upper_bound(cfg.measure, cfg.t, eps, cfg.p, cfg.chi);
                }
                if (cfg.format == Format::csv) {
                    out << kind << ',' << format_number(eps) << ',' << format_number(c.log_bound)
                        << ',' << format_number(c.lambda) << ',' << format_number(c.gamma) << ','
                        << format_number(c.epsilon_max) << ',' << format_number(c.t) << ','
                        << (c.vacuous ? 1 : 0) << '\n';
                }
                nlohmann::ordered_json j = to_json(c);
                j["kind"] = kind;
                certs.push_back(std::move(j));
            } catch (const validity_error& e) {
                err << "validity error (" << kind << ", eps = " << format_number(eps)
                    << "): " << e.what() << " [threshold " << format_number(e.threshold())
                    << "]\n";
                failures.push_back({{"kind", kind},
                                    {"epsilon", eps},
                                    {"threshold", json_number(e.threshold())},
                                    {"message", e.what()}});
            }
        }
    }
    if (cfg.format == Format::json) {
        detail::write_json(out, {{"schema", report_schema},
                                 {"kind", "bound"},
                                 {"measure", describe(cfg.measure)},
                                 {"certificates", certs},
                                 {"validity_errors", failures}});
    }
    return failures.empty() ? exit_ok : exit_check_failed;
}

namespace detail {

template <class Report, class CsvWriter>
int emit(const RunConfig& cfg, const Report& report, CsvWriter&& write_csv, std::ostream& out,
         std::ostream& summary, bool pass) {
    if (cfg.format == Format::csv) {
        write_csv(out, report);
    } else {
        write_json(out, to_json(report));
    }
    if (summary.good() && &summary != &out) write_json(summary, to_json(report));
    return pass ? exit_ok : exit_check_failed;
}

}  // namespace detail

/// Single log exponential moment per (eps, start); reports without checks.
inline int cmd_estimate(const RunConfig& cfg, std::ostream& out, std::ostream& summary) {
    const AsymptoticsReport r = asymptotic_sweep(cfg.measure, cfg.t, cfg.starts,
                                                 detail::decreasing_grid(cfg.epsilons), cfg.sim);
    return detail::emit(cfg, r, write_sweep_csv, out, summary, true);
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& summary) {
    const AsymptoticsReport r = asymptotic_sweep(cfg.measure, cfg.t, cfg.starts,
                                                 detail::decreasing_grid(cfg.epsilons), cfg.sim);
    return detail::emit(cfg, r, write_sweep_csv, out, summary, r.passed());
}

inline int cmd_counterexample(const RunConfig& cfg, std::ostream& out, std::ostream& summary) {
    const CounterexampleReport r = counterexample_run(
        cfg.max_k, cfg.t, detail::decreasing_grid(cfg.epsilons), cfg.sim, cfg.ks);
    return detail::emit(cfg, r, write_counterexample_csv, out, summary, r.passed());
}

inline int cmd_khasminskii(const RunConfig& cfg, std::ostream& out, std::ostream& summary) {
    std::vector<KhasminskiiReport> reports;
    bool pass = true;
    for (double eps : cfg.epsilons) {
        reports.push_back(khasminskii_check(cfg.measure, eps, cfg.sim));
        pass = pass && reports.back().passed();
    }
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (const auto& r : reports) all.push_back(to_json(r));
    const nlohmann::ordered_json doc = {
        {"schema", report_schema}, {"kind", "khasminskii"}, {"reports", all}, {"passed", pass}};
    if (cfg.format == Format::csv) {
        out << khasminskii_csv_header << '\n';
        for (const auto& r : reports) {
            std::ostringstream block;
            write_khasminskii_csv(block, r);
            const std::string s = block.str();
            out << s.substr(s.find('\n') + 1);
        }
    } else {
        detail::write_json(out, doc);
    }
    if (summary.good() && &summary != &out) detail::write_json(summary, doc);
    return pass ? exit_ok : exit_check_failed;
}

}  // namespace wlt::cli
