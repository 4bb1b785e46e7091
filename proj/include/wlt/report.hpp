#pragma once

// CSV tables and versioned JSON summaries for experiment reports and bound
// certificates. Output is a pure function of the report, so identical runs
// give byte-identical files.

#include "wlt/bounds.hpp"
#include "wlt/experiments.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

namespace wlt {

inline constexpr int report_schema = 1;

using ordered_json = nlohmann::ordered_json;

/// %.12g, with "inf"/"-inf"/"nan" spelled out.
[[nodiscard]] inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

[[nodiscard]] inline std::string format_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

/// JSON cannot hold infinities; they become the strings "inf" / "-inf".
[[nodiscard]] inline ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

[[nodiscard]] inline ordered_json json_number(const std::optional<double>& v) {
    return v ? json_number(*v) : ordered_json(nullptr);
}

// --- sweep -----------------------------------------------------------------

inline constexpr const char* sweep_csv_header =
    "epsilon,start,lambda_hat,lambda_std_error,log_moment,log_std_error,oracle,target,"
    "n_paths,n_steps,seed,estimator";

inline void write_sweep_csv(std::ostream& os, const AsymptoticsReport& r) {
    os << sweep_csv_header << '\n';
    for (const SweepCell& c : r.cells) {
        os << format_number(c.epsilon) << ',' << format_number(c.start) << ','
           << format_number(c.lambda_hat) << ',' << format_number(c.lambda_std_error) << ','
           << format_number(c.log_moment) << ',' << format_number(c.log_std_error) << ','
           << format_number(c.oracle) << ',' << format_number(r.target) << ',' << c.n_paths
           << ',' << c.n_steps << ',' << c.seed << ','
           << (c.eta ? "kernel:" + format_number(*c.eta) : std::string("bridge")) << '\n';
    }
}

[[nodiscard]] inline ordered_json to_json(const SweepCell& c) {
    return {{"epsilon", c.epsilon},
            {"start", c.start},
            {"lambda_hat", c.lambda_hat},
            {"lambda_std_error", c.lambda_std_error},
            {"log_moment", c.log_moment},
            {"log_std_error", c.log_std_error},
            {"oracle", json_number(c.oracle)},
            {"matches_oracle", c.matches_oracle()},
            {"n_paths", c.n_paths},
            {"n_steps", c.n_steps},
            {"seed", c.seed},
            {"eta", json_number(c.eta)}};
}

[[nodiscard]] inline ordered_json to_json(const AsymptoticsReport& r) {
    ordered_json cells = ordered_json::array();
    for (const SweepCell& c : r.cells) cells.push_back(to_json(c));
    ordered_json summary = ordered_json::array();
    for (const SweepSummary& s : r.summary) {
        summary.push_back({{"epsilon", s.epsilon},
                           {"argmax_start", s.start},
                           {"lambda_hat", s.lambda_hat},
                           {"lambda_std_error", s.lambda_std_error},
                           {"oracle", json_number(s.oracle)}});
    }
    return {{"schema", report_schema},
            {"kind", "sweep"},
            {"measure", r.measure},
            {"t", r.t},
            {"starts", r.starts},
            {"target", r.target},
            {"summary", summary},
            {"cells", cells},
            {"checks",
             {{"oracle_ok", r.oracle_ok()},
              {"trend_ok", r.trend_ok()},
              {"trend_required", r.single_atom},
              {"pathwise_cap_ok", r.pathwise_cap_ok()}}},
            {"passed", r.passed()}};
}

// --- khasminskii -------------------------------------------------------------

inline constexpr const char* khasminskii_csv_header =
    "epsilon,horizon,start,moment,moment_std_error,oracle,pass,n_paths,n_steps,seed";

inline void write_khasminskii_csv(std::ostream& os, const KhasminskiiReport& r) {
    os << khasminskii_csv_header << '\n';
    for (const KhasminskiiRow& row : r.rows) {
        os << format_number(r.epsilon) << ',' << format_number(r.horizon) << ','
           << format_number(row.start) << ',' << format_number(row.moment) << ','
           << format_number(row.moment_std_error) << ',' << format_number(row.oracle) << ','
           << (row.pass ? 1 : 0) << ',' << r.n_paths << ',' << r.n_steps << ',' << r.seed << '\n';
    }
}

[[nodiscard]] inline ordered_json to_json(const KhasminskiiReport& r) {
    ordered_json rows = ordered_json::array();
    for (const KhasminskiiRow& row : r.rows) {
        rows.push_back({{"start", row.start},
                        {"moment", row.moment},
                        {"moment_std_error", row.moment_std_error},
                        {"log_moment", row.log_moment},
                        {"log_std_error", row.log_std_error},
                        {"oracle", json_number(row.oracle)},
                        {"pass", row.pass}});
    }
    return {{"schema", report_schema},
            {"kind", "khasminskii"},
            {"measure", r.measure},
            {"epsilon", r.epsilon},
            {"horizon", json_number(r.horizon)},
            {"sup_characteristic", r.sup_characteristic},
            {"n_paths", r.n_paths},
            {"n_steps", r.n_steps},
            {"seed", r.seed},
            {"rows", rows},
            {"note", r.note},
            {"passed", r.passed()}};
}

// --- counterexample ----------------------------------------------------------

inline constexpr const char* counterexample_csv_header =
    "epsilon,k,start,gap,regime,lambda_hat,lambda_std_error,merged_oracle,single_oracle,"
    "theorem_limit,merged_limit,exceeds_limit,n_paths,n_steps,seed";

inline void write_counterexample_csv(std::ostream& os, const CounterexampleReport& r) {
    os << counterexample_csv_header << '\n';
    for (const CounterexampleCell& c : r.cells) {
        os << format_number(c.cell.epsilon) << ',' << c.k << ',' << format_number(c.cell.start)
           << ',' << format_number(c.gap) << ',' << to_string(c.regime) << ','
           << format_number(c.cell.lambda_hat) << ',' << format_number(c.cell.lambda_std_error)
           << ',' << format_number(c.merged_oracle) << ',' << format_number(c.single_oracle)
           << ',' << format_number(r.theorem_limit) << ',' << format_number(r.merged_limit) << ','
           << (c.cell.lambda_hat > r.theorem_limit ? 1 : 0) << ',' << c.cell.n_paths << ','
           << c.cell.n_steps << ',' << c.cell.seed << '\n';
    }
}

[[nodiscard]] inline ordered_json to_json(const CounterexampleReport& r) {
    ordered_json cells = ordered_json::array();
    for (const CounterexampleCell& c : r.cells) {
        cells.push_back({{"epsilon", c.cell.epsilon},
                         {"k", c.k},
                         {"start", c.cell.start},
                         {"gap", c.gap},
                         {"regime", to_string(c.regime)},
                         {"lambda_hat", c.cell.lambda_hat},
                         {"lambda_std_error", c.cell.lambda_std_error},
                         {"merged_oracle", c.merged_oracle},
                         {"single_oracle", c.single_oracle},
                         {"excess_over_limit", c.excess(r.t)},
                         {"within_merged_oracle", c.within(c.merged_oracle)},
                         {"within_single_oracle", c.within(c.single_oracle)}});
    }
    return {{"schema", report_schema},
            {"kind", "counterexample"},
            {"K", r.max_k},
            {"t", r.t},
            {"theorem_limit", r.theorem_limit},
            {"merged_limit", r.merged_limit},
            {"seed", r.sweep.cells.empty() ? 0 : r.sweep.cells.front().seed},
            {"cells", cells},
            {"passed", r.passed()}};
}

// --- certificates --------------------------------------------------------------

[[nodiscard]] inline ordered_json to_json(const Provenance& p) {
    ordered_json values = ordered_json::object();
    for (const auto& [k, v] : p.values) values[k] = json_number(v);
    ordered_json parts = ordered_json::array();
    for (const Provenance& part : p.parts) parts.push_back(to_json(part));
    return {{"source", p.source}, {"values", values}, {"parts", parts}};
}

[[nodiscard]] inline ordered_json to_json(const BoundCertificate& c) {
    return {{"log_bound", json_number(c.log_bound)},
            {"lambda", c.lambda},
            {"gamma", json_number(c.gamma)},
            {"epsilon", c.epsilon},
            {"epsilon_max", json_number(c.epsilon_max)},
            {"t", c.t},
            {"vacuous", c.vacuous},
            {"provenance", to_json(c.provenance)}};
}

}  // namespace wlt
