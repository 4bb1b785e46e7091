#pragma once

// Verification campaigns: finite-eps sweeps of eps^2 log E_x e^{L_t^mu(eps W)}
// against the small-noise limit, empirical Khas'minskii checks, and the
// non-uniformity example built from merging atom pairs.

#include "wlt/bounds.hpp"
#include "wlt/characteristics.hpp"
#include "wlt/errors.hpp"
#include "wlt/measure.hpp"
#include "wlt/simulation.hpp"
#include "wlt/statistics.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wlt {

/// Lambda(eps) = eps^2 log E_z e^{L_t^{a delta_z}(eps W)}
///             = a^2 t / 2 + eps^2 log(2 Phi(a sqrt(t) / eps)).
[[nodiscard]] inline double single_atom_lambda(double mass, double t, double eps) {
    const double lam = mass / eps;
    return eps * eps * (0.5 * lam * lam * t + std::log(2.0 * normal_cdf(lam * std::sqrt(t))));
}

/// E_0 e^{lambda L_t^{(0)}} = 2 e^{lambda^2 t / 2} Phi(lambda sqrt(t)).
[[nodiscard]] inline double levy_moment(double lambda, double t) {
    return 2.0 * std::exp(0.5 * lambda * lambda * t) * normal_cdf(lambda * std::sqrt(t));
}

struct SweepCell {
    double epsilon = 0.0;
    double start = 0.0;
    double lambda_hat = 0.0;        // eps^2 * log_moment
    double lambda_std_error = 0.0;  // eps^2 * log_std_error
    double log_moment = 0.0;
    double log_std_error = 0.0;
    std::optional<double> oracle;  // closed-form Lambda(eps) when known
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    std::optional<double> eta;

    [[nodiscard]] bool matches_oracle(double sigmas = 3.0) const {
        return !oracle || std::abs(lambda_hat - *oracle) <= sigmas * lambda_std_error;
    }
};

/// Per-eps value: the maximum over starts, the discrete stand-in for sup_x.
struct SweepSummary {
    double epsilon = 0.0;
    double start = 0.0;
    double lambda_hat = 0.0;
    double lambda_std_error = 0.0;
    std::optional<double> oracle;
};

struct AsymptoticsReport {
    std::string measure;
    double t = 1.0;
    std::vector<double> starts;
    std::vector<SweepCell> cells;  // eps decreasing, then starts in order
    std::vector<SweepSummary> summary;
    double target = 0.0;  // theorem_limit(mu, t)
    bool single_atom = false;
    std::optional<double> pathwise_cap_per_eps2;  // t * max density, density-only measures

    /// Each successive per-eps value is below its predecessor up to three
    /// combined standard errors.
    [[nodiscard]] bool trend_ok() const {
        for (std::size_t i = 1; i < summary.size(); ++i) {
            const double slack = 3.0 * std::hypot(summary[i].lambda_std_error,
                                                  summary[i - 1].lambda_std_error);
            if (!(summary[i].lambda_hat < summary[i - 1].lambda_hat + slack)) return false;
        }
        return true;
    }

    [[nodiscard]] bool oracle_ok() const {
        for (const SweepCell& c : cells) {
            if (!c.matches_oracle()) return false;
        }
        return true;
    }

    /// Lambda_hat <= eps^2 t D, which holds path by path for density-only mu.
    [[nodiscard]] bool pathwise_cap_ok() const {
        if (!pathwise_cap_per_eps2) return true;
        for (const SweepCell& c : cells) {
            if (!(c.lambda_hat <= c.epsilon * c.epsilon * *pathwise_cap_per_eps2)) return false;
        }
        return true;
    }

    [[nodiscard]] bool passed() const {
        return oracle_ok() && pathwise_cap_ok() && (!single_atom || trend_ok());
    }
};

namespace detail {

inline void check_eps_grid(const std::vector<double>& eps_grid) {
    if (eps_grid.empty()) throw argument_error("eps grid must not be empty");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0) || !std::isfinite(eps_grid[i])) {
            throw argument_error("eps grid: values must be finite and > 0");
        }
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1])) {
            throw argument_error("eps grid: must be strictly decreasing");
        }
    }
}

inline std::vector<double> default_starts(const WeightedMeasure& mu) {
    std::vector<double> starts;
    for (const Atom& a : mu.atoms()) starts.push_back(a.location);
    if (starts.empty()) {
        for (const DensityPiece& p : mu.density()) starts.push_back(0.5 * (p.lo + p.hi));
    }
    if (starts.empty()) starts.push_back(0.0);
    return starts;
}

inline std::optional<double> cell_oracle(const WeightedMeasure& mu, double t, double eps,
                                         double start) {
    if (mu.is_zero()) return 0.0;
    if (mu.atoms().size() == 1 && !mu.has_density() && mu.atoms()[0].location == start) {
        return single_atom_lambda(mu.atoms()[0].mass, t, eps);
    }
    return std::nullopt;
}

}  // namespace detail

/// Estimates Lambda(eps) for every (eps, start) cell from one shared path
/// batch. Empty `starts` means the atom locations (or the density piece
/// midpoints when there are no atoms).
[[nodiscard]] inline AsymptoticsReport asymptotic_sweep(const WeightedMeasure& mu, double t,
                                                        std::vector<double> starts,
                                                        const std::vector<double>& eps_grid,
                                                        const SimulationParams& sim) {
    if (!(t > 0.0)) throw argument_error("asymptotic_sweep: t must be > 0");
    detail::check_eps_grid(eps_grid);
    if (starts.empty()) starts = detail::default_starts(mu);

    AsymptoticsReport report;
    report.measure = describe(mu);
    report.t = t;
    report.starts = starts;
    report.target = theorem_limit(mu, t);
    report.single_atom = mu.atoms().size() == 1 && !mu.has_density();
    if (!mu.has_atoms() && mu.has_density()) report.pathwise_cap_per_eps2 = t * mu.density_max();

    const PathBatch batch(sim.seed, sim.n_paths, sim.n_steps, t);
    const std::size_t n_cells = eps_grid.size() * starts.size();
    const PathResults lt = evaluate_paths(
        batch, n_cells,
        [&](const PathView& p, std::span<double> out) {
            std::size_t k = 0;
            for (double eps : eps_grid) {
                for (double x : starts) out[k++] = weighted_local_time(p, mu, eps, x, sim.eta);
            }
        },
        sim.workers);

    std::size_t k = 0;
    for (double eps : eps_grid) {
        SweepSummary best;
        best.epsilon = eps;
        bool first = true;
        for (double x : starts) {
            const LogMoment m = log_mean_exp(lt.column(k++));
            SweepCell cell;
            cell.epsilon = eps;
            cell.start = x;
            cell.log_moment = m.estimate;
            cell.log_std_error = m.std_error;
            cell.lambda_hat = eps * eps * m.estimate;
            cell.lambda_std_error = eps * eps * m.std_error;
            cell.oracle = detail::cell_oracle(mu, t, eps, x);
            cell.n_paths = sim.n_paths;
            cell.n_steps = sim.n_steps;
            cell.seed = sim.seed;
            cell.eta = sim.eta;
            if (first || cell.lambda_hat > best.lambda_hat) {
                best = {eps, x, cell.lambda_hat, cell.lambda_std_error, cell.oracle};
                first = false;
            }
            report.cells.push_back(cell);
        }
        report.summary.push_back(best);
    }
    return report;
}

struct KhasminskiiRow {
    double start = 0.0;
    double moment = 0.0;  // estimate of E_x e^{L_s}
    double moment_std_error = 0.0;
    double log_moment = 0.0;
    double log_std_error = 0.0;
    std::optional<double> oracle;
    bool pass = false;  // moment <= 2 + 3 * moment_std_error
};

struct KhasminskiiReport {
    std::string measure;
    double epsilon = 0.0;
    double horizon = 0.0;  // s*
    double sup_characteristic = 0.0;
    std::vector<KhasminskiiRow> rows;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    std::string note;

    [[nodiscard]] bool passed() const {
        for (const KhasminskiiRow& r : rows) {
            if (!r.pass) return false;
        }
        return true;
    }
};

/// Monte Carlo check that E_x e^{L_{s*}} <= 2 at the Khas'minskii horizon s*.
[[nodiscard]] inline KhasminskiiReport khasminskii_check(const WeightedMeasure& mu, double eps,
                                                         const SimulationParams& sim) {
    KhasminskiiReport report;
    report.measure = describe(mu);
    report.epsilon = eps;
    report.n_paths = sim.n_paths;
    report.n_steps = sim.n_steps;
    report.seed = sim.seed;
    const double s = khasminskii_horizon(mu, eps);
    report.horizon = s;
    if (std::isinf(s)) {
        report.note = "zero measure: horizon undefined, check vacuous";
        return report;
    }
    report.sup_characteristic = sup_characteristic(mu, eps, s);

    const std::vector<double> starts = detail::default_starts(mu);
    const PathBatch batch(sim.seed, sim.n_paths, sim.n_steps, s);
    const PathResults lt = evaluate_paths(
        batch, starts.size(),
        [&](const PathView& p, std::span<double> out) {
            for (std::size_t i = 0; i < starts.size(); ++i) {
                out[i] = weighted_local_time(p, mu, eps, starts[i], sim.eta);
            }
        },
        sim.workers);
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const LogMoment m = log_mean_exp(lt.column(i));
        KhasminskiiRow row;
        row.start = starts[i];
        row.log_moment = m.estimate;
        row.log_std_error = m.std_error;
        row.moment = std::exp(m.estimate);
        row.moment_std_error = row.moment * m.std_error;
        if (mu.atoms().size() == 1 && !mu.has_density()) {
            row.oracle = levy_moment(mu.atoms()[0].mass / eps, s);
        }
        row.pass = row.moment <= 2.0 + 3.0 * row.moment_std_error;
        report.rows.push_back(row);
    }
    return report;
}

enum class PairRegime { merged, intermediate, separated };

[[nodiscard]] inline const char* to_string(PairRegime r) noexcept {
    switch (r) {
        case PairRegime::merged: return "merged";
        case PairRegime::intermediate: return "intermediate";
        case PairRegime::separated: return "separated";
    }
    return "?";
}

/// Pair at k^2, k^2 + 2^-k looks like one atom of mass 2 once the gap is
/// far below the diffusion scale eps sqrt(t), and like a single unit atom
/// once it is far above.
[[nodiscard]] inline PairRegime pair_regime(double gap, double eps, double t) {
    const double scale = eps * std::sqrt(t);
    if (gap <= scale / 16.0) return PairRegime::merged;
    if (gap >= 8.0 * scale) return PairRegime::separated;
    return PairRegime::intermediate;
}

struct CounterexampleCell {
    int k = 0;
    double gap = 0.0;
    SweepCell cell;
    double merged_oracle = 0.0;  // Lambda(eps) for 2 delta_0
    double single_oracle = 0.0;  // Lambda(eps) for delta_0
    PairRegime regime = PairRegime::intermediate;

    [[nodiscard]] double excess(double t) const { return cell.lambda_hat - 0.5 * t; }

    [[nodiscard]] bool within(double oracle) const {
        return std::abs(cell.lambda_hat - oracle) <= 3.0 * cell.lambda_std_error;
    }
};

struct CounterexampleReport {
    int max_k = 0;
    double t = 1.0;
    double theorem_limit = 0.0;  // t/2 for unit atoms
    double merged_limit = 0.0;   // 2t, the limit for 2 delta_0
    AsymptoticsReport sweep;
    std::vector<CounterexampleCell> cells;

    /// Merged starts exceed t/2 by at least t and match the 2 delta_0
    /// oracle; separated starts match the single-atom oracle.
    [[nodiscard]] bool passed() const {
        for (const CounterexampleCell& c : cells) {
            if (c.regime == PairRegime::merged &&
                (!(c.excess(t) >= t) || !c.within(c.merged_oracle))) {
                return false;
            }
            if (c.regime == PairRegime::separated && !c.within(c.single_oracle)) return false;
        }
        return true;
    }
};

/// Sweeps the truncated measure sum_{k<=K} (delta_{k^2} + delta_{k^2+2^-k})
/// from the starts x_k = k^2 (all k by default).
[[nodiscard]] inline CounterexampleReport counterexample_run(int max_k, double t,
                                                             const std::vector<double>& eps_grid,
                                                             const SimulationParams& sim,
                                                             std::vector<int> ks = {}) {
    const WeightedMeasure mu = counterexample_measure(max_k);
    if (ks.empty()) {
        for (int k = 1; k <= max_k; ++k) ks.push_back(k);
    }
    std::vector<double> starts;
    for (int k : ks) {
        if (k < 1 || k > max_k) throw argument_error("counterexample: start index out of range");
        starts.push_back(static_cast<double>(k) * k);
    }

    CounterexampleReport report;
    report.max_k = max_k;
    report.t = t;
    report.theorem_limit = theorem_limit(mu, t);
    report.merged_limit = 2.0 * t;
    report.sweep = asymptotic_sweep(mu, t, starts, eps_grid, sim);
    std::size_t i = 0;
    for (double eps : eps_grid) {
        for (int k : ks) {
            CounterexampleCell c;
            c.k = k;
            c.gap = std::ldexp(1.0, -k);
            c.cell = report.sweep.cells[i++];
            c.merged_oracle = single_atom_lambda(2.0, t, eps);
            c.single_oracle = single_atom_lambda(1.0, t, eps);
            c.regime = pair_regime(c.gap, eps, t);
            report.cells.push_back(c);
        }
    }
    return report;
}

}  // namespace wlt
