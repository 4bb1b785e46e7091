#pragma once

// Seeded standard Brownian paths on a uniform grid, estimators of (weighted)
// local times, and log-space exponential-moment estimates.
//
// Only standard paths W (W_0 = 0) are generated. The process x + eps*W is
// handled through the scaling identity L^{delta_z}(x + eps W) =
// eps^-1 L^{(z - x)/eps}(W), so one batch serves every (eps, x).

#include "wlt/errors.hpp"
#include "wlt/measure.hpp"
#include "wlt/random.hpp"
#include "wlt/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <span>
#include <thread>
#include <vector>

namespace wlt {

/// One discretized path W at times k * t / n, k = 0..n.
struct PathView {
    std::span<const double> w;
    double t = 1.0;

    [[nodiscard]] std::size_t steps() const noexcept { return w.size() - 1; }
    [[nodiscard]] double dt() const noexcept { return t / static_cast<double>(steps()); }
};

/// A reproducible batch of standard Brownian paths. Paths are produced on
/// demand: path i depends only on (seed, i), never on evaluation order.
class PathBatch {
public:
    PathBatch(std::uint64_t seed, std::size_t n_paths, std::size_t n_steps, double t)
        : seed_(seed), n_paths_(n_paths), n_steps_(n_steps), t_(t) {
        if (n_paths < 1) throw argument_error("sample_paths: n_paths must be >= 1");
        if (n_steps < 1) throw argument_error("sample_paths: n_steps must be >= 1");
        if (!(t > 0.0) || !std::isfinite(t)) throw argument_error("sample_paths: t must be > 0");
    }

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::size_t n_paths() const noexcept { return n_paths_; }
    [[nodiscard]] std::size_t n_steps() const noexcept { return n_steps_; }
    [[nodiscard]] double t() const noexcept { return t_; }
    [[nodiscard]] double dt() const noexcept { return t_ / static_cast<double>(n_steps_); }

    /// Writes path `index` into `out` (size n_steps + 1).
    void generate(std::size_t index, std::span<double> out) const {
        if (out.size() != n_steps_ + 1) throw argument_error("PathBatch: buffer size mismatch");
        CounterStream stream(seed_, index);
        const double sd = std::sqrt(dt());
        out[0] = 0.0;
        std::size_t k = 1;
        double z0;
        double z1;
        for (; k + 1 <= n_steps_; k += 2) {
            stream.next_normal_pair(z0, z1);
            out[k] = out[k - 1] + sd * z0;
            out[k + 1] = out[k] + sd * z1;
        }
        if (k == n_steps_) {
            stream.next_normal_pair(z0, z1);
            out[k] = out[k - 1] + sd * z0;
        }
    }

    [[nodiscard]] std::vector<double> path(std::size_t index) const {
        std::vector<double> out(n_steps_ + 1);
        generate(index, out);
        return out;
    }

    /// All paths, row by row. Throws capacity_error above 2^28 values.
    [[nodiscard]] std::vector<std::vector<double>> materialize() const {
        constexpr std::size_t limit = std::size_t{1} << 28;
        if (n_paths_ > limit / (n_steps_ + 1)) {
            throw capacity_error("PathBatch: batch too large to materialize; evaluate lazily");
        }
        std::vector<std::vector<double>> rows;
        rows.reserve(n_paths_);
        for (std::size_t i = 0; i < n_paths_; ++i) rows.push_back(path(i));
        return rows;
    }

private:
    std::uint64_t seed_;
    std::size_t n_paths_;
    std::size_t n_steps_;
    double t_;
};

[[nodiscard]] inline PathBatch sample_paths(std::uint64_t seed, std::size_t n_paths,
                                            std::size_t n_steps, double t) {
    return PathBatch(seed, n_paths, n_steps, t);
}

/// Per-path outputs, stored column-major (one contiguous column per output).
class PathResults {
public:
    PathResults(std::size_t n_paths, std::size_t n_outputs)
        : n_paths_(n_paths), n_outputs_(n_outputs), data_(n_paths * n_outputs) {}

    [[nodiscard]] std::size_t n_paths() const noexcept { return n_paths_; }
    [[nodiscard]] std::size_t n_outputs() const noexcept { return n_outputs_; }

    [[nodiscard]] std::span<const double> column(std::size_t k) const {
        return std::span<const double>(data_).subspan(k * n_paths_, n_paths_);
    }

    double& at(std::size_t path, std::size_t k) { return data_[k * n_paths_ + path]; }

private:
    std::size_t n_paths_;
    std::size_t n_outputs_;
    std::vector<double> data_;
};

/// Evaluates `fn(PathView, std::span<double> out)` on every path of the
/// batch with `workers` threads. Each output lands at its path index, so the
/// result does not depend on the worker count.
template <class Fn>
[[nodiscard]] PathResults evaluate_paths(const PathBatch& batch, std::size_t n_outputs, Fn&& fn,
                                         unsigned workers = 1) {
    PathResults results(batch.n_paths(), n_outputs);
    constexpr std::size_t block = 256;
    const std::size_t n_blocks = (batch.n_paths() + block - 1) / block;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_blocks)));

    auto run = [&](unsigned worker) {
        std::vector<double> buffer(batch.n_steps() + 1);
        std::vector<double> out(n_outputs);
        for (std::size_t b = worker; b < n_blocks; b += workers) {
            const std::size_t end = std::min(batch.n_paths(), (b + 1) * block);
            for (std::size_t i = b * block; i < end; ++i) {
                batch.generate(i, buffer);
                std::fill(out.begin(), out.end(), 0.0);
                fn(PathView{buffer, batch.t()}, std::span<double>(out));
                for (std::size_t k = 0; k < n_outputs; ++k) results.at(i, k) = out[k];
            }
        }
    };

    if (workers == 1) {
        run(0);
        return results;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                try {
                    run(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

enum class LocalTimeMethod { kernel, bridge, exact_levy };

struct LocalTimeEstimate {
    double value = 0.0;
    double bandwidth = 0.0;
    LocalTimeMethod method = LocalTimeMethod::kernel;
};

[[nodiscard]] inline double default_bandwidth(double t, std::size_t n_steps) {
    return std::sqrt(t / static_cast<double>(n_steps));
}

/// (1 / 2 eta) int_0^t 1{|W_s - level| <= eta} ds with the time integral by
/// the trapezoidal rule on the path grid.
[[nodiscard]] inline LocalTimeEstimate local_time_kernel(const PathView& path, double level,
                                                         double eta) {
    if (!(eta > 0.0)) throw argument_error("local_time_kernel: eta must be > 0");
    const auto w = path.w;
    std::size_t hits = 0;
    for (double v : w) hits += std::abs(v - level) <= eta ? 1 : 0;
    const double ends = 0.5 * ((std::abs(w.front() - level) <= eta ? 1.0 : 0.0) +
                               (std::abs(w.back() - level) <= eta ? 1.0 : 0.0));
    const double occupation = (static_cast<double>(hits) - ends) * path.dt();
    return {occupation / (2.0 * eta), eta, LocalTimeMethod::kernel};
}

/// Sum over grid steps of E[local time at `level` | W_k, W_{k+1}], the exact
/// Brownian-bridge expectation
///   int_0^h p_s(z - a) p_{h-s}(b - z) ds / p_h(b - a)
///     = sqrt(pi h / 2) erfc((|z - a| + |b - z|) / sqrt(2h)) exp((b - a)^2 / 2h).
/// Unbiased for E L at any step size; no bandwidth.
[[nodiscard]] inline LocalTimeEstimate local_time_bridge(const PathView& path, double level) {
    const double h = path.dt();
    const double root_2h = std::sqrt(2.0 * h);
    const double front = std::sqrt(std::numbers::pi * h / 2.0);
    // Same-side steps with 2 d1 d2 / h > 50 contribute below e^-50 relative.
    const double far = 25.0 * h;
    const auto w = path.w;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        const double d1 = w[k] - level;
        const double d2 = w[k + 1] - level;
        if (d1 * d2 > far) continue;
        const double u = (std::abs(d1) + std::abs(d2)) / root_2h;
        const double v = (d2 - d1) / root_2h;
        total += front * std::erfc(u) * std::exp(v * v);
    }
    return {total, 0.0, LocalTimeMethod::bridge};
}

/// Samples of L_t^{(0)}(W) from W_0 = 0 drawn as sqrt(t) |Z| (Levy's identity).
[[nodiscard]] inline std::vector<double> exact_local_time(std::uint64_t seed,
                                                          std::size_t n_samples, double t) {
    if (!(t >= 0.0)) throw argument_error("exact_local_time: t must be >= 0");
    std::vector<double> out(n_samples);
    const double root_t = std::sqrt(t);
    for (std::size_t i = 0; i < n_samples; ++i) {
        CounterStream stream(seed, i);
        out[i] = root_t * std::abs(stream.next_normal());
    }
    return out;
}

/// L_t^mu(x + eps W) along one path. Atoms use the local time of W at level
/// (z - x) / eps: the bridge estimator by default, the kernel estimator when
/// a bandwidth `eta` (W units) is given. The density part is the left
/// Riemann sum of density(x + eps W_k), so it never exceeds t * max density.
[[nodiscard]] inline double weighted_local_time(const PathView& path, const WeightedMeasure& mu,
                                                double eps, double x,
                                                std::optional<double> eta = std::nullopt) {
    if (!(eps > 0.0)) throw argument_error("weighted_local_time: eps must be > 0");
    if (eta && !(*eta > 0.0)) throw argument_error("weighted_local_time: eta must be > 0");
    double total = 0.0;
    if (mu.has_atoms()) {
        const auto [lo_it, hi_it] = std::minmax_element(path.w.begin(), path.w.end());
        const double margin = eta ? *eta : 8.0 * std::sqrt(path.dt());
        const double lo = *lo_it - margin;
        const double hi = *hi_it + margin;
        for (const Atom& a : mu.atoms()) {
            const double level = (a.location - x) / eps;
            if (level < lo || level > hi) continue;
            const double l = eta ? local_time_kernel(path, level, *eta).value
                                 : local_time_bridge(path, level).value;
            total += a.mass / eps * l;
        }
    }
    if (mu.has_density()) {
        double sum = 0.0;
        const std::size_t n = path.steps();
        for (std::size_t k = 0; k < n; ++k) sum += mu.density_at(x + eps * path.w[k]);
        total += path.t * (sum / static_cast<double>(n));
    }
    return total;
}

struct SimulationParams {
    std::size_t n_paths = 100000;
    std::size_t n_steps = 10000;
    std::uint64_t seed = 42;
    std::optional<double> eta;  // kernel bandwidth in W units; unset = bridge estimator
    unsigned workers = 1;
};

/// Estimate of log E_x exp(L_t^mu(eps W)).
[[nodiscard]] inline LogMoment log_exp_moment(const WeightedMeasure& mu, double eps, double t,
                                              double x, const SimulationParams& sim) {
    if (!(eps > 0.0)) throw argument_error("log_exp_moment: eps must be > 0");
    const PathBatch batch(sim.seed, sim.n_paths, sim.n_steps, t);
    if (sim.eta && !(*sim.eta > 0.0)) throw argument_error("log_exp_moment: eta must be > 0");
    const PathResults lt = evaluate_paths(
        batch, 1,
        [&](const PathView& p, std::span<double> out) {
            out[0] = weighted_local_time(p, mu, eps, x, sim.eta);
        },
        sim.workers);
    return log_mean_exp(lt.column(0));
}

}  // namespace wlt
