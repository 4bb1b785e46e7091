#pragma once

#include "wlt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wlt {

/// Pairwise summation over a fixed split tree (halving down to blocks of
/// 16), so the result depends only on the values and their order.
[[nodiscard]] inline double pairwise_sum(std::span<const double> values) noexcept {
    if (values.size() <= 16) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Monte Carlo estimate of a log exponential moment. `std_error` is in log
/// units (delta method: sd(w) / (mean(w) sqrt(n))).
struct LogMoment {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

/// log((1/n) sum_i exp(v_i)) evaluated with the maximum exponent factored out.
[[nodiscard]] inline LogMoment log_mean_exp(std::span<const double> exponents) {
    const std::size_t n = exponents.size();
    if (n == 0) throw argument_error("log_mean_exp: no samples");
    const double top = *std::max_element(exponents.begin(), exponents.end());
    if (!std::isfinite(top)) throw argument_error("log_mean_exp: non-finite exponent");
    std::vector<double> w(n);
    std::transform(exponents.begin(), exponents.end(), w.begin(),
                   [top](double v) { return std::exp(v - top); });
    const double mean = pairwise_sum(w) / static_cast<double>(n);
    double se = 0.0;
    if (n > 1) {
        for (double& x : w) x = (x - mean) * (x - mean);
        const double var = pairwise_sum(w) / static_cast<double>(n - 1);
        se = std::sqrt(var) / (mean * std::sqrt(static_cast<double>(n)));
    }
    return {top + std::log(mean), se, n};
}

/// sup_x |F_n(x) - F(x)| for the empirical distribution of `samples`.
[[nodiscard]] inline double ks_distance(std::span<const double> samples,
                                        const std::function<double(double)>& cdf) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

[[nodiscard]] inline double mean(std::span<const double> v) {
    return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace wlt
