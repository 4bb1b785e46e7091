#pragma once

// Characteristic of the weighted local time of x + eps*W:
//   f(t, x) = E_x L_t^mu(eps W) = int_0^t int p_{eps^2 s}(y - x) mu(dy) ds,
// evaluated term by term (atoms and density pieces) by adaptive quadrature.

#include "wlt/errors.hpp"
#include "wlt/measure.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace wlt {

[[nodiscard]] inline double normal_cdf(double z) noexcept {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

[[nodiscard]] inline double normal_pdf(double z) noexcept {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// P(a <= Z <= b) for standard normal Z, without cancellation in the tails.
[[nodiscard]] inline double normal_mass(double a, double b) noexcept {
    constexpr double r = std::numbers::sqrt2;
    if (a >= 0.0) return 0.5 * (std::erfc(a / r) - std::erfc(b / r));
    if (b <= 0.0) return 0.5 * (std::erfc(-b / r) - std::erfc(-a / r));
    return 1.0 - 0.5 * std::erfc(-a / r) - 0.5 * std::erfc(b / r);
}

/// Transition density of eps*W over time s, from x to y.
[[nodiscard]] inline double heat_kernel(double x, double y, double s, double eps) {
    if (!(s > 0.0)) throw argument_error("heat_kernel: s must be > 0");
    if (!(eps > 0.0)) throw argument_error("heat_kernel: eps must be > 0");
    const double var = s * eps * eps;
    const double d = y - x;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

struct CharacteristicQuery {
    const WeightedMeasure& measure;
    double epsilon = 1.0;
    double t = 1.0;
    double x = 0.0;
};

namespace detail {

// Terms farther than this many diffusion scales are below e^-72 of their
// size at distance zero and are dropped.
inline constexpr double negligible_scales = 12.0;
inline constexpr double quadrature_tolerance = 1e-11;
inline constexpr double accuracy_target = 1e-9;
// Absolute error allowed relative to a term's largest possible size.
inline constexpr double absolute_floor = 1e-15;
inline constexpr unsigned max_depth = 25;

template <class F>
double integrate_checked(F&& f, double lower, double upper, double magnitude, const char* what) {
    using boost::math::quadrature::gauss_kronrod;
    // Mapped onto [0, 1].
    const double width = upper - lower;
    auto unit = [&](double tau) { return width * f(lower + width * tau); };
    double l1 = 0.0;
    const double value = gauss_kronrod<double, 15>::integrate(unit, 0.0, 1.0, max_depth,
                                                              quadrature_tolerance, nullptr, &l1);
    const double check =
        gauss_kronrod<double, 31>::integrate(unit, 0.0, 1.0, max_depth, quadrature_tolerance);
    const double gap = std::abs(value - check);
    if (!std::isfinite(value) || gap > accuracy_target * l1 + absolute_floor * magnitude) {
        std::ostringstream os;
        os << "characteristic: quadrature for " << what << " did not converge (15-point "
           << value << ", 31-point " << check << ")";
        throw numerical_error(os.str());
    }
    return value;
}

// int_0^upper f(u) du for an f that switches on near u = knee: plain on
// [0, knee], in log u above it.
template <class F>
double integrate_with_knee(F&& f, double upper, double knee, double magnitude, const char* what) {
    if (!(knee > 0.0) || knee >= 0.25 * upper) {
        return integrate_checked(f, 0.0, upper, magnitude, what);
    }
    const double inner = integrate_checked(f, 0.0, knee, magnitude, what);
    auto g = [&](double v) {
        const double u = std::exp(v);
        return f(u) * u;
    };
    return inner + integrate_checked(g, std::log(knee), std::log(upper), magnitude, what);
}

// int_0^t p_{eps^2 s}(d) ds after s = u^2.
inline double atom_term(double offset, double eps, double t) {
    const double root_t = std::sqrt(t);
    const double d = std::abs(offset);
    if (d > negligible_scales * eps * root_t) return 0.0;
    const double front = 2.0 / (std::sqrt(2.0 * std::numbers::pi) * eps);
    if (d == 0.0) return front * root_t;
    const double a = d * d / (2.0 * eps * eps);
    return integrate_with_knee([&](double u) { return front * std::exp(-a / (u * u)); }, root_t,
                               4.0 * std::sqrt(a), front * root_t, "atom");
}

// int_0^t P(x + eps W_s in [lo, hi)) ds after s = u^2.
inline double piece_term(const DensityPiece& p, double x, double eps, double t) {
    const double root_t = std::sqrt(t);
    const double reach = negligible_scales * eps * root_t;
    if (p.lo - x > reach || x - p.hi > reach) return 0.0;
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double scale = eps * u;
        return 2.0 * u * normal_mass((p.lo - x) / scale, (p.hi - x) / scale);
    };
    const double nearest = std::min(std::abs(p.lo - x), std::abs(p.hi - x));
    return integrate_with_knee(integrand, root_t, 4.0 * nearest / eps, t, "density piece");
}

}  // namespace detail

[[nodiscard]] inline double characteristic(const CharacteristicQuery& q) {
    if (!(q.epsilon > 0.0)) throw argument_error("characteristic: eps must be > 0");
    if (!(q.t > 0.0)) throw argument_error("characteristic: t must be > 0");
    double total = 0.0;
    for (const Atom& a : q.measure.atoms()) {
        total += a.mass * detail::atom_term(a.location - q.x, q.epsilon, q.t);
    }
    for (const DensityPiece& p : q.measure.density()) {
        if (p.value == 0.0) continue;
        total += p.value * detail::piece_term(p, q.x, q.epsilon, q.t);
    }
    return total;
}

struct CharacteristicMax {
    double x = 0.0;
    double value = 0.0;
};

/// Largest characteristic over starting points found by evaluating the
/// structured candidates (atoms, breakpoints, piece and gap midpoints) and
/// golden-section refinement between consecutive candidates. The result is
/// a lower bound on the true supremum, exact for a single atom.
[[nodiscard]] inline CharacteristicMax argmax_characteristic(const WeightedMeasure& mu, double eps,
                                                             double s) {
    if (!(s > 0.0)) throw argument_error("sup_characteristic: s must be > 0");
    if (!(eps > 0.0)) throw argument_error("sup_characteristic: eps must be > 0");
    if (mu.is_zero()) return {};

    std::vector<double> candidates;
    const auto atoms = mu.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        candidates.push_back(atoms[i].location);
        if (i + 1 < atoms.size()) {
            candidates.push_back(0.5 * (atoms[i].location + atoms[i + 1].location));
        }
    }
    for (const DensityPiece& p : mu.density()) {
        candidates.push_back(p.lo);
        candidates.push_back(0.5 * (p.lo + p.hi));
        candidates.push_back(p.hi);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    auto f = [&](double x) { return characteristic({mu, eps, s, x}); };
    CharacteristicMax best{candidates.front(), -1.0};
    for (double c : candidates) {
        const double v = f(c);
        if (v > best.value) best = {c, v};
    }

    constexpr double x_tolerance = 1e-10;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t i = 0; i + 1 < candidates.size(); ++i) {
        double a = candidates[i];
        double b = candidates[i + 1];
        if (b - a <= x_tolerance) continue;
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = f(c);
        double fd = f(d);
        while (b - a > x_tolerance) {
            if (fc >= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        if (fc > best.value) best = {c, fc};
        if (fd > best.value) best = {d, fd};
    }
    return best;
}

[[nodiscard]] inline double sup_characteristic(const WeightedMeasure& mu, double eps, double s) {
    return argmax_characteristic(mu, eps, s).value;
}

/// Largest s with sup_x f(s, x) <= 1/2, by bisection; +infinity for the
/// zero measure.
[[nodiscard]] inline double khasminskii_horizon(const WeightedMeasure& mu, double eps) {
    if (!(eps > 0.0)) throw argument_error("khasminskii_horizon: eps must be > 0");
    if (mu.is_zero()) return infinity;
    auto g = [&](double s) { return sup_characteristic(mu, eps, s); };

    double hi = eps * eps;
    int guard = 0;
    while (g(hi) <= 0.5) {
        hi *= 4.0;
        if (++guard > 600 || !std::isfinite(hi)) return infinity;
    }
    double lo = hi;
    guard = 0;
    do {
        lo *= 0.25;
        if (++guard > 600 || lo == 0.0) {
            throw numerical_error("khasminskii_horizon: no s > 0 with sup characteristic <= 1/2");
        }
    } while (g(lo) > 0.5);
    hi = std::min(hi, 4.0 * lo);

    constexpr double relative_tolerance = 1e-11;
    while (hi - lo > relative_tolerance * hi) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) <= 0.5 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace wlt
