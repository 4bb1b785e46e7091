#pragma once

// Test-only reference computations, independent of the library code paths
// they are used to check.

#include "wlt/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// int_0^t (2 pi s eps^2)^{-1/2} exp(-d^2 / (2 s eps^2)) ds in closed form:
/// (1/eps) [2 sqrt(t) phi(D / sqrt t) - 2 D (1 - Phi(D / sqrt t))], D = |d| / eps.
inline double atom_characteristic(double d, double eps, double t) {
    const double big_d = std::abs(d) / eps;
    const double r = std::sqrt(t);
    return (2.0 * r * phi(big_d / r) - 2.0 * big_d * (1.0 - Phi(big_d / r))) / eps;
}

/// Characteristic of a density piece by composite Simpson over y of the
/// closed-form atom characteristic.
inline double piece_characteristic(double lo, double hi, double value, double x, double eps,
                                   double t, int panels = 20000) {
    const double h = (hi - lo) / panels;
    double s = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * atom_characteristic(lo + i * h - x, eps, t);
    }
    return value * s * h / 3.0;
}

/// sup over an equally spaced grid of window centers.
inline double concentration_scan(const wlt::WeightedMeasure& mu, double gamma, double lo, double hi,
                                 int n) {
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double c = lo + (hi - lo) * i / n;
        best = std::max(best, wlt::interval_mass(mu, c - gamma, c + gamma));
    }
    return best;
}

/// mu([a, b]) by a midpoint Riemann sum of the density plus an atom count.
inline double interval_mass_riemann(const wlt::WeightedMeasure& mu, double a, double b,
                                    int n = 1000000) {
    double s = 0.0;
    for (const auto& at : mu.atoms()) {
        if (at.location >= a && at.location <= b) s += at.mass;
    }
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) s += mu.density_at(a + (i + 0.5) * h) * h;
    return s;
}

/// Random measure: up to 5 atoms and up to 3 disjoint density pieces in [-3, 3].
inline wlt::WeightedMeasure random_measure(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> loc(-3.0, 3.0);
    std::uniform_real_distribution<double> mass(0.1, 2.0);
    std::uniform_int_distribution<int> count(0, 5);
    std::vector<wlt::Atom> atoms;
    const int n_atoms = count(rng);
    for (int i = 0; i < n_atoms; ++i) atoms.push_back({loc(rng), mass(rng)});
    std::vector<double> cuts;
    const int n_pieces = count(rng) % 4;
    for (int i = 0; i < 2 * n_pieces; ++i) cuts.push_back(loc(rng));
    std::sort(cuts.begin(), cuts.end());
    std::vector<wlt::DensityPiece> pieces;
    for (int i = 0; i < n_pieces; ++i) {
        if (cuts[2 * i] < cuts[2 * i + 1]) pieces.push_back({cuts[2 * i], cuts[2 * i + 1], mass(rng)});
    }
    return wlt::WeightedMeasure(std::move(atoms), std::move(pieces));
}

}  // namespace oracle
