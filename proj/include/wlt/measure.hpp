#pragma once

// Nonnegative locally finite measures on the line represented by finitely
// many point masses plus a piecewise-constant density.

#include "wlt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace wlt {

struct Atom {
    double location = 0.0;
    double mass = 0.0;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Constant density `value` on the half-open interval [lo, hi).
struct DensityPiece {
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;

    [[nodiscard]] double length() const noexcept { return hi - lo; }
    [[nodiscard]] double mass() const noexcept { return value * (hi - lo); }

    friend bool operator==(const DensityPiece&, const DensityPiece&) = default;
};

class WeightedMeasure {
public:
    WeightedMeasure() = default;

    /// Validates and sorts. Throws argument_error on nonpositive or
    /// non-finite masses, duplicate atom locations, empty or reversed
    /// pieces, negative densities and overlapping pieces.
    WeightedMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> density)
        : atoms_(std::move(atoms)), density_(std::move(density)) {
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const Atom& a = atoms_[i];
            if (!std::isfinite(a.location)) {
                throw argument_error("atoms[" + std::to_string(i) + "].loc: must be finite");
            }
            if (!std::isfinite(a.mass) || !(a.mass > 0.0)) {
                throw argument_error("atoms[" + std::to_string(i) +
                                     "].mass: must be finite and > 0");
            }
        }
        for (std::size_t i = 0; i < density_.size(); ++i) {
            const DensityPiece& p = density_[i];
            const std::string tag = "density[" + std::to_string(i) + "]";
            if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi)) {
                throw argument_error(tag + ": need finite lo < hi");
            }
            if (!std::isfinite(p.value) || p.value < 0.0) {
                throw argument_error(tag + ".value: must be finite and >= 0");
            }
        }
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& a, const Atom& b) { return a.location < b.location; });
        for (std::size_t i = 1; i < atoms_.size(); ++i) {
            if (atoms_[i].location == atoms_[i - 1].location) {
                std::ostringstream os;
                os << "atoms: duplicate location " << atoms_[i].location;
                throw argument_error(os.str());
            }
        }
        std::sort(density_.begin(), density_.end(),
                  [](const DensityPiece& a, const DensityPiece& b) { return a.lo < b.lo; });
        for (std::size_t i = 1; i < density_.size(); ++i) {
            if (density_[i].lo < density_[i - 1].hi) {
                throw argument_error("density: pieces overlap");
            }
        }
    }

    static WeightedMeasure dirac(double location, double mass = 1.0) {
        return WeightedMeasure({Atom{location, mass}}, {});
    }

    static WeightedMeasure uniform(double lo, double hi, double value = 1.0) {
        return WeightedMeasure({}, {DensityPiece{lo, hi, value}});
    }

    [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::span<const DensityPiece> density() const noexcept { return density_; }

    [[nodiscard]] bool has_atoms() const noexcept { return !atoms_.empty(); }
    [[nodiscard]] bool has_density() const noexcept { return !density_.empty(); }

    /// True for the zero measure (zero-valued density pieces count as empty).
    [[nodiscard]] bool is_zero() const noexcept {
        return atoms_.empty() && std::all_of(density_.begin(), density_.end(),
                                             [](const DensityPiece& p) { return p.value == 0.0; });
    }

    [[nodiscard]] double atomic_mass() const noexcept {
        double s = 0.0;
        for (const Atom& a : atoms_) s += a.mass;
        return s;
    }

    [[nodiscard]] double total_mass() const noexcept {
        double s = atomic_mass();
        for (const DensityPiece& p : density_) s += p.mass();
        return s;
    }

    [[nodiscard]] double density_max() const noexcept {
        double m = 0.0;
        for (const DensityPiece& p : density_) m = std::max(m, p.value);
        return m;
    }

    /// Density at y (0 outside the pieces).
    [[nodiscard]] double density_at(double y) const noexcept {
        auto it = std::upper_bound(density_.begin(), density_.end(), y,
                                   [](double v, const DensityPiece& p) { return v < p.lo; });
        if (it == density_.begin()) return 0.0;
        --it;
        return y < it->hi ? it->value : 0.0;
    }

    /// Smallest and largest point of the support (atoms and piece ends).
    [[nodiscard]] std::pair<double, double> support_hull() const noexcept {
        double lo = infinity;
        double hi = -infinity;
        if (!atoms_.empty()) {
            lo = atoms_.front().location;
            hi = atoms_.back().location;
        }
        if (!density_.empty()) {
            lo = std::min(lo, density_.front().lo);
            hi = std::max(hi, density_.back().hi);
        }
        return {lo, hi};
    }

    [[nodiscard]] WeightedMeasure scaled(double factor) const {
        if (!(factor > 0.0) || !std::isfinite(factor)) {
            throw argument_error("scale factor must be finite and > 0");
        }
        WeightedMeasure out = *this;
        for (Atom& a : out.atoms_) a.mass *= factor;
        for (DensityPiece& p : out.density_) p.value *= factor;
        return out;
    }

    /// Sum of two measures. Coinciding atoms merge; overlapping density is
    /// refined to the common breakpoints.
    friend WeightedMeasure operator+(const WeightedMeasure& a, const WeightedMeasure& b) {
        std::vector<Atom> atoms(a.atoms_.begin(), a.atoms_.end());
        for (const Atom& x : b.atoms_) {
            auto it = std::find_if(atoms.begin(), atoms.end(),
                                   [&](const Atom& y) { return y.location == x.location; });
            if (it != atoms.end()) {
                it->mass += x.mass;
            } else {
                atoms.push_back(x);
            }
        }
        std::vector<double> cuts;
        for (const auto* m : {&a, &b}) {
            for (const DensityPiece& p : m->density_) {
                cuts.push_back(p.lo);
                cuts.push_back(p.hi);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<DensityPiece> pieces;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            const double v = a.density_at(mid) + b.density_at(mid);
            if (v > 0.0) pieces.push_back({cuts[i], cuts[i + 1], v});
        }
        return WeightedMeasure(std::move(atoms), std::move(pieces));
    }

    friend bool operator==(const WeightedMeasure&, const WeightedMeasure&) = default;

private:
    std::vector<Atom> atoms_;
    std::vector<DensityPiece> density_;
};

/// mu([a, b]) with closed endpoints.
[[nodiscard]] inline double interval_mass(const WeightedMeasure& mu, double a, double b) {
    if (!(a <= b)) throw argument_error("interval_mass: need a <= b");
    const auto atoms = mu.atoms();
    auto first = std::lower_bound(atoms.begin(), atoms.end(), a,
                                  [](const Atom& x, double v) { return x.location < v; });
    double total = 0.0;
    for (auto it = first; it != atoms.end() && it->location <= b; ++it) total += it->mass;
    for (const DensityPiece& p : mu.density()) {
        const double overlap = std::min(p.hi, b) - std::max(p.lo, a);
        if (overlap > 0.0) total += p.value * overlap;
    }
    return total;
}

/// Largest point mass, 0 without atoms.
[[nodiscard]] inline double max_atom(const WeightedMeasure& mu) noexcept {
    double m = 0.0;
    for (const Atom& a : mu.atoms()) m = std::max(m, a.mass);
    return m;
}

/// Concentration function sup_x mu([x - gamma, x + gamma]).
///
/// x -> mu([x - gamma, x + gamma]) is piecewise linear and upper
/// semicontinuous, with kinks only where a window edge meets an atom or a
/// density breakpoint, so the supremum is attained by a window with one edge
/// on such a point. Windows are built from that edge so an atom there is
/// never lost to rounding of the center.
[[nodiscard]] inline double concentration(const WeightedMeasure& mu, double gamma) {
    if (!(gamma > 0.0)) throw argument_error("concentration: gamma must be > 0");
    const double width = 2.0 * gamma;
    double best = 0.0;
    auto try_edge = [&](double e) {
        best = std::max(best, interval_mass(mu, e - width, e));
        best = std::max(best, interval_mass(mu, e, e + width));
    };
    for (const Atom& a : mu.atoms()) try_edge(a.location);
    for (const DensityPiece& p : mu.density()) {
        try_edge(p.lo);
        try_edge(p.hi);
    }
    return best;
}

struct AtomicDiffuseSplit {
    WeightedMeasure atomic;
    WeightedMeasure diffuse;
    double gamma = 1.0;
};

/// Splits mu into its atoms and its density, and picks the largest dyadic
/// gamma = 2^-j (j >= 0) with concentration(diffuse, gamma) < chi.
[[nodiscard]] inline AtomicDiffuseSplit split_atoms_vs_diffuse(const WeightedMeasure& mu,
                                                               double chi) {
    if (!(chi > 0.0)) throw argument_error("split_atoms_vs_diffuse: chi must be > 0");
    const auto atoms = mu.atoms();
    const auto density = mu.density();
    AtomicDiffuseSplit out{
        WeightedMeasure({atoms.begin(), atoms.end()}, {}),
        WeightedMeasure({}, {density.begin(), density.end()}),
        1.0,
    };
    double gamma = 1.0;
    for (int j = 0; j <= 60; ++j, gamma *= 0.5) {
        if (concentration(out.diffuse, gamma) < chi) {
            out.gamma = gamma;
            return out;
        }
    }
    throw numerical_error("split_atoms_vs_diffuse: no dyadic gamma >= 2^-60 gives N < chi");
}

struct Restriction {
    WeightedMeasure inner;  // on [x - R, x + R]
    WeightedMeasure outer;
};

[[nodiscard]] inline Restriction restrict(const WeightedMeasure& mu, double x, double radius) {
    if (!(radius > 0.0)) throw argument_error("restrict: R must be > 0");
    const double lo = x - radius;
    const double hi = x + radius;
    std::vector<Atom> in_atoms;
    std::vector<Atom> out_atoms;
    for (const Atom& a : mu.atoms()) {
        (a.location >= lo && a.location <= hi ? in_atoms : out_atoms).push_back(a);
    }
    std::vector<DensityPiece> in_pieces;
    std::vector<DensityPiece> out_pieces;
    for (const DensityPiece& p : mu.density()) {
        if (p.lo < lo) out_pieces.push_back({p.lo, std::min(p.hi, lo), p.value});
        if (std::max(p.lo, lo) < std::min(p.hi, hi)) {
            in_pieces.push_back({std::max(p.lo, lo), std::min(p.hi, hi), p.value});
        }
        if (p.hi > hi) out_pieces.push_back({std::max(p.lo, hi), p.hi, p.value});
    }
    return {WeightedMeasure(std::move(in_atoms), std::move(in_pieces)),
            WeightedMeasure(std::move(out_atoms), std::move(out_pieces))};
}

/// Truncation to k <= K of sum_k (delta_{k^2} + delta_{k^2 + 2^-k}): a locally
/// finite measure with unit atoms whose pairs merge as k grows.
[[nodiscard]] inline WeightedMeasure counterexample_measure(int max_k) {
    // Beyond k = 40 the offset 2^-k is lost in the spacing of doubles near k^2.
    if (max_k < 1 || max_k > 40) {
        throw argument_error("counterexample: K must be in [1, 40]");
    }
    std::vector<Atom> atoms;
    atoms.reserve(2 * static_cast<std::size_t>(max_k));
    for (int k = 1; k <= max_k; ++k) {
        const double base = static_cast<double>(k) * k;
        atoms.push_back({base, 1.0});
        atoms.push_back({base + std::ldexp(1.0, -k), 1.0});
    }
    return WeightedMeasure(std::move(atoms), {});
}

/// Short human-readable description, e.g. "1*d(0) + 1*[0,1)".
[[nodiscard]] inline std::string describe(const WeightedMeasure& mu) {
    if (mu.is_zero()) return "0";
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    for (const Atom& a : mu.atoms()) {
        os << (first ? "" : " + ") << a.mass << "*d(" << a.location << ")";
        first = false;
    }
    for (const DensityPiece& p : mu.density()) {
        os << (first ? "" : " + ") << p.value << "*[" << p.lo << "," << p.hi << ")";
        first = false;
    }
    return os.str();
}

}  // namespace wlt
