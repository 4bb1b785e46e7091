#pragma once

// Explicit upper bounds on log sup_x E_x exp(lambda L_t^mu(eps W)) and the
// small-noise limit (t/2) * (max atom)^2.

#include "wlt/characteristics.hpp"
#include "wlt/errors.hpp"
#include "wlt/measure.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wlt {

/// Which construction produced a certificate, with every input and
/// intermediate value that went into it.
struct Provenance {
    std::string source;
    std::vector<std::pair<std::string, double>> values;
    std::vector<Provenance> parts;

    [[nodiscard]] std::optional<double> get(std::string_view key) const {
        for (const auto& [k, v] : values) {
            if (k == key) return v;
        }
        return std::nullopt;
    }
};

struct BoundCertificate {
    double log_bound = 0.0;  // upper bound on log sup_x E_x e^{lambda L_t}
    double lambda = 1.0;
    std::optional<double> gamma;
    double epsilon = 0.0;  // noise level the certificate was evaluated at
    double epsilon_max = infinity;  // asserted only for eps in (0, epsilon_max)
    double t = 0.0;
    bool vacuous = false;  // the bounded functional is identically zero
    Provenance provenance;
};

/// c0 = (2/pi) (1 + 2 sum_{k>=1} exp(-(2k-1)^2 / 2))^2.
[[nodiscard]] inline double theta_constant() noexcept {
    double sum = 0.0;
    for (int k = 1;; ++k) {
        const double odd = 2.0 * k - 1.0;
        sum += std::exp(-odd * odd / 2.0);
        const double next = odd + 2.0;
        if (std::exp(-next * next / 2.0) < 1e-16) break;
    }
    const double factor = 1.0 + 2.0 * sum;
    return (2.0 / std::numbers::pi) * factor * factor;
}

/// Threshold (gamma (2 N(nu, gamma))^2 c0 lambda^2)^{1/3} below which the
/// concentration bound holds; +infinity when N(nu, gamma) = 0.
[[nodiscard]] inline double epsilon_threshold(const WeightedMeasure& nu, double lambda,
                                              double gamma) {
    if (!(lambda >= 1.0)) throw argument_error("epsilon_threshold: lambda must be >= 1");
    if (!(gamma > 0.0)) throw argument_error("epsilon_threshold: gamma must be > 0");
    const double n = concentration(nu, gamma);
    if (n == 0.0) return infinity;
    return std::cbrt(gamma * (2.0 * n) * (2.0 * n) * theta_constant() * lambda * lambda);
}

/// log 2 + (4 log 2) c0 N(nu, gamma)^2 t lambda^2 / eps^2, valid for
/// eps < epsilon_threshold(nu, lambda, gamma).
[[nodiscard]] inline BoundCertificate lemma2_bound(const WeightedMeasure& nu, double lambda,
                                                   double gamma, double t, double eps) {
    if (!(lambda >= 1.0)) throw argument_error("lemma2_bound: lambda must be >= 1");
    if (!(gamma > 0.0)) throw argument_error("lemma2_bound: gamma must be > 0");
    if (!(t > 0.0)) throw argument_error("lemma2_bound: t must be > 0");
    if (!(eps > 0.0)) throw argument_error("lemma2_bound: eps must be > 0");
    const double n = concentration(nu, gamma);
    const double threshold = epsilon_threshold(nu, lambda, gamma);
    if (!(eps < threshold)) {
        std::ostringstream os;
        os.precision(10);
        os << "lemma2_bound: eps = " << eps << " is not below the threshold eps_{lambda,gamma} = "
           << threshold << " (lambda = " << lambda << ", gamma = " << gamma << ", N = " << n << ")";
        throw validity_error(os.str(), threshold);
    }
    const double c0 = theta_constant();
    const double exponent =
        4.0 * std::numbers::ln2 * c0 * n * n * t * lambda * lambda / (eps * eps);

    BoundCertificate cert;
    cert.log_bound = std::numbers::ln2 + exponent;
    cert.lambda = lambda;
    cert.gamma = gamma;
    cert.epsilon = eps;
    cert.epsilon_max = threshold;
    cert.t = t;
    cert.vacuous = nu.is_zero();
    cert.provenance = {"lemma2",
                       {{"N", n},
                        {"c0", c0},
                        {"lambda", lambda},
                        {"gamma", gamma},
                        {"t", t},
                        {"epsilon", eps},
                        {"epsilon_threshold", threshold},
                        {"exponent", exponent}},
                       {}};
    return cert;
}

/// (1 + t/s) log 2 with s the Khas'minskii horizon of mu at eps.
[[nodiscard]] inline BoundCertificate khasminskii_bound(const WeightedMeasure& mu, double eps,
                                                        double t) {
    if (!(t > 0.0)) throw argument_error("khasminskii_bound: t must be > 0");
    if (!(eps > 0.0)) throw argument_error("khasminskii_bound: eps must be > 0");
    BoundCertificate cert;
    cert.epsilon = eps;
    cert.t = t;
    const double s = khasminskii_horizon(mu, eps);
    if (std::isinf(s)) {
        cert.log_bound = 0.0;
        cert.vacuous = true;
        cert.provenance = {"khasminskii", {{"t", t}, {"epsilon", eps}, {"horizon", s}}, {}};
        return cert;
    }
    cert.log_bound = (1.0 + t / s) * std::numbers::ln2;
    cert.provenance = {"khasminskii",
                       {{"t", t},
                        {"epsilon", eps},
                        {"horizon", s},
                        {"sup_characteristic", sup_characteristic(mu, eps, s)}},
                       {}};
    return cert;
}

/// A/p + B/q with 1/p + 1/q = 1: bound on log E e^{L^{nu+kappa}} from bounds
/// A on log E e^{p L^nu} and B on log E e^{q L^kappa}.
[[nodiscard]] inline double holder_combine(double a, double b, double p) {
    if (!(p > 1.0)) throw argument_error("holder_combine: p must be > 1");
    const double q = p / (p - 1.0);
    return a / p + b / q;
}

/// (t/2) * (max atom)^2.
[[nodiscard]] inline double theorem_limit(const WeightedMeasure& mu, double t) {
    if (!(t > 0.0)) throw argument_error("theorem_limit: t must be > 0");
    const double delta = max_atom(mu);
    return 0.5 * t * delta * delta;
}

/// Hoelder composition: atoms bounded by khasminskii_bound(p * atoms), the
/// density by lemma2_bound(density, lambda = q, gamma) where gamma comes from
/// splitting at concentration level chi / q.
[[nodiscard]] inline BoundCertificate composite_upper_bound(const WeightedMeasure& mu, double t,
                                                            double eps, double p = 2.0,
                                                            double chi = 0.1) {
    if (!(p > 1.0)) throw argument_error("composite_upper_bound: p must be > 1");
    if (!(chi > 0.0)) throw argument_error("composite_upper_bound: chi must be > 0");
    if (!(t > 0.0)) throw argument_error("composite_upper_bound: t must be > 0");
    if (!(eps > 0.0)) throw argument_error("composite_upper_bound: eps must be > 0");
    const double q = p / (p - 1.0);
    const AtomicDiffuseSplit split = split_atoms_vs_diffuse(mu, chi / q);

    BoundCertificate cert;
    cert.gamma = split.gamma;
    cert.epsilon = eps;
    cert.t = t;
    cert.vacuous = mu.is_zero();
    cert.provenance.source = "holder";

    double atomic_bound = 0.0;
    if (split.atomic.has_atoms()) {
        BoundCertificate a = khasminskii_bound(split.atomic.scaled(p), eps, t);
        atomic_bound = a.log_bound;
        a.provenance.source = "khasminskii(p*atoms)";
        cert.provenance.parts.push_back(std::move(a.provenance));
    }
    double diffuse_bound = 0.0;
    if (!split.diffuse.is_zero()) {
        try {
            BoundCertificate d = lemma2_bound(split.diffuse, q, split.gamma, t, eps);
            diffuse_bound = d.log_bound;
            cert.epsilon_max = d.epsilon_max;
            d.provenance.source = "lemma2(density, lambda=q)";
            cert.provenance.parts.push_back(std::move(d.provenance));
        } catch (const validity_error& e) {
            throw validity_error(std::string("composite_upper_bound: diffuse factor invalid: ") +
                                     e.what(),
                                 e.threshold());
        }
    }
    cert.log_bound = holder_combine(atomic_bound, diffuse_bound, p);
    cert.provenance.values = {{"p", p},
                              {"q", q},
                              {"chi", chi},
                              {"split_level", chi / q},
                              {"gamma", split.gamma},
                              {"atomic_log_bound", atomic_bound},
                              {"diffuse_log_bound", diffuse_bound},
                              {"t", t},
                              {"epsilon", eps}};
    return cert;
}

}  // namespace wlt
