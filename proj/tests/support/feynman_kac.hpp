#pragma once

// Finite-difference solution of u_t = u_xx / 2 + sum_j m_j delta_{z_j} u,
// u(0, .) = 1, which gives u(t, x) = E_x exp(L_t^mu(W)) for atomic mu.
// Crank-Nicolson with two implicit-Euler start-up steps; atoms must sit on
// grid nodes. Used as an independent check of Monte Carlo estimates.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

struct FkGrid {
    double half_width = 8.0;
    double dx = 1.0 / 1024;
    double dt = 1.0 / 8192;
};

inline double feynman_kac_moment(const std::vector<std::pair<double, double>>& atoms, double t,
                                 double x0, const FkGrid& g = {}) {
    const auto n = static_cast<std::size_t>(std::llround(2.0 * g.half_width / g.dx)) + 1;
    auto node = [&](double x) {
        const double pos = (x + g.half_width) / g.dx;
        const auto i = static_cast<std::size_t>(std::llround(pos));
        if (std::abs(pos - static_cast<double>(i)) > 1e-9 || i >= n) {
            throw std::invalid_argument("feynman_kac_moment: point not on grid");
        }
        return i;
    };
    std::vector<double> potential(n, 0.0);
    for (const auto& [z, m] : atoms) potential[node(z)] += m / g.dx;

    const double r = 0.5 / (g.dx * g.dx);
    std::vector<double> u(n, 1.0);
    std::vector<double> rhs(n);
    std::vector<double> c_prime(n);
    std::vector<double> d_prime(n);

    // Solves (I - theta dt A) u_new = rhs with Dirichlet u = 1 at both ends.
    auto solve = [&](double theta, double step) {
        const double off = -theta * step * r;
        for (std::size_t i = 0; i < n; ++i) {
            double diag = 1.0 - theta * step * (-2.0 * r + potential[i]);
            double lower = off;
            double upper = off;
            double b = rhs[i];
            if (i == 0 || i + 1 == n) {
                diag = 1.0;
                lower = upper = 0.0;
                b = 1.0;
            }
            const double denom = i == 0 ? diag : diag - lower * c_prime[i - 1];
            c_prime[i] = upper / denom;
            d_prime[i] = (i == 0 ? b : b - lower * d_prime[i - 1]) / denom;
        }
        u[n - 1] = d_prime[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) u[i] = d_prime[i] - c_prime[i] * u[i + 1];
    };

    const auto steps = static_cast<long>(std::llround(t / g.dt));
    if (steps < 2) throw std::invalid_argument("feynman_kac_moment: need at least two steps");
    for (int k = 0; k < 4; ++k) {
        rhs = u;
        solve(1.0, g.dt / 2.0);
    }
    for (long k = 2; k < steps; ++k) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            rhs[i] = u[i] + 0.5 * g.dt *
                                (r * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + potential[i] * u[i]);
        }
        solve(0.5, g.dt);
    }
    return u[node(x0)];
}

}  // namespace oracle
