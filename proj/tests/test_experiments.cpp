#include <catch2/catch_amalgamated.hpp>

#include "wlt/experiments.hpp"

#include <cmath>
#include <numbers>

using Catch::Approx;
using namespace wlt;

namespace {

SimulationParams small_run(std::uint64_t seed = 42) {
    SimulationParams sim;
    sim.n_paths = 4000;
    sim.n_steps = 400;
    sim.seed = seed;
    return sim;
}

}  // namespace

TEST_CASE("single atom closed form", "[experiments]") {
    CHECK(single_atom_lambda(1.0, 1.0, 1.0) == Approx(1.02039340153650).epsilon(1e-13));
    CHECK(single_atom_lambda(1.0, 1.0, 0.7) == Approx(0.800611910302156).epsilon(1e-13));
    CHECK(single_atom_lambda(1.0, 1.0, 0.5) == Approx(0.667533567807745).epsilon(1e-13));
    CHECK(single_atom_lambda(2.0, 1.0, 1.0) == Approx(2.67013427123098).epsilon(1e-13));
    CHECK(single_atom_lambda(1.0, 1.0, 1e-3) == Approx(0.5).epsilon(1e-5));
    double prev = infinity;
    for (double eps : {1.0, 0.5, 0.25, 0.1, 0.01}) {
        const double v = single_atom_lambda(1.0, 1.0, eps);
        CHECK(v < prev);
        CHECK(v > 0.5);
        prev = v;
    }
    // At the Khas'minskii horizon of a*delta, lambda^2 s = pi/8 for every eps.
    for (double eps : {1.0, 0.3, 0.05}) {
        const double s = std::numbers::pi * eps * eps / 8.0;
        CHECK(levy_moment(1.0 / eps, s) == Approx(1.78784389419689).epsilon(1e-12));
    }
}

TEST_CASE("pair regimes", "[experiments]") {
    CHECK(pair_regime(1.0 / 64, 0.5, 1.0) == PairRegime::merged);
    CHECK(pair_regime(0.5, 0.05, 1.0) == PairRegime::separated);
    CHECK(pair_regime(0.1, 0.1, 1.0) == PairRegime::intermediate);
    CHECK(std::string(to_string(PairRegime::merged)) == "merged");
}

TEST_CASE("sweep of a single atom", "[experiments]") {
    const WeightedMeasure d0 = WeightedMeasure::dirac(0.0);
    const AsymptoticsReport r = asymptotic_sweep(d0, 1.0, {}, {1.0, 0.7, 0.5}, small_run());
    REQUIRE(r.cells.size() == 3);
    REQUIRE(r.summary.size() == 3);
    CHECK(r.single_atom);
    CHECK(r.target == 0.5);
    CHECK(r.starts == std::vector<double>{0.0});
    for (const SweepCell& c : r.cells) {
        REQUIRE(c.oracle.has_value());
        CHECK(c.lambda_hat == Approx(c.epsilon * c.epsilon * c.log_moment));
        CHECK(c.lambda_std_error > 0.0);
        CHECK(c.n_paths == 4000);
    }
    CHECK(r.oracle_ok());
    CHECK(r.trend_ok());
    CHECK(r.passed());

    // A cell regenerated on its own reproduces the sweep bit for bit.
    const AsymptoticsReport one = asymptotic_sweep(d0, 1.0, {0.0}, {0.7}, small_run());
    CHECK(one.cells[0].lambda_hat == r.cells[1].lambda_hat);
    CHECK(one.cells[0].lambda_std_error == r.cells[1].lambda_std_error);

    SimulationParams two_workers = small_run();
    two_workers.workers = 2;
    const AsymptoticsReport par = asymptotic_sweep(d0, 1.0, {}, {1.0, 0.7, 0.5}, two_workers);
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
        CHECK(par.cells[i].lambda_hat == r.cells[i].lambda_hat);
    }
}

TEST_CASE("sweep argument checks", "[experiments]") {
    const WeightedMeasure d0 = WeightedMeasure::dirac(0.0);
    CHECK_THROWS_AS(asymptotic_sweep(d0, 1.0, {}, {}, small_run()), argument_error);
    CHECK_THROWS_AS(asymptotic_sweep(d0, 1.0, {}, {0.5, 0.7}, small_run()), argument_error);
    CHECK_THROWS_AS(asymptotic_sweep(d0, 1.0, {}, {0.5, 0.5}, small_run()), argument_error);
    CHECK_THROWS_AS(asymptotic_sweep(d0, 1.0, {}, {0.5, -0.1}, small_run()), argument_error);
    CHECK_THROWS_AS(asymptotic_sweep(d0, 0.0, {}, {0.5}, small_run()), argument_error);
}

TEST_CASE("sweep of a density and of the zero measure", "[experiments]") {
    const WeightedMeasure box = WeightedMeasure::uniform(0.0, 1.0, 2.0);
    const AsymptoticsReport r = asymptotic_sweep(box, 1.0, {}, {0.5, 0.2, 0.1}, small_run(8));
    CHECK(r.starts == std::vector<double>{0.5});
    CHECK(r.target == 0.0);
    CHECK_FALSE(r.single_atom);
    REQUIRE(r.pathwise_cap_per_eps2.has_value());
    CHECK(*r.pathwise_cap_per_eps2 == 2.0);
    CHECK(r.pathwise_cap_ok());
    CHECK(r.passed());
    // Lambda_hat shrinks like eps^2.
    CHECK(r.summary.back().lambda_hat < r.summary.front().lambda_hat);

    const AsymptoticsReport zero = asymptotic_sweep(WeightedMeasure{}, 1.0, {}, {1.0}, small_run());
    REQUIRE(zero.cells.size() == 1);
    CHECK(zero.cells[0].lambda_hat == 0.0);
    CHECK(zero.cells[0].oracle == 0.0);
    CHECK(zero.passed());
}

TEST_CASE("Khas'minskii check", "[experiments]") {
    const KhasminskiiReport r = khasminskii_check(WeightedMeasure::dirac(0.0), 1.0, small_run(3));
    CHECK(r.horizon == Approx(std::numbers::pi / 8).epsilon(1e-9));
    CHECK(r.sup_characteristic <= 0.5);
    REQUIRE(r.rows.size() == 1);
    REQUIRE(r.rows[0].oracle.has_value());
    CHECK(*r.rows[0].oracle == Approx(1.78784389419689).epsilon(1e-9));
    CHECK(std::abs(r.rows[0].moment - *r.rows[0].oracle) < 4.0 * r.rows[0].moment_std_error);
    CHECK(r.passed());

    const KhasminskiiReport pair =
        khasminskii_check(WeightedMeasure({{0.0, 1.0}, {0.3, 0.5}}, {}), 0.5, small_run(4));
    CHECK(pair.rows.size() == 2);
    CHECK(pair.passed());

    const KhasminskiiReport zero = khasminskii_check(WeightedMeasure{}, 1.0, small_run());
    CHECK(std::isinf(zero.horizon));
    CHECK(zero.rows.empty());
    CHECK_FALSE(zero.note.empty());
}

TEST_CASE("counterexample in the separated regime", "[experiments]") {
    SimulationParams sim = small_run(17);
    sim.n_paths = 20000;
    sim.n_steps = 1000;
    const CounterexampleReport r = counterexample_run(1, 0.01, {0.05}, sim);
    REQUIRE(r.cells.size() == 1);
    const CounterexampleCell& c = r.cells[0];
    CHECK(c.k == 1);
    CHECK(c.gap == 0.5);
    CHECK(c.regime == PairRegime::separated);
    CHECK(c.single_oracle == Approx(single_atom_lambda(1.0, 0.01, 0.05)));
    CHECK(c.merged_oracle == Approx(single_atom_lambda(2.0, 0.01, 0.05)));
    CHECK(c.within(c.single_oracle));
    CHECK(r.theorem_limit == Approx(0.005));
    CHECK(r.merged_limit == Approx(0.02));
    CHECK(r.passed());
}

TEST_CASE("counterexample layout", "[experiments]") {
    const CounterexampleReport r = counterexample_run(6, 1.0, {0.5, 0.1}, small_run(), {1, 6});
    REQUIRE(r.cells.size() == 4);
    CHECK(r.cells[0].cell.start == 1.0);
    CHECK(r.cells[1].cell.start == 36.0);
    CHECK(r.cells[1].gap == 1.0 / 64);
    CHECK(r.cells[1].regime == PairRegime::merged);
    CHECK(r.cells[2].cell.epsilon == 0.1);
    CHECK(r.cells[0].regime == PairRegime::intermediate);
    CHECK(r.cells[1].excess(1.0) == Approx(r.cells[1].cell.lambda_hat - 0.5));
    CHECK_THROWS_AS(counterexample_run(6, 1.0, {0.5}, small_run(), {7}), argument_error);
}
