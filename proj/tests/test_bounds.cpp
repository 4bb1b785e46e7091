#include <catch2/catch_amalgamated.hpp>

#include "wlt/bounds.hpp"

#include <cmath>
#include <numbers>

using Catch::Approx;
using namespace wlt;

namespace {

constexpr double c0_reference = 3.18087510160950;
constexpr double ln2 = std::numbers::ln2;
constexpr double pi = std::numbers::pi;

}  // namespace

TEST_CASE("theta constant", "[bounds]") {
    CHECK(theta_constant() == Approx(c0_reference).epsilon(1e-14));
}

TEST_CASE("epsilon threshold", "[bounds]") {
    const WeightedMeasure d0 = WeightedMeasure::dirac(0.0);
    CHECK(epsilon_threshold(d0, 1.0, 1.0) == Approx(2.334544747).epsilon(1e-9));
    CHECK(epsilon_threshold(d0, 1.0, 1.0) == Approx(std::cbrt(4.0 * c0_reference)).epsilon(1e-13));
    CHECK(epsilon_threshold(WeightedMeasure::dirac(0.0, 2.0), 1.0, 1.0) ==
          Approx(3.705858788).epsilon(1e-9));
    CHECK(std::isinf(epsilon_threshold(WeightedMeasure{}, 1.0, 1.0)));
    CHECK_THROWS_AS(epsilon_threshold(d0, 0.5, 1.0), argument_error);
    CHECK_THROWS_AS(epsilon_threshold(d0, 1.0, 0.0), argument_error);
}

TEST_CASE("lemma2 bound", "[bounds]") {
    const WeightedMeasure d0 = WeightedMeasure::dirac(0.0);
    const BoundCertificate c = lemma2_bound(d0, 1.0, 1.0, 1.0, 1.0);
    CHECK(c.log_bound == Approx(9.51240561413576).epsilon(1e-13));
    CHECK(c.log_bound == Approx(ln2 + 4 * ln2 * c0_reference).epsilon(1e-13));
    CHECK(c.epsilon_max == Approx(2.334544747).epsilon(1e-9));
    REQUIRE(c.gamma.has_value());
    CHECK(*c.gamma == 1.0);
    CHECK(c.provenance.source == "lemma2");
    CHECK(c.provenance.get("N") == 1.0);
    CHECK_FALSE(c.vacuous);

    try {
        (void)lemma2_bound(d0, 1.0, 1.0, 1.0, 3.0);
        FAIL("expected a validity error");
    } catch (const validity_error& e) {
        CHECK(e.threshold() == Approx(2.334544747).epsilon(1e-9));
    }
    CHECK_THROWS_AS(lemma2_bound(d0, 0.5, 1.0, 1.0, 1.0), argument_error);
    CHECK_THROWS_AS(lemma2_bound(d0, 1.0, 1.0, 0.0, 1.0), argument_error);

    const BoundCertificate zero = lemma2_bound(WeightedMeasure{}, 1.0, 1.0, 1.0, 1.0);
    CHECK(zero.vacuous);
    CHECK(zero.log_bound == Approx(ln2));
}

TEST_CASE("lemma2 bound is monotone in its parameters", "[bounds]") {
    const WeightedMeasure nu = WeightedMeasure::uniform(0.0, 1.0, 0.5);
    const double gamma = 0.05;
    double prev = 0.0;
    for (double eps : {0.1, 0.05, 0.02, 0.01}) {
        const double b = lemma2_bound(nu, 1.0, gamma, 1.0, eps).log_bound;
        CHECK(b > prev);
        prev = b;
    }
    prev = 0.0;
    for (double t : {0.1, 1.0, 10.0}) {
        const double b = lemma2_bound(nu, 1.0, gamma, t, 0.01).log_bound;
        CHECK(b > prev);
        prev = b;
    }
    prev = 0.0;
    for (double lambda : {1.0, 2.0, 4.0}) {
        const double b = lemma2_bound(nu, lambda, gamma, 1.0, 0.01).log_bound;
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("Khas'minskii bound", "[bounds]") {
    const WeightedMeasure d0 = WeightedMeasure::dirac(0.0);
    const BoundCertificate c = khasminskii_bound(d0, 1.0, 1.0);
    CHECK(c.log_bound == Approx(2.45823198178116).epsilon(1e-9));
    CHECK(c.log_bound == Approx((1.0 + 8.0 / pi) * ln2).epsilon(1e-9));
    CHECK(c.provenance.get("horizon").value() == Approx(pi / 8).epsilon(1e-9));
    CHECK(*c.provenance.get("sup_characteristic") <= 0.5);

    const BoundCertificate zero = khasminskii_bound(WeightedMeasure{}, 1.0, 1.0);
    CHECK(zero.vacuous);
    CHECK(zero.log_bound == 0.0);

    double prev = 0.0;
    for (double t : {0.1, 1.0, 5.0}) {
        const double b = khasminskii_bound(d0, 0.5, t).log_bound;
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("crude rate of the Khas'minskii bound", "[bounds]") {
    const WeightedMeasure d0 = WeightedMeasure::dirac(0.0);
    const double target = 8.0 * ln2 / pi;
    CHECK(target == Approx(1.76508480122121).epsilon(1e-14));
    double prev_gap = infinity;
    for (double eps : {0.1, 0.01, 1e-3, 1e-4}) {
        const double ratio = eps * eps * khasminskii_bound(d0, eps, 1.0).log_bound / 1.0;
        const double gap = std::abs(ratio - target);
        CHECK(gap <= prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-6);
    // The crude rate sits above the sharp one, (1/2) * 1^2.
    CHECK(target > theorem_limit(d0, 1.0));
}

TEST_CASE("Hoelder combination and the limit", "[bounds]") {
    CHECK(holder_combine(2.0, 4.0, 2.0) == Approx(3.0));
    CHECK(holder_combine(3.0, 1.0, 3.0) == Approx(1.0 + 2.0 / 3.0));
    CHECK_THROWS_AS(holder_combine(1.0, 1.0, 1.0), argument_error);

    CHECK(theorem_limit(WeightedMeasure({{0.0, 1.0}, {5.0, 3.0}}, {}), 2.0) == Approx(9.0));
    CHECK(theorem_limit(WeightedMeasure::uniform(0.0, 1.0), 1.0) == 0.0);
    CHECK(theorem_limit(counterexample_measure(6), 1.0) == 0.5);
    CHECK_THROWS_AS(theorem_limit(WeightedMeasure{}, 0.0), argument_error);
}

TEST_CASE("composite bound on purely atomic and purely diffuse measures", "[bounds]") {
    const WeightedMeasure atoms({{0.0, 1.0}, {3.0, 0.5}}, {});
    const BoundCertificate a = composite_upper_bound(atoms, 1.0, 0.3, 2.0);
    CHECK(a.log_bound ==
          Approx(khasminskii_bound(atoms.scaled(2.0), 0.3, 1.0).log_bound / 2.0).epsilon(1e-13));
    CHECK(std::isinf(a.epsilon_max));

    const WeightedMeasure box = WeightedMeasure::uniform(0.0, 1.0, 0.5);
    const BoundCertificate d = composite_upper_bound(box, 1.0, 0.01, 2.0, 0.1);
    REQUIRE(d.gamma.has_value());
    CHECK(d.log_bound == Approx(lemma2_bound(box, 2.0, *d.gamma, 1.0, 0.01).log_bound / 2.0));
    CHECK(d.epsilon_max < infinity);

    CHECK(composite_upper_bound(WeightedMeasure{}, 1.0, 0.5).vacuous);
    CHECK_THROWS_AS(composite_upper_bound(atoms, 1.0, 0.3, 1.0), argument_error);
}

TEST_CASE("composite bound on an atom plus a density", "[bounds]") {
    const WeightedMeasure mu({{0.0, 1.0}}, {{0.0, 1.0, 1.0}});
    const double eps = 0.05;
    const BoundCertificate c = composite_upper_bound(mu, 1.0, eps, 2.0, 0.1);

    // Split at 0.1 / q = 0.05: N(uniform, 2^-j) = 2^{1-j}, so gamma = 2^-6.
    const double gamma = 1.0 / 64.0;
    const double n = 2.0 * gamma;
    REQUIRE(c.gamma.has_value());
    CHECK(*c.gamma == gamma);

    // Atomic factor: 2*delta_0 has horizon pi eps^2 / 32.
    const double atomic = (1.0 + 1.0 / (pi * eps * eps / 32.0)) * ln2;
    const double diffuse = ln2 + 4.0 * ln2 * c0_reference * n * n * 1.0 * 4.0 / (eps * eps);
    CHECK(c.provenance.get("atomic_log_bound").value() == Approx(atomic).epsilon(1e-9));
    CHECK(c.provenance.get("diffuse_log_bound").value() == Approx(diffuse).epsilon(1e-12));
    CHECK(c.log_bound == Approx(0.5 * (atomic + diffuse)).epsilon(1e-9));
    CHECK(c.log_bound == Approx(1419.65103380876).epsilon(1e-9));
    CHECK(c.epsilon_max == Approx(std::cbrt(gamma * 4 * n * n * c0_reference * 4)).epsilon(1e-12));
    CHECK(c.provenance.parts.size() == 2);

    // eps = 0.5 is beyond the diffuse factor's threshold (about 0.092).
    try {
        (void)composite_upper_bound(mu, 1.0, 0.5, 2.0, 0.1);
        FAIL("expected a validity error");
    } catch (const validity_error& e) {
        CHECK(e.threshold() == Approx(0.0919).margin(1e-3));
        CHECK(std::string(e.what()).find("diffuse factor invalid") != std::string::npos);
    }
}
