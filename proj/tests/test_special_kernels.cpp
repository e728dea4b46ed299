#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "thinfb/quadrature.hpp"
#include "thinfb/special_kernels.hpp"

using namespace thinfb;

TEST_CASE("bessel_i closed forms for half-integer order") {
    // I_{1/2}(z) = sqrt(2 / (pi z)) sinh z, I_{-1/2}(z) = sqrt(2 / (pi z)) cosh z
    for (double z : {0.01, 0.5, 2.0, 10.0, 29.0, 31.0, 60.0, 200.0}) {
        const double c = std::sqrt(2.0 / (std::numbers::pi * z));
        CHECK(bessel_i(0.5, z) == doctest::Approx(c * std::sinh(z)).epsilon(1e-13));
        CHECK(bessel_i(-0.5, z) == doctest::Approx(c * std::cosh(z)).epsilon(1e-13));
    }
    CHECK(bessel_i(0.5, 2.0) == doctest::Approx(2.0462).epsilon(1e-4));
}

TEST_CASE("bessel_i matches the standard library where available") {
    for (double nu : {0.0, 0.25, 0.7})
        for (double z : {0.1, 1.0, 5.0, 25.0, 35.0, 80.0})
            CHECK(bessel_i(nu, z) == doctest::Approx(std::cyl_bessel_i(nu, z)).epsilon(1e-12));
}

TEST_CASE("bessel_i branches agree at the crossover") {
    BesselPolicy series;
    series.crossover = 1e9;
    BesselPolicy asym;
    asym.crossover = 0.0;
    for (double nu : {-0.75, -0.25, 0.3})
        CHECK(bessel_i(nu, 30.0, series) == doctest::Approx(bessel_i(nu, 30.0, asym)).epsilon(1e-13));
}

TEST_CASE("log_bessel_i does not overflow") {
    const double v = log_bessel_i(-0.3, 1e5);
    CHECK(std::isfinite(v));
    // leading terms of the large-argument expansion, mu = 4 nu^2
    const double mu = 4 * 0.09;
    CHECK(v == doctest::Approx(1e5 - 0.5 * std::log(2 * std::numbers::pi * 1e5) - (mu - 1) / 8e5).epsilon(1e-15));
}

TEST_CASE("bessel_i rejects bad input") {
    CHECK_THROWS_AS(bessel_i(0.5, -1.0), DomainError);
    CHECK_THROWS_AS(bessel_i(-1.5, 1.0), DomainError);
    CHECK_THROWS_AS(bessel_i(0.5, std::nan("")), DomainError);
}

TEST_CASE("heat kernel special values") {
    const WeightParam w0(0.0);
    // a = 0 reduces to the even reflection of the 1D Gaussian: 2 * (4 pi t)^{-1/2} ... with measure d eta
    const double y = 0.3, eta = 0.8, t = 0.4;
    const double g = std::exp(-(y - eta) * (y - eta) / (4 * t)) + std::exp(-(y + eta) * (y + eta) / (4 * t));
    CHECK(bessel_heat_kernel(w0, y, eta, t) == doctest::Approx(g / std::sqrt(4 * std::numbers::pi * t)).epsilon(1e-13));
    CHECK(bessel_heat_kernel(w0, y, eta, 0.0) == 0.0);
    CHECK(bessel_heat_kernel(w0, y, eta, -1.0) == 0.0);
    // eta = 0 branch agrees with the general branch in the limit
    const WeightParam w(0.4);
    CHECK(bessel_heat_kernel(w, 0.7, 0.0, 0.5) == doctest::Approx(bessel_heat_kernel(w, 0.7, 1e-9, 0.5)).epsilon(1e-8));
    // symmetry in (y, eta)
    CHECK(bessel_heat_kernel(w, 0.2, 1.1, 0.3) == doctest::Approx(bessel_heat_kernel(w, 1.1, 0.2, 0.3)).epsilon(1e-14));
    CHECK_THROWS_AS(bessel_heat_kernel(w, -0.1, 1.0, 1.0), DomainError);
}

TEST_CASE("fundamental solution value and product structure") {
    const WeightParam w0(0.0);
    SpacePoint O;
    // (4 pi)^{-1/2} / Gamma(1/2) * 1 = 1 / (2 pi)
    CHECK(neumann_fundamental(w0, 1, O, 1.0) == doctest::Approx(1.0 / (2 * std::numbers::pi)).epsilon(1e-14));
    CHECK(neumann_fundamental(w0, 1, O, -1.0, true) == doctest::Approx(1.0 / (2 * std::numbers::pi)).epsilon(1e-14));
    CHECK_THROWS_AS(neumann_fundamental(w0, 1, O, 1.0, true), DomainError);
    CHECK_THROWS_AS(neumann_fundamental(w0, 1, O, -1.0, false), DomainError);
    const WeightParam w(-0.3);
    SpacePoint X;
    X.x = {0.4, -0.2};
    X.y = 0.6;
    for (int n : {1, 2})
        CHECK(neumann_fundamental(w, n, X, 0.7) == doctest::Approx(neumann_kernel(w, n, X, O, 0.7)).epsilon(1e-13));
}

TEST_CASE("kernel self test passes for several weights") {
    for (double a : {-0.5, 0.0, 0.5}) {
        const auto rep = kernel_selftest(WeightParam(a), 1, 1e-6);
        for (const auto& c : rep.checks) {
            INFO(c.name << " a=" << a << " " << c.detail << " defect=" << c.defect);
            CHECK(c.passed);
        }
    }
}

TEST_CASE("kernel self test fails with two nodes") {
    KernelSelftestOptions opt;
    opt.max_nodes = 2;
    opt.start_nodes = 2;
    const auto rep = kernel_selftest(WeightParam(0.5), 1, 1e-6, opt);
    CHECK_FALSE(rep.all_passed());
}
