#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "thinfb/errors.hpp"
#include "thinfb/freeboundary.hpp"
#include "thinfb/obstacle.hpp"
#include "thinfb/presets.hpp"

using namespace thinfb;

namespace {

HalfGrid grid(int nx, int nt) {
    HalfGrid g;
    g.nx = nx;
    g.ny = nx;
    g.nt = nt;
    return g;
}

// y^{-a} div(y^a grad f) - f_t by central differences
double heat_residual(const std::function<double(const SpacePoint&, double)>& f, const SpacePoint& X, double t, int n,
                     double a, double h) {
    const double f0 = f(X, t);
    double lap = 0.0;
    for (int i = 0; i < n; ++i) {
        SpacePoint P = X, M = X;
        P.x[i] += h;
        M.x[i] -= h;
        lap += (f(P, t) - 2.0 * f0 + f(M, t)) / (h * h);
    }
    SpacePoint P = X, M = X;
    P.y += h;
    M.y -= h;
    lap += (f(P, t) - 2.0 * f0 + f(M, t)) / (h * h) + a / X.y * (f(P, t) - f(M, t)) / (2.0 * h);
    const double ft = (f(X, t + h) - f(X, t - h)) / (2.0 * h);
    return ft - lap;
}

}  // namespace

TEST_CASE("taylor degree rule") {
    CHECK(taylor_degree(4.0) == 3);
    CHECK(taylor_degree(3.5) == 3);
    CHECK(taylor_degree(3.0) == 2);
    CHECK_THROWS_AS(taylor_degree(1.5), DomainError);
    // ell = 2 would need k = 1
    CHECK_THROWS_AS(make_obstacle("sine", 1, 2.0), DomainError);
    CHECK_THROWS_AS(make_obstacle("bogus", 1), ConfigError);
    CHECK_THROWS_AS(make_obstacle("custom", 1), ConfigError);
    const ObstacleSpec c = make_obstacle("custom", 1, 4.0, "1 * x1^2;-0.5 * t^1");
    CHECK(c.psi({2.0, 0.0}, -2.0) == doctest::Approx(5.0));
}

TEST_CASE("subtract obstacle") {
    const WeightParam w(0.0);
    ScalarField U(grid(9, 5), w);
    U.fill([](const SpacePoint& X, double t) { return X.x[0] * X.x[0] + 3.0 * t + X.y; });

    const Subtracted z = subtract_obstacle(U, make_obstacle("zero", 1));
    CHECK(z.W->values() == U.values());
    for (double f : z.F->values()) CHECK(f == 0.0);

    const Subtracted q = subtract_obstacle(U, make_obstacle("quadratic", 1));
    // -(d_t - Delta) (x^2 + t) = -(1 - 2) = 1
    for (double f : q.F->values()) CHECK(f == doctest::Approx(1.0));
    CHECK(q.W->at(2, 3, 0, 4) == doctest::Approx(3.0 * U.grid().t(2) + U.grid().y(4) - U.grid().t(2)));

    const Subtracted c = subtract_obstacle(U, make_obstacle("custom", 1, 4.0, "2.5"));
    CHECK(c.W->at(1, 1, 0, 1) == doctest::Approx(U.at(1, 1, 0, 1) - 2.5));
    for (double f : c.F->values()) CHECK(f == 0.0);
}

TEST_CASE("cutoff profile") {
    const CutoffSpec c;
    c.validate();
    for (double a : {-0.5, 0.0, 0.5}) {
        SpacePoint X;
        X.x[0] = 0.5;
        X.y = 0.3;
        CHECK(evaluate_cutoff(c, X, 1, a).zeta == 1.0);
        X.x[0] = 1.2;
        CHECK(evaluate_cutoff(c, X, 1, a).zeta == 0.0);
        // transition region: compare with difference quotients
        for (int n : {1, 2}) {
            X.x[0] = 0.81;
            X.x[1] = n == 2 ? 0.2 : 0.0;
            X.y = 0.86;
            const double h = 1e-4;
            auto z = [&](const SpacePoint& P) { return evaluate_cutoff(c, P, n, a).zeta; };
            const CutoffValue v = evaluate_cutoff(c, X, n, a);
            SpacePoint P = X, M = X;
            P.y += h;
            M.y -= h;
            const double zy = (z(P) - z(M)) / (2 * h);
            CHECK(v.grad.y == doctest::Approx(zy).epsilon(1e-6));
            double lap = (z(P) - 2 * z(X) + z(M)) / (h * h) + a / X.y * zy;
            for (int i = 0; i < n; ++i) {
                SpacePoint Q = X, R = X;
                Q.x[i] += h;
                R.x[i] -= h;
                lap += (z(Q) - 2 * z(X) + z(R)) / (h * h);
            }
            CHECK(v.La == doctest::Approx(lap).epsilon(1e-5));
            SpacePoint Y = X;
            Y.y = -X.y;
            CHECK(evaluate_cutoff(c, Y, n, a).zeta == v.zeta);
        }
    }
    CutoffSpec ramp;
    ramp.inner = 0.0;
    ramp.in_y_squared = false;
    ramp.order = 0;
    CHECK_THROWS_AS(ramp.validate(), DomainError);
    CutoffSpec bad;
    bad.inner = 1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("globalize") {
    SUBCASE("polynomial obstacle cancels exactly") {
        const WeightParam w(0.25);
        const ObstacleSpec psi = make_obstacle("quadratic", 1, 3.5);
        const FloatPolynomial qe = caloric_extension(
            taylor_polynomial(psi.derivative, 1, {0, 0}, 0.0, psi.k), w);
        const Reduction R = globalize(polynomial_field(qe), nullptr, psi, w);
        for (double x : {-0.6, 0.0, 0.4})
            for (double y : {0.0, 0.3, 0.7}) {
                SpacePoint X;
                X.x[0] = x;
                X.y = y;
                const FieldSample s = R.V.sample(X, -0.2);
                CHECK(std::abs(s.u) < 1e-14);
                CHECK(std::abs(s.f) < 1e-13);
            }
    }
    SUBCASE("V_k solves the equation with source F_k") {
        for (double a : {-0.4, 0.0, 0.5}) {
            const WeightParam w(a);
            for (int n : {1, 2}) {
                const ObstacleSpec psi = make_obstacle("sine", n, 4.0);
                Exponents e;
                e.x[0] = 3;
                e.t = 1;
                const Field U = polynomial_field(caloric_extension(FloatPolynomial::monomial(n, e), w));
                const Reduction R = globalize(U, nullptr, psi, w);
                auto v = [&](const SpacePoint& X, double t) { return R.V.sample(X, t).u; };
                for (double x : {0.3, 0.8, 0.9})
                    for (double y : {0.2, 0.8, 0.95}) {
                        SpacePoint X;
                        X.x[0] = x;
                        if (n == 2) X.x[1] = 0.1;
                        X.y = y;
                        const double lhs = heat_residual(v, X, -0.3, n, a, 1e-4);
                        CHECK(lhs == doctest::Approx(R.V.sample(X, -0.3).f).epsilon(1e-5).scale(1.0));
                    }
            }
        }
    }
    SUBCASE("traces match the original problem near the centre") {
        const WeightParam w(0.0);
        const Preset p = make_preset("sine-obstacle", 1, w);
        const ObstacleSpec psi = make_obstacle("sine", 1, 4.0);
        const Reduction R = globalize(p.analytic, nullptr, psi, w);
        for (double x : {-0.4, 0.1, 0.45}) {
            SpacePoint X;
            X.x[0] = x;
            CHECK(R.V.sample(X, -0.1).u == doctest::Approx(p.exact(X, -0.1) - std::sin(x)).epsilon(1e-12));
        }
        // sine has Taylor degree 3 about the origin
        CHECK(R.q.degree() == 3);
    }
}

TEST_CASE("growth bounds") {
    const double ell = 4.0;
    SUBCASE("zero source") {
        const GrowthConstants c =
            growth_bounds_check([](const SpacePoint&, double) { return 0.0; }, grid(17, 33), ell);
        CHECK(c.M0 == 0.0);
        CHECK(*c.M1 == 0.0);
        CHECK(*c.M2 == 0.0);
        CHECK(c.samples > 0);
    }
    SUBCASE("definitional source") {
        const GrowthConstants c = growth_bounds_check(
            [](const SpacePoint& X, double t) { return norm_sq(X, 1) + std::abs(t); }, grid(17, 33), ell);
        CHECK(c.M0 == doctest::Approx(1.0));
    }
    SUBCASE("sine obstacle, stable under refinement") {
        const WeightParam w(0.0);
        const Preset p = make_preset("sine-obstacle", 1, w);
        const Reduction R = globalize(p.analytic, nullptr, make_obstacle("sine", 1, ell), w);
        const GrowthConstants c1 = growth_bounds_check(R.F, grid(33, 65), ell);
        const GrowthConstants c2 = growth_bounds_check(R.F, grid(65, 257), ell);
        CHECK(std::isfinite(c1.M0));
        CHECK(c1.M0 > 0.0);
        CHECK(std::abs(c2.M0 - c1.M0) < 0.1 * c1.M0);
        CHECK(std::abs(*c2.M1 - *c1.M1) < 0.1 * *c1.M1);
        // psi_k is time independent here
        CHECK(*c1.M2 < 1e-8);
        // shrinking the region cannot increase the constants
        GrowthRegion small;
        small.radius = 0.25;
        CHECK(growth_bounds_check(R.F, grid(33, 65), ell, small).M0 <= c1.M0);
    }
}

TEST_CASE("free boundary of V_k matches that of U") {
    const WeightParam w(0.0);
    const Preset p = make_preset("sine-obstacle", 1, w);
    HalfGrid g = grid(65, 257);
    const Solution s = solve(make_problem(p, g));
    const ObstacleSpec psi = make_obstacle("sine", 1, 4.0);
    const Reduction R = globalize(grid_field(s.U, s.F), s.U, psi, w);
    const ThinField zero = make_thin_field(g, [](const std::array<double, kMaxThinDim>&, double) { return 0.0; });
    const ThinMask gu = extended_free_boundary(*s.U, s.F.get(), s.psi);
    const ThinMask gv = extended_free_boundary(*R.V_grid, R.F_grid.get(), zero);
    std::size_t compared = 0, differ = 0;
    for (int m = 1; m < g.nt; ++m) {
        if (g.t(m) <= -0.25) continue;
        for (int i = 0; i < g.nx; ++i) {
            if (std::abs(g.x(i)) >= 0.5) continue;
            ++compared;
            differ += gu.at(m, i, 0) != gv.at(m, i, 0);
        }
    }
    CHECK(compared > 0);
    CHECK(differ == 0);
    CHECK(gu.at(g.nt - 1, 32, 0) == 1);
}
