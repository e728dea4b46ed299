#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "thinfb/solver.hpp"

using namespace thinfb;

namespace {

HalfGrid small_grid(int n = 1) {
    HalfGrid g;
    g.n = n;
    g.nx = n == 1 ? 33 : 17;
    g.ny = n == 1 ? 33 : 17;
    g.nt = 17;
    g.Rx = 1.0;
    g.Ry = 1.0;
    g.T = 0.25;
    return g;
}

double p2(const SpacePoint& X, double a) { return X.x[0] * X.x[0] - X.y * X.y / (1 + a); }

}  // namespace

TEST_CASE("operator annihilates constants and the caloric quadratic") {
    for (double a : {-0.5, 0.0, 0.6}) {
        const HalfGrid g = small_grid();
        const WeightParam w(a);
        StencilOperator op(g, w);
        ScalarField U(g, w);
        U.fill([](const SpacePoint&, double) { return 1.0; });
        auto r = op.apply(U.values().data());
        for (double v : r) CHECK(std::abs(v) < 1e-9);
        U.fill([a](const SpacePoint& X, double) { return p2(X, a); });
        r = op.apply(U.values().data());
        for (double v : r) CHECK(std::abs(v) < 1e-9);
    }
}

TEST_CASE("operator is symmetric in the weighted inner product") {
    const HalfGrid g = small_grid(2);
    const WeightParam w(-0.3);
    StencilOperator op(g, w);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<double> u(g.slice_size(), 0.0), v(g.slice_size(), 0.0);
    // supported away from the Dirichlet boundary
    for (int i1 = 2; i1 < g.nx - 2; ++i1)
        for (int i2 = 2; i2 < g.nx - 2; ++i2)
            for (int j = 0; j < g.ny - 2; ++j) {
                u[g.line_offset(i1, i2) + j] = d(rng);
                v[g.line_offset(i1, i2) + j] = d(rng);
            }
    const auto Lu = op.apply(u.data());
    const auto Lv = op.apply(v.data());
    const double a = op.inner(Lu.data(), v.data());
    const double b = op.inner(u.data(), Lv.data());
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("cell masses integrate y^a exactly") {
    const HalfGrid g = small_grid();
    const double a = 0.35;
    StencilOperator op(g, WeightParam(a));
    double s = 0;
    for (int j = 0; j < g.ny - 1; ++j) s += op.mass()[j];
    const double top = (g.ny - 1.5) * g.hy();
    CHECK(s == doctest::Approx(std::pow(top, 1 + a) / (1 + a)).epsilon(1e-13));
}

TEST_CASE("quadratic caloric profiles are reproduced by the scheme") {
    for (double a : {-0.5, 0.0, 0.5}) {
        for (int n : {1, 2}) {
            Problem P;
            P.grid = small_grid(n);
            P.w = WeightParam(a);
            auto exact = [a](const SpacePoint& X, double t) { return -t - X.y * X.y / (2 * (1 + a)) + 0.5 * p2(X, a); };
            P.initial = exact;
            P.boundary = exact;
            P.obstacle = [](const std::array<double, 2>&, double) { return -10.0; };
            const auto sol = solve(P);
            double err = 0;
            for (int m = 0; m < P.grid.nt; ++m)
                for (int i1 = 0; i1 < P.grid.nx; ++i1)
                    for (int i2 = 0; i2 < P.grid.nx2(); ++i2)
                        for (int j = 0; j < P.grid.ny; ++j) {
                            SpacePoint X;
                            X.x = {P.grid.x(i1), n == 2 ? P.grid.x(i2) : 0.0};
                            X.y = P.grid.y(j);
                            err = std::max(err, std::abs(sol.U->at(m, i1, i2, j) - exact(X, P.grid.t(m))));
                        }
            CHECK(err < 1e-8);
            const auto res = residual_check(*sol.U, sol.F.get(), sol.psi);
            CHECK(res.pde < 1e-9);
            CHECK(res.obstacle == 0.0);
        }
    }
}

TEST_CASE("Signorini solution respects the obstacle and complementarity") {
    Problem P;
    P.grid = small_grid();
    P.w = WeightParam(0.0);
    // data pushing the thin trace below psi = 0 near x < 0
    auto data = [](const SpacePoint& X, double) { return X.x[0] + 0.3 * X.y; };
    P.initial = [](const SpacePoint& X, double) { return std::max(X.x[0], 0.0) + 0.3 * X.y; };
    P.boundary = data;
    P.obstacle = [](const std::array<double, 2>&, double) { return 0.0; };
    SolverConfig cfg;
    const auto sol = solve(P, cfg);
    const auto res = residual_check(*sol.U, sol.F.get(), sol.psi, cfg);
    CHECK(res.obstacle <= 1e-14);
    CHECK(res.complementarity <= 10 * cfg.psor_tol * res.scale);
    CHECK(res.flux_sign <= 10 * cfg.psor_tol * res.scale);
    CHECK(res.pde <= 10 * cfg.psor_tol * res.scale);
    CHECK(sol.steps.back().contact_nodes > 0);
}

TEST_CASE("residual check reports an obstacle gap") {
    const HalfGrid g = small_grid();
    const WeightParam w(0.0);
    ScalarField U(g, w);
    U.fill([](const SpacePoint&, double) { return 1.0; });
    auto psi = make_thin_field(g, [](const std::array<double, 2>&, double) { return 0.0; });
    U.at(5, 10, 0, 0) = -0.25;
    const auto r = residual_check(U, nullptr, psi);
    CHECK(r.obstacle == doctest::Approx(0.25));
    CHECK(r.complementarity >= 0.25);
}

TEST_CASE("normal derivative estimates") {
    const HalfGrid g = small_grid();
    const WeightParam w(0.0);
    ScalarField U(g, w);
    U.fill([](const SpacePoint& X, double) { return X.x[0] * X.x[0] - X.y * X.y; });
    for (auto s : {FluxScheme::one_sided, FluxScheme::extrapolated, FluxScheme::finite_volume}) {
        const auto d = weighted_normal_derivative(U, s);
        for (int m = 1; m < g.nt; ++m)
            for (int i = 1; i < g.nx - 1; ++i) CHECK(std::abs(d.at(m, i, 0)) < 0.05);
    }
    // Re (x + i y)^{3/2}: flux -1.5 |x|^{1/2} for x < 0
    U.fill([](const SpacePoint& X, double) {
        const double r = std::hypot(X.x[0], X.y), th = std::atan2(X.y, X.x[0]);
        return std::pow(r, 1.5) * std::cos(1.5 * th);
    });
    const auto d = weighted_normal_derivative(U, FluxScheme::extrapolated);
    for (int i = 1; i < g.nx / 2; ++i) CHECK(d.at(3, i, 0) < 0.0);
    const int i = 8;  // x = -0.5
    CHECK(d.at(3, i, 0) == doctest::Approx(-1.5 * std::sqrt(0.5)).epsilon(0.02));
}

TEST_CASE("solver rejects bad configuration") {
    SolverConfig c;
    c.omega = 2.5;
    CHECK_THROWS_AS(ImplicitStepper(small_grid(), WeightParam(0.0), c), DomainError);
    HalfGrid g = small_grid();
    g.nx = 2;
    CHECK_THROWS_AS(g.validate(), DomainError);
    Problem P;
    P.grid = small_grid();
    P.initial = [](const SpacePoint&, double) { return 0.0; };
    SolverConfig tight;
    tight.max_iters = 1;
    P.source = [](const SpacePoint&, double) { return 1.0; };
    CHECK_THROWS_AS(solve(P, tight), NonconvergenceError);
}
