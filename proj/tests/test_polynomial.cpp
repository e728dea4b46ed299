#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "thinfb/polynomial.hpp"

using namespace thinfb;

namespace {

Exponents ex(int x1, int x2, int y, int t) {
    Exponents e;
    e.x = {x1, x2};
    e.y = y;
    e.t = t;
    return e;
}

// L_a by central differences, independent of the symbolic code.
double fd_La(const FloatPolynomial& p, double a, SpacePoint X, double t) {
    const double h = 1e-3;
    auto f = [&](double dx1, double dx2, double dy, double dt) {
        SpacePoint Y = X;
        Y.x[0] += dx1;
        Y.x[1] += dx2;
        Y.y += dy;
        return p.evaluate(Y, t + dt);
    };
    const double u = f(0, 0, 0, 0);
    const double ut = (f(0, 0, 0, h) - f(0, 0, 0, -h)) / (2 * h);
    double lap = (f(h, 0, 0, 0) - 2 * u + f(-h, 0, 0, 0)) / (h * h);
    if (p.n() == 2) lap += (f(0, h, 0, 0) - 2 * u + f(0, -h, 0, 0)) / (h * h);
    const double uyy = (f(0, 0, h, 0) - 2 * u + f(0, 0, -h, 0)) / (h * h);
    const double uy = (f(0, 0, h, 0) - f(0, 0, -h, 0)) / (2 * h);
    return ut - lap - uyy - a / X.y * uy;
}

}  // namespace

TEST_CASE("caloric extension of x^2 and t") {
    const WeightParam w(1, 2);
    const auto p2 = caloric_extension(ExactPolynomial::monomial(1, ex(2, 0, 0, 0)), w);
    CHECK(p2.coefficient(ex(2, 0, 0, 0)) == Rational(1));
    CHECK(p2.coefficient(ex(0, 0, 2, 0)) == Rational(-2, 3));  // -1/(1+a)
    CHECK(p2.terms().size() == 2);

    const auto pt = caloric_extension(ExactPolynomial::monomial(1, ex(0, 0, 0, 1), Rational(-1)), w);
    CHECK(pt.coefficient(ex(0, 0, 0, 1)) == Rational(-1));
    CHECK(pt.coefficient(ex(0, 0, 2, 0)) == Rational(-1, 3));  // -1/(2(1+a))
}

TEST_CASE("caloric extension of x^4 at a = 0") {
    const auto p4 = caloric_extension(ExactPolynomial::monomial(1, ex(4, 0, 0, 0)), WeightParam(0, 1));
    CHECK(p4.coefficient(ex(4, 0, 0, 0)) == Rational(1));
    CHECK(p4.coefficient(ex(2, 0, 2, 0)) == Rational(-6));
    CHECK(p4.coefficient(ex(0, 0, 4, 0)) == Rational(1));
    CHECK(p4.terms().size() == 3);
}

TEST_CASE("extension is exactly caloric and matches a finite-difference check") {
    for (auto [num, den] : {std::pair{-1, 2}, std::pair{0, 1}, std::pair{1, 2}, std::pair{3, 10}}) {
        const WeightParam w(num, den);
        for (int n : {1, 2})
            for (int x1 = 0; x1 <= 4; ++x1)
                for (int x2 = 0; x2 <= (n == 2 ? 2 : 0); ++x2)
                    for (int j = 0; j <= 2; ++j) {
                        const auto q = ExactPolynomial::monomial(n, ex(x1, x2, 0, j));
                        const auto p = caloric_extension(q, w);
                        CHECK(apply_La(p, w).is_zero());
                        CHECK(p.is_even_in_y());
                        SpacePoint X;
                        X.x = {0.3, -0.7};
                        X.y = 0.45;
                        const double r = fd_La(p.to_float(), w.a(), X, -0.2);
                        CHECK(std::abs(r) < 1e-4);
                        // trace at y = 0
                        X.y = 0.0;
                        CHECK(p.to_float().evaluate(X, -0.2) == doctest::Approx(q.to_float().evaluate(X, -0.2)));
                    }
    }
}

TEST_CASE("apply_La and Z") {
    const WeightParam w(1, 2);
    const auto y2 = ExactPolynomial::monomial(1, ex(0, 0, 2, 0));
    const auto r = apply_La(y2, w);
    CHECK(r.coefficient(Exponents{}) == Rational(-3));  // -(2 + 2a)
    CHECK(r.terms().size() == 1);
    CHECK_THROWS_AS(apply_La(ExactPolynomial::monomial(1, ex(0, 0, 1, 0)), w), DomainError);

    auto p = ExactPolynomial::monomial(1, ex(2, 0, 0, 0)) + ExactPolynomial::monomial(1, ex(0, 0, 0, 1));
    const auto z = z_apply(p);
    CHECK(z.coefficient(ex(2, 0, 0, 0)) == Rational(2));
    CHECK(z.coefficient(ex(0, 0, 0, 1)) == Rational(2));
}

TEST_CASE("membership in the nonnegative homogeneous class") {
    const WeightParam w(0, 1);
    const auto p2 = caloric_extension(ExactPolynomial::monomial(1, ex(2, 0, 0, 0)), w);
    auto rep = validate_P_kappa_plus(p2, w, 2);
    CHECK(rep.in_P);
    CHECK(rep.kappa_est == 2);

    auto neg = p2 * Rational(-1);
    rep = validate_P_kappa_plus(neg, w, 2);
    CHECK_FALSE(rep.in_P);
    CHECK_FALSE(rep.nonneg_thin);

    // x^2 - t is caloric (trace), nonnegative for t <= 0
    const auto q = caloric_extension(ExactPolynomial::monomial(1, ex(2, 0, 0, 0)) +
                                         ExactPolynomial::monomial(1, ex(0, 0, 0, 1), Rational(-1)),
                                     w);
    CHECK(validate_P_kappa_plus(q, w, 2).in_P);

    // not homogeneous
    auto mixed = p2 + ExactPolynomial::monomial(1, Exponents{});
    CHECK_FALSE(validate_P_kappa_plus(mixed, w, 2).in_P);
    // odd kappa
    CHECK_FALSE(validate_P_kappa_plus(ExactPolynomial::monomial(1, ex(1, 0, 0, 0)), w, 1).in_P);
}

TEST_CASE("spatial dimension") {
    const WeightParam w(0, 1);
    const auto p2 = caloric_extension(ExactPolynomial::monomial(1, ex(2, 0, 0, 0)), w);
    CHECK(spatial_dimension(p2, 2) == 0);
    const auto pt = caloric_extension(ExactPolynomial::monomial(1, ex(0, 0, 0, 1), Rational(-1)), w);
    CHECK(spatial_dimension(pt, 2) == 1);
    const auto q2 = caloric_extension(ExactPolynomial::monomial(2, ex(2, 0, 0, 0)), w);
    CHECK(spatial_dimension(q2, 2) == 1);
    const auto q2b = caloric_extension(ExactPolynomial::monomial(2, ex(2, 0, 0, 0)) +
                                           ExactPolynomial::monomial(2, ex(0, 2, 0, 0)),
                                       w);
    CHECK(spatial_dimension(q2b, 2) == 0);
    CHECK_THROWS_AS(spatial_dimension(p2 + ExactPolynomial::monomial(1, Exponents{}), 2), DomainError);
}

TEST_CASE("Taylor polynomial of sin x") {
    ObstacleDerivative psi = [](std::array<int, kMaxThinDim> a, int j, const std::array<double, kMaxThinDim>& x,
                                double) -> std::optional<double> {
        if (j > 0 || a[1] > 0) return 0.0;
        const int k = a[0] % 4;
        const double v[] = {std::sin(x[0]), std::cos(x[0]), -std::sin(x[0]), -std::cos(x[0])};
        return v[k];
    };
    const auto q = taylor_polynomial(psi, 1, {0.0, 0.0}, 0.0, 3);
    CHECK(q.coefficient(ex(1, 0, 0, 0)) == doctest::Approx(1.0));
    CHECK(q.coefficient(ex(3, 0, 0, 0)) == doctest::Approx(-1.0 / 6.0));
    CHECK(q.terms().size() == 2);

    ObstacleDerivative limited = [](std::array<int, kMaxThinDim> a, int j, const std::array<double, kMaxThinDim>&,
                                    double) -> std::optional<double> {
        if (a[0] + 2 * j > 2) return std::nullopt;
        return 1.0;
    };
    CHECK_THROWS_AS(taylor_polynomial(limited, 1, {0.0, 0.0}, 0.0, 3), DomainError);
}

TEST_CASE("text round trip") {
    const WeightParam w(1, 3);
    const auto p = caloric_extension(ExactPolynomial::monomial(2, ex(2, 2, 0, 1), Rational(5, 7)), w);
    const std::string s = to_text(p);
    CHECK(parse_polynomial<Rational>(s, 2).terms() == p.terms());
    const auto f = p.to_float();
    CHECK(parse_polynomial<double>(to_text(f), 2).terms() == f.terms());
    CHECK_THROWS_AS(parse_polynomial<double>("1 * z^2", 1), ConfigError);
    CHECK_THROWS_AS(parse_polynomial<double>("abc * x1^2", 1), ConfigError);
}
