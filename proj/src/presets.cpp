#include "thinfb/presets.hpp"

#include <cmath>
#include <memory>

#include "thinfb/special_kernels.hpp"

namespace thinfb {

double regular_profile(const SpacePoint& X) {
    const double rho = std::hypot(X.x[0], X.y);
    const double th = std::atan2(X.y, X.x[0]);
    return std::pow(rho, 1.5) * std::cos(1.5 * th);
}

SpaceVector regular_profile_gradient(const SpacePoint& X) {
    // d/dz z^{3/2} = 1.5 z^{1/2}; U_x = Re, U_y = -Im
    const double rho = std::hypot(X.x[0], X.y);
    const double th = std::atan2(X.y, X.x[0]);
    const double s = 1.5 * std::sqrt(rho);
    SpaceVector g;
    g.x[0] = s * std::cos(0.5 * th);
    g.y = -s * std::sin(0.5 * th);
    return g;
}

double even_bessel_profile(const WeightParam& w, double y) {
    const double nu = 0.5 * (w.a() - 1.0);
    if (y == 0.0) return 1.0;
    return std::tgamma(nu + 1.0) * std::exp(log_bessel_i(nu, y) - nu * std::log(0.5 * y));
}

namespace {

Exponents monomial_x1(int k) {
    Exponents e;
    e.x[0] = k;
    return e;
}

FloatPolynomial extension_of(const ExactPolynomial& q, const WeightParam& w) {
    return caloric_extension(q, w).to_float();
}

ThinFunction zero_obstacle() {
    return [](const std::array<double, kMaxThinDim>&, double) { return 0.0; };
}

ObstacleDerivative zero_obstacle_derivative() {
    return [](std::array<int, kMaxThinDim>, int, const std::array<double, kMaxThinDim>&, double) {
        return std::optional<double>(0.0);
    };
}

SpaceTimeFunction from_field(const Field& f) {
    auto s = f.sample;
    return [s](const SpacePoint& X, double t) { return s(X, t).u; };
}

}  // namespace

FloatPolynomial p2_polynomial(int n, const WeightParam& w) {
    return extension_of(ExactPolynomial::monomial(n, monomial_x1(2)), w);
}

FloatPolynomial p4_polynomial(int n, const WeightParam& w) {
    return extension_of(ExactPolynomial::monomial(n, monomial_x1(4)), w);
}

FloatPolynomial timelike_polynomial(int n, const WeightParam& w) {
    Exponents e;
    e.t = 1;
    return extension_of(ExactPolynomial::monomial(n, e, Rational(-1)), w);
}

std::vector<std::string> preset_names() {
    return {"zero", "p2-singular", "time-like", "regular-a0", "manufactured", "sine-obstacle"};
}

Preset make_preset(const std::string& name, int n, const WeightParam& w) {
    if (n < 1 || n > kMaxThinDim) throw DomainError("preset: n must be 1 or 2");
    Preset p;
    p.name = name;
    p.n = n;
    p.w = w;
    p.obstacle = zero_obstacle();
    p.obstacle_derivative = zero_obstacle_derivative();
    p.analytic_trace = true;

    auto set_polynomial = [&](const FloatPolynomial& u, const FloatPolynomial* f) {
        p.polynomial = u;
        p.analytic = polynomial_field(u, f);
        p.analytic.label = name;
        p.exact = from_field(p.analytic);
        if (f) {
            auto fp = std::make_shared<FloatPolynomial>(*f);
            p.source = [fp](const SpacePoint& X, double t) { return fp->evaluate(X, t); };
        }
    };

    if (name == "zero") {
        set_polynomial(FloatPolynomial(n), nullptr);
        p.analytic_trace = false;
    } else if (name == "p2-singular") {
        set_polynomial(p2_polynomial(n, w), nullptr);
    } else if (name == "time-like") {
        set_polynomial(timelike_polynomial(n, w), nullptr);
    } else if (name == "manufactured") {
        // (1 + t) p2 with F = p2
        const FloatPolynomial q = p2_polynomial(n, w);
        Exponents et;
        et.t = 1;
        const FloatPolynomial u = q + q * FloatPolynomial::monomial(n, et);
        set_polynomial(u, &q);
    } else if (name == "regular-a0" || name == "sine-obstacle") {
        if (w.a() != 0.0) throw DomainError("preset " + name + " is defined for a = 0 only");
        const bool sine = name == "sine-obstacle";
        Field f;
        f.n = n;
        f.label = name;
        f.sample = [sine](const SpacePoint& X, double) {
            FieldSample s;
            s.u = regular_profile(X);
            s.grad = regular_profile_gradient(X);
            if (sine) {
                // sin(x1) cosh(y) is harmonic and even in y
                s.u += std::sin(X.x[0]) * std::cosh(X.y);
                s.grad.x[0] += std::cos(X.x[0]) * std::cosh(X.y);
                s.grad.y += std::sin(X.x[0]) * std::sinh(X.y);
            }
            return s;
        };
        p.analytic = f;
        p.exact = from_field(f);
        if (sine) {
            p.obstacle = [](const std::array<double, kMaxThinDim>& x, double) { return std::sin(x[0]); };
            p.obstacle_derivative = [](std::array<int, kMaxThinDim> a, int j, const std::array<double, kMaxThinDim>& x,
                                       double) -> std::optional<double> {
                if (j > 0 || a[1] > 0) return 0.0;
                switch (a[0] % 4) {
                    case 0: return std::sin(x[0]);
                    case 1: return std::cos(x[0]);
                    case 2: return -std::sin(x[0]);
                    default: return -std::cos(x[0]);
                }
            };
        }
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    p.initial = p.exact;
    if (p.analytic_trace) p.boundary = p.exact;
    return p;
}

Problem make_problem(const Preset& p, const HalfGrid& g) {
    if (g.n != p.n) throw DomainError("make_problem: grid and preset dimensions differ");
    Problem P;
    P.grid = g;
    P.w = p.w;
    P.initial = p.initial;
    P.boundary = p.boundary;
    P.source = p.source;
    P.obstacle = p.obstacle;
    if (p.analytic_trace) P.exterior = p.exact;
    P.label = p.name;
    return P;
}

}  // namespace thinfb
