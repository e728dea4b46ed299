#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thinfb/grid.hpp"
#include "thinfb/polynomial.hpp"
#include "thinfb/solver.hpp"

namespace thinfb {

// Re (x1 + i y)^{3/2} for y >= 0, with gradient; stationary and caloric for a = 0.
double regular_profile(const SpacePoint& X);
SpaceVector regular_profile_gradient(const SpacePoint& X);

// Even solution of g'' + (a/y) g' = g with g(0) = 1, i.e. Gamma(nu+1) (y/2)^{-nu} I_nu(y), nu = (a-1)/2.
double even_bessel_profile(const WeightParam& w, double y);

// x1^2 - y^2 / (1 + a)
FloatPolynomial p2_polynomial(int n, const WeightParam& w);
// caloric extension of x1^4
FloatPolynomial p4_polynomial(int n, const WeightParam& w);
// -t - y^2 / (2 (1 + a))
FloatPolynomial timelike_polynomial(int n, const WeightParam& w);

struct Preset {
    std::string name;
    int n = 1;
    WeightParam w{0.0};
    SpaceTimeFunction exact;      // closed-form solution, if known
    SpaceTimeFunction initial;    // initial data at t = -T
    SpaceTimeFunction boundary;   // Dirichlet data; empty means zero
    SpaceTimeFunction source;     // empty means zero
    ThinFunction obstacle;
    ObstacleDerivative obstacle_derivative;
    bool analytic_trace = false;  // boundary and exterior from the closed form
    Field analytic;               // closed-form field (value, gradient, time derivative, source)
    std::optional<FloatPolynomial> polynomial;
};

// Names: zero, p2-singular, time-like, regular-a0, manufactured, sine-obstacle.
Preset make_preset(const std::string& name, int n, const WeightParam& w);
std::vector<std::string> preset_names();

Problem make_problem(const Preset& p, const HalfGrid& g);

}  // namespace thinfb
