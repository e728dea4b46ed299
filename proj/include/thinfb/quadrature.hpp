#pragma once

#include <functional>
#include <vector>

#include "thinfb/geometry.hpp"
#include "thinfb/weight.hpp"

namespace thinfb {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Golub-Welsch rules.
GaussRule gauss_legendre(int count);               // weight 1 on [-1, 1]
GaussRule gauss_hermite(int count);                // weight exp(-x^2) on R
GaussRule gauss_laguerre(int count, double alpha); // weight u^alpha exp(-u) on (0, inf)

// Rule for the weight v^a exp(-v^2) on (0, inf), obtained from the generalized
// Laguerre rule in u = v^2. Weights are not normalized.
GaussRule half_line_rule(int count, double a);

struct QuadratureOrders {
    int hermite = 24;      // per thin coordinate
    int laguerre = 24;     // normal coordinate
    int time_panels = 4;
    int time_nodes = 8;    // Gauss-Legendre nodes per panel in s = sqrt(|t| / r^2)
    double c_trunc = 8.6;  // refuse zero-extended fields whose extent is below c_trunc * r
};

// Tensor rule for integrals against the backward kernel times y^a over a
// strip. With X = 2 sqrt|t| (xi, v) the spatial measure becomes a normalized
// product Gaussian, so spatial weights sum to one, and so do time weights in
// tau = |t| / r^2.
struct StripRule {
    int n = 1;
    double a = 0.0;
    QuadratureOrders orders{};
    std::vector<SpacePoint> xi;       // reference spatial nodes (xi, v)
    std::vector<double> space_weight; // normalized
    std::vector<double> tau;          // in (0, 1)
    std::vector<double> time_weight;  // normalized

    std::size_t space_size() const { return xi.size(); }
};

StripRule make_strip_rule(const WeightParam& w, int n, const QuadratureOrders& orders = {});

// Pairwise sum, deterministic for a fixed input order.
double pairwise_sum(const double* v, std::size_t count);

}  // namespace thinfb
