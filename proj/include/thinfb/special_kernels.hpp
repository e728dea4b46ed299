#pragma once

#include <string>
#include <vector>

#include "thinfb/geometry.hpp"
#include "thinfb/weight.hpp"

namespace thinfb {

struct BesselPolicy {
    int series_terms_max = 500;
    double crossover = 30.0;  // power series below, large-argument expansion above
    double abs_tol = 1e-16;   // relative truncation threshold for series terms
};

// Modified Bessel function of the first kind I_nu(z), nu > -1, z >= 0.
double bessel_i(double nu, double z, const BesselPolicy& policy = {});

// log I_nu(z) for z > 0; does not overflow for large z.
double log_bessel_i(double nu, double z, const BesselPolicy& policy = {});

// Transition density of the Bessel process with Neumann condition at y = 0,
// with respect to the measure eta^a d eta. Zero for t <= 0.
double bessel_heat_kernel(const WeightParam& w, double y, double eta, double t,
                          const BesselPolicy& policy = {});

// Euclidean heat kernel on R^n.
double euclidean_heat_kernel(int n, const double* x, const double* xi, double t);

// Full Neumann kernel in the half-space, product of the two factors above.
double neumann_kernel(const WeightParam& w, int n, const SpacePoint& X, const SpacePoint& Y, double t,
                      const BesselPolicy& policy = {});

// Fundamental solution with pole at the origin. With backward = true this is
// the backward kernel, defined for t < 0 by the forward kernel at |t|.
double neumann_fundamental(const WeightParam& w, int n, const SpacePoint& X, double t, bool backward = false);

// Normalization constant 1 / (2^a Gamma((a+1)/2)).
double bessel_normalization(const WeightParam& w);

struct KernelCheck {
    std::string name;
    double defect = 0.0;
    double tol = 0.0;
    int nodes_used = 0;
    bool converged = false;
    bool passed = false;
    std::string detail;
};

struct KernelSelftestReport {
    std::vector<KernelCheck> checks;
    bool all_passed() const;
};

struct KernelSelftestOptions {
    int max_nodes = 256;     // node count is doubled from start_nodes up to this value
    int start_nodes = 8;
    double mass_y = 1.0, mass_t = 1.0;
    double ck_y = 0.5, ck_eta = 1.5, ck_s = 0.3, ck_t = 0.7;
    double strip_r = 0.5;
    BesselPolicy bessel{};
};

// Mass conservation, backward strip mass and the semigroup property.
KernelSelftestReport kernel_selftest(const WeightParam& w, int n, double tol,
                                     const KernelSelftestOptions& opt = {});

}  // namespace thinfb
