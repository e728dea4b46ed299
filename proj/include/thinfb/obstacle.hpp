#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thinfb/grid.hpp"
#include "thinfb/polynomial.hpp"
#include "thinfb/weight.hpp"

namespace thinfb {

// Taylor degree for regularity ell = k + gamma, 0 < gamma <= 1:
// ceil(ell) - 1 when ell is an integer (gamma = 1), floor(ell) otherwise.
int taylor_degree(double ell);

struct ObstacleSpec {
    std::string name;
    int n = 1;
    ThinFunction psi;
    ObstacleDerivative derivative;
    double ell = 4.0;
    int k = 3;
    std::optional<double> M;  // measured growth constant, when known

    // k >= 2 and both callbacks present.
    void validate() const;
};

// Presets: zero, quadratic (x1^2 + t), sine (sin x1), custom (a polynomial in
// x and t given as "coeff * x1^a x2^b t^j" terms separated by ';').
ObstacleSpec make_obstacle(const std::string& name, int n, double ell = 4.0, const std::string& custom = "");
ObstacleSpec polynomial_obstacle(const FloatPolynomial& q, double ell, const std::string& name = "polynomial");
std::vector<std::string> obstacle_names();

// -(d_t - Delta_x) psi at (x, t); throws DomainError when a derivative is missing.
double obstacle_source(const ObstacleSpec& psi, const std::array<double, kMaxThinDim>& x, double t);

struct Subtracted {
    std::shared_ptr<ScalarField> W;   // U - psi, psi extended constantly in y
    std::shared_ptr<ScalarField> F;   // -(d_t - Delta_x) psi on the nodes
    SpaceTimeFunction source;         // the same, pointwise
};

Subtracted subtract_obstacle(const ScalarField& U, const ObstacleSpec& psi);

// zeta(X) = zeta1(|x - x0|) zeta2(y); zeta1 = 1 - S((r - inner) / (outer - inner)),
// zeta2 = 1 - S((y^2 - inner^2) / (outer^2 - inner^2)) or the same in |y|.
// S is the quintic smoothstep (order 2, C^2) or the linear ramp (order 0).
struct CutoffSpec {
    double inner = 0.75;
    double outer = 1.0;
    bool in_y_squared = true;
    int order = 2;

    // Rejects bad radii, and profiles whose zeta_y is not O(y) at y = 0.
    void validate() const;
};

struct CutoffValue {
    double zeta = 1.0;
    SpaceVector grad{};
    double La = 0.0;  // y^{-a} div(y^a grad zeta)
};

CutoffValue evaluate_cutoff(const CutoffSpec& c, const SpacePoint& X, int n, double a,
                            const std::array<double, kMaxThinDim>& x0 = {});

struct Reduction {
    int k = 0;
    double ell = 0.0;
    std::array<double, kMaxThinDim> x0{};
    double t0 = 0.0;
    FloatPolynomial q;      // thin Taylor polynomial, local coordinates
    FloatPolynomial q_ext;  // its caloric extension
    Field V;                // V_k with gradient, time derivative, and F_k as its source
    SpaceTimeFunction F;    // F_k
    std::shared_ptr<ScalarField> V_grid;  // nodal V_k (when a grid solution is given)
    std::shared_ptr<ScalarField> F_grid;  // nodal F_k
};

// V_k = zeta (U_k - psi_k) with U_k = U - q_ext, psi_k = psi - q, and
// F_k = zeta (Delta psi_k - d_t psi_k + F_U) - W L_a zeta - 2 <grad W, grad zeta>, W = U_k - psi_k.
// U supplies value, gradient and time derivative; its source F_U is used when
// U.has_source. U_grid (optional) gives nodal values for V_grid and F_grid.
Reduction globalize(const Field& U, std::shared_ptr<const ScalarField> U_grid, const ObstacleSpec& psi,
                    const WeightParam& w, const CutoffSpec& cutoff = {},
                    const std::array<double, kMaxThinDim>& x0 = {}, double t0 = 0.0);

struct GrowthRegion {
    double radius = 0.5;       // Q_radius^+ around the centre
    double exclude_cells = 3;  // skip |(X, t)| < exclude_cells * h
};

struct GrowthConstants {
    double M0 = 0.0;                // sup |F| / |(X,t)|^{ell-2}
    std::optional<double> M1;       // sup |grad_X F| / |(X,t)|^{ell-3}, ell >= 3
    std::optional<double> M2;       // sup |d_t F| / |(X,t)|^{ell-4}, ell >= 4
    std::size_t samples = 0;
};

// Samples F on the nodes of g inside the region; derivatives are difference
// quotients with the grid steps. |(X, t)| = (|X|^2 + |t|)^{1/2}.
GrowthConstants growth_bounds_check(const SpaceTimeFunction& F, const HalfGrid& g, double ell,
                                    const GrowthRegion& region = {});

}  // namespace thinfb
