#pragma once

#include <memory>
#include <string>
#include <vector>

#include "thinfb/grid.hpp"
#include "thinfb/weight.hpp"

namespace thinfb {

struct SolverConfig {
    double psor_tol = 1e-11;  // stop when the max-norm update falls below psor_tol * max(1, |U|_inf)
    double omega = 0.0;       // relaxation factor in (0, 2); 0 picks it from the stencil
    int max_iters = 20000;
    double contact_tol = 1e-8;
};

// Conservative discretization of y^{-a} div(y^a grad u) on one time slice.
// Row j carries the dual cell [y_j - h/2, y_j + h/2] intersected with y >= 0;
// its mass is the exact integral of y^a over that cell, and fluxes use the
// weight at the cell faces.
class StencilOperator {
public:
    StencilOperator(const HalfGrid& g, const WeightParam& w);

    const HalfGrid& grid() const { return g_; }
    const std::vector<double>& mass() const { return mass_; }          // per y node
    const std::vector<double>& face_weight() const { return face_; }   // at y_{j+1/2}

    // Operator values at nodes with x-interior index and j <= ny - 2; the row
    // at j = 0 uses zero flux through y = 0. Other entries are zero.
    std::vector<double> apply(const double* slice) const;

    // Weighted inner product sum mass_j * hx^n * u * v over all nodes.
    double inner(const double* u, const double* v) const;

private:
    HalfGrid g_;
    std::vector<double> mass_;
    std::vector<double> face_;
};

struct StepStats {
    int iterations = 0;
    double last_update = 0.0;
    int contact_nodes = 0;
};

// Backward Euler step with the thin Signorini condition, solved by projected
// SOR in red-black order.
class ImplicitStepper {
public:
    ImplicitStepper(const HalfGrid& g, const WeightParam& w, const SolverConfig& cfg);

    // `next` holds Dirichlet values on the outer boundary; interior entries are
    // overwritten. source_next may be null (zero source); psi_next holds one
    // value per thin node of the slice.
    StepStats step(const double* prev, double* next, const double* source_next, const double* psi_next) const;

    double omega() const { return omega_; }
    // Row residual (A u - b) for slice `next` given `prev`, divided by the row diagonal.
    void scaled_residual(const double* prev, const double* next, const double* source_next, double* out) const;
    // Unscaled thin-row residual, the discrete multiplier -d_y^a U at each thin node.
    void thin_multiplier(const double* prev, const double* next, const double* source_next, double* out) const;

private:
    void build_rhs(const double* prev, const double* source_next, std::vector<double>& rhs) const;

    HalfGrid g_;
    SolverConfig cfg_;
    StencilOperator op_;
    double omega_;
    std::vector<double> cs_, cn_, cx_, inv_diag_;
};

struct Problem {
    HalfGrid grid;
    WeightParam w{0.0};
    SpaceTimeFunction initial;   // at t = -T
    SpaceTimeFunction boundary;  // Dirichlet data on |x_i| = Rx and y = Ry; empty means zero
    SpaceTimeFunction source;    // right-hand side F; empty means zero
    ThinFunction obstacle;       // empty means no constraint
    SpaceTimeFunction exterior;  // evaluation outside the grid; empty means zero
    std::string label;
};

struct Solution {
    std::shared_ptr<ScalarField> U;
    std::shared_ptr<ScalarField> F;
    ThinField psi;
    std::vector<StepStats> steps;
    std::string kernels;
    double omega = 0.0;
};

Solution solve(const Problem& prob, const SolverConfig& cfg = {});

struct ResidualReport {
    double pde = 0.0;              // max |row residual| / row diagonal at interior nodes
    double complementarity = 0.0;  // max |min(U - psi, lambda / diagonal)| at thin nodes
    double flux_sign = 0.0;        // max(0, -lambda / diagonal)
    double obstacle = 0.0;         // max(0, psi - U)
    double scale = 1.0;            // max(1, |U|_inf)
};

// Residuals of the discrete problem for slices 1..nt-1.
ResidualReport residual_check(const ScalarField& U, const ScalarField* F, const ThinField& psi,
                              const SolverConfig& cfg = {});

enum class FluxScheme { one_sided, extrapolated, finite_volume };

// Estimate of d_y^a U = lim y^a U_y at y = 0 on each thin node. The finite-volume
// variant balances the half cell at y = 0 and needs the source; it falls back to
// one_sided on the first slice.
ThinField weighted_normal_derivative(const ScalarField& U, FluxScheme scheme = FluxScheme::one_sided,
                                     const ScalarField* F = nullptr);

}  // namespace thinfb
