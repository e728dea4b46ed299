#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thinfb/functionals.hpp"
#include "thinfb/grid.hpp"
#include "thinfb/polynomial.hpp"
#include "thinfb/solver.hpp"

namespace thinfb {

// Boolean data on the thin space-time nodes of a grid.
struct ThinMask {
    HalfGrid grid;
    std::vector<std::uint8_t> values;  // (time, x1, x2)

    std::uint8_t at(int m, int i1, int i2) const {
        return values[(static_cast<std::size_t>(m) * grid.nx + i1) * grid.nx2() + i2];
    }
    std::uint8_t& at(int m, int i1, int i2) {
        return values[(static_cast<std::size_t>(m) * grid.nx + i1) * grid.nx2() + i2];
    }
    std::size_t count() const;
};

// Node in the mask iff U(x, 0, t) - psi(x, t) <= contact_tol * max(1, |U|_inf).
ThinMask coincidence_mask(const ScalarField& U, const ThinField& psi, double contact_tol);

struct FreeBoundaryConfig {
    double contact_tol = 1e-8;
    double flux_tol = 1e-6;  // relative to max(1, |U|_inf)
    FluxScheme scheme = FluxScheme::finite_volume;
    // Also report the edge of the contact set, where the flux need not vanish
    // on the grid (the half-space contact of the regular profile).
    bool include_contact_edge = true;
};

// Nodes of S = {gap <= tol, lambda <= tol} with a grid-graph neighbour outside S
// (neighbours along x_i and t), together with the same boundary of the
// contact set when include_contact_edge is set. lambda = -d_y^a U.
ThinMask extended_free_boundary(const ScalarField& U, const ScalarField* F, const ThinField& psi,
                                const FreeBoundaryConfig& cfg = {});

using ThinPoint = std::array<double, kMaxThinDim>;

struct DensityRow {
    double r = 0.0;
    double density = 0.0;
    std::size_t nodes = 0;
    bool reliable = false;
};

// Fraction of thin nodes of {|x - x0| < r, t0 - r^2 < t <= t0} lying in the mask.
// Radii under 3 cells, or whose cylinder leaves the grid, are flagged unreliable.
std::vector<DensityRow> density_profile(const ThinMask& mask, const ThinPoint& x0, double t0,
                                        const std::vector<double>& radii);

// Least-squares slope of log density against log r over reliable rows; -inf if
// a reliable density vanishes; nothing with fewer than 2 reliable rows.
std::optional<double> density_slope(const std::vector<DensityRow>& rows);

struct KappaConfig {
    int min_radii = 5;
    double trunc_rel_max = 1e-6;  // trunc_err / H above this makes a radius unreliable
    double min_radius = 0.0;      // radii below this are unreliable (resolution)
    double class_tol = 0.1;
};

struct KappaEstimate {
    double kappa = 0.0;
    double uncertainty = 0.0;
    double slope = 0.0;  // coefficient of r^{1 - sigma}
    int radii_used = 0;
    double smallest_radius = 0.0;
    bool at_ceiling = false;  // kappa >= ell - 1 + sigma - class_tol
};

// Linear fit of N against r^{1 - sigma} over reliable radii; the intercept is kappa.
// Throws DomainError when fewer than min_radii reliable radii have a defined N.
KappaEstimate estimate_kappa(const FrequencyProfile& profile, const KappaConfig& cfg = {});

struct BlowupFit {
    FloatPolynomial p;
    double residual = 0.0;   // relative L2 residual in the Gaussian strip norm
    double condition = 0.0;  // of the weighted basis matrix
};

// Fit of U(r X, r^2 t) / r^kappa onto the caloric extensions of x^alpha t^j,
// |alpha| + 2j = kappa, weighted by the strip measure at r = 1. The field is
// taken in coordinates centred at the point. Coefficients below
// chop * max |coefficient| are dropped. Throws IllConditionedError above
// condition 1e12.
BlowupFit extract_blowup(const Field& U, int kappa, const WeightParam& w, double r_fit, const StripRule& rule,
                         double chop = 1e-9);

enum class PointClass { regular, singular, degenerate_family, top_truncation, undetermined };
std::string to_string(PointClass c);

struct ClassifyConfig {
    double class_tol = 0.1;
    double density_slope_max = -0.5;  // density -> 0 when the log-log slope is at most this
    double blowup_residual_max = 1e-2;
    double rank_tol = 1e-3;
    double chop = 1e-6;
    double ell = 4.0;
    double sigma = 0.5;
    double r_max = 0.4;
    int ladder = 9;
    std::optional<double> r_fit;  // default: 2x the smallest reliable radius
    KappaConfig kappa;
    FreeBoundaryConfig fb;
    QuadratureOrders orders;
};

struct ClassifyInput {
    std::shared_ptr<const ScalarField> U;  // grid solution, for masks and densities
    std::shared_ptr<const ScalarField> F;  // may be null
    ThinField psi;
    Field field;  // function whose frequency is measured (U, or U minus the obstacle extension)
};

struct ClassificationRecord {
    ThinPoint point{};
    double t = 0.0;
    int n = 1;
    double s = 0.5;
    PointClass cls = PointClass::undetermined;
    std::optional<double> kappa;
    double kappa_err = 0.0;
    std::optional<double> phi_C;
    std::vector<DensityRow> density;
    std::optional<double> density_slope;
    std::optional<FloatPolynomial> blowup;
    double blowup_residual = 0.0;
    std::optional<int> d_kappa;
    bool gap_ok = true;
    // sup |U - psi| / r^{1+s} over the ball, the backward cylinder and the space-time ball, at the smallest radius
    double L_ell = 0.0, L_par = 0.0, L_hyp = 0.0;
    std::vector<std::string> notes;
};

// Requires the point to lie on the extended free boundary (nearest node); throws DomainError otherwise.
ClassificationRecord classify_point(const ClassifyInput& in, const WeightParam& w, const ThinPoint& x0, double t0,
                                    const ClassifyConfig& cfg = {});

// key=value lines, the blowup last; records end with a blank line.
std::string serialize(const ClassificationRecord& r);

struct StratumKey {
    int kappa = 0;
    int d = 0;
    bool operator<(const StratumKey& o) const { return std::pair(kappa, d) < std::pair(o.kappa, o.d); }
};

struct Stratum {
    std::string label;  // "time-like" when d = n, else "space-like"
    std::vector<std::pair<ThinPoint, double>> points;
};

std::map<StratumKey, Stratum> stratify(const std::vector<ClassificationRecord>& records);
std::string strata_summary(const std::map<StratumKey, Stratum>& strata);
std::string strata_csv(const std::map<StratumKey, Stratum>& strata);

}  // namespace thinfb
