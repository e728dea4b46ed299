#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thinfb/grid.hpp"
#include "thinfb/polynomial.hpp"
#include "thinfb/quadrature.hpp"
#include "thinfb/weight.hpp"

namespace thinfb {

// Integrand built from the field sample at (X, t).
using StripIntegrand = std::function<double(const FieldSample&, const SpacePoint&, double)>;

struct StripValue {
    double value = 0.0;
    double trunc_err = 0.0;
};

// Gaussian tail mass outside the field extent at the deepest time of the
// strip. Throws DomainError when the field is zero-extended and its extent is
// below c_trunc * r, or its time span is shorter than r^2.
double truncation_bound(const Field& U, double r, const StripRule& rule);

// (1/r^2) int over (-r^2, 0) x R^{n+1}_+ of f times the backward kernel times y^a.
StripValue strip_integral(const Field& U, const StripRule& rule, double r, const StripIntegrand& f);

// Spatial integral against the backward kernel times y^a on the slice t = -r^2.
double slice_integral(const Field& U, const StripRule& rule, double r, const StripIntegrand& f);

struct FunctionalValues {
    double r = 0.0;
    double H = 0.0;
    double D = 0.0;
    double I = 0.0;               // D - (1/r^2) int |t| U F
    double I_z = 0.0;             // (1/2r^2) int U ZU, the defining form
    std::optional<double> N;      // 2 I / H
    std::optional<double> Ntilde; // 2 D / H
    double trunc_err = 0.0;
};

FunctionalValues functional_suite(const Field& U, const StripRule& rule, double r);

// Geometric ladder r_max * ratio^{-k}, k = 0..count-1 (decreasing).
std::vector<double> radius_ladder(double r_max, int count, double ratio = 1.189207115002721);

struct PhiResult {
    std::vector<double> phi;   // per radius, same order as the input
    std::vector<bool> in_E;    // H > r^{2l - 2 + 2 sigma}
};

// Phi_{l,sigma} on a ladder from H values (radii in any monotone order).
PhiResult almgren_phi(const std::vector<double>& radii, const std::vector<double>& H, double ell, double sigma,
                      double C);

struct PhiFit {
    std::optional<double> C;  // smallest candidate making Phi nondecreasing
    PhiResult at_C;           // evaluated at the fitted C (or the last candidate if none fits)
    double min_increment = 0.0;
};

// Candidates C = 0, 0.1, ..., 10.
PhiFit fit_phi_constant(const std::vector<double>& radii, const std::vector<double>& H, double ell, double sigma,
                        double slack = 1e-3);

// Smallest C on the same grid making g(r) + C r^{1 - sigma} nondecreasing in r.
std::optional<double> fit_monotone_correction(const std::vector<double>& radii, const std::vector<double>& g,
                                              double sigma, double slack = 1e-3);

// r^{-2 kappa} (D - kappa H / 2)
double weiss(const FunctionalValues& v, double kappa);
// (H / 2 r^{2 kappa}) (Ntilde - kappa), the second evaluation path
std::optional<double> weiss_from_frequency(const FunctionalValues& v, double kappa);

// r^{-(2 kappa + 2)} int (U - p)^2; p is validated for membership first.
double monneau(const Field& U, const ExactPolynomial& p_kappa, const WeightParam& w, int kappa, double r,
               const StripRule& rule);
double monneau(const Field& U, const FloatPolynomial& p_kappa, const WeightParam& w, int kappa, double r,
               const StripRule& rule);

struct ProfileSpec {
    std::vector<double> radii;  // decreasing
    double ell = 4.0;
    double sigma = 0.5;
    double slack = 1e-3;
    std::optional<int> kappa;                // enables W
    std::optional<FloatPolynomial> p_kappa;  // enables M (with kappa)
};

struct RadiusRecord {
    double r = 0.0;
    double H = 0.0, D = 0.0, I = 0.0;
    std::optional<double> N, Ntilde, Phi, W, M;
    double trunc_err = 0.0;
    bool in_E = false;
};

struct FrequencyProfile {
    std::vector<RadiusRecord> rows;  // decreasing radii
    double ell = 0.0;
    double sigma = 0.0;
    std::optional<double> C;
    bool phi_monotone = false;
    std::optional<double> monneau_C;  // correction making M + C r^{1-sigma} nondecreasing
};

FrequencyProfile frequency_profile(const Field& U, const WeightParam& w, const ProfileSpec& spec,
                                   const StripRule& rule);

// "r,H,D,I,N,Ntilde,Phi,W,M,trunc_err" with empty cells for missing values.
std::string profile_csv(const FrequencyProfile& p);

enum class RescaleMode { almgren, homogeneous };

// U(r X, r^2 t) / H(U, r)^{1/2} or / r^kappa. Without a target grid the result
// lives on the source grid dilated by 1/r, so no resampling is needed; with a
// target grid values are resampled by multilinear interpolation.
ScalarField rescale(const ScalarField& U, double r, RescaleMode mode, const StripRule& rule, double kappa = 0.0,
                    const HalfGrid* target = nullptr);

struct VariationReport {
    double r = 0.0;
    double H_prime_fd = 0.0, H_prime_formula = 0.0, H_defect = 0.0;
    double slice = 0.0, slice_formula = 0.0, slice_defect = 0.0;
    double D_prime_fd = 0.0, D_prime_formula = 0.0, D_defect = 0.0;
    double I_prime_fd = 0.0, I_prime_formula = 0.0, I_defect = 0.0;
    double one_plus_N = 0.0;
};

// First-variation identities at radius r; r-derivatives by 4-point centered
// differences with step rel_step * r. Defects are relative to the larger side
// (and 0 when both sides vanish).
VariationReport variation_checks(const Field& U, const StripRule& rule, double r, double rel_step = 1e-2);

}  // namespace thinfb
