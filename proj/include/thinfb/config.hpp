#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thinfb/freeboundary.hpp"
#include "thinfb/grid.hpp"
#include "thinfb/quadrature.hpp"
#include "thinfb/solver.hpp"
#include "thinfb/weight.hpp"

namespace thinfb {

struct RunConfig {
    // [problem]
    std::string a_text = "0";
    int n = 1;
    std::string preset = "p2-singular";
    std::string obstacle = "preset";  // "preset" keeps the preset's own obstacle
    std::string obstacle_coefficients;
    // [grid]
    HalfGrid grid;
    // [solver]
    SolverConfig solver;
    std::string outer_bc = "preset";  // preset | zero
    // [functionals]
    double ell = 4.0;
    double sigma = 0.5;
    std::optional<int> kappa;
    double r_max = 0.4;
    int ladder = 9;
    double ratio = 1.189207115002721;
    QuadratureOrders orders;
    std::string exterior = "preset";  // preset | zero
    // [classify]
    ClassifyConfig classify;
    std::string points = "auto";  // auto, or "x1[,x2]@t" entries separated by ';'
    // [selftest]
    double tol_mass = 1e-4;
    double tol_ck = 1e-5;
    double tol_strip = 1e-4;
    int selftest_start_nodes = 8;
    int selftest_max_nodes = 256;
    // [output]
    std::string out_dir = "out";
    std::string snapshot;  // input snapshot for functionals / classify / reduce

    double a() const;
    // Exact rational weight when a_text is a terminating decimal.
    WeightParam weight() const;
};

// Defaults, then the INI file (if any), then "section.key=value" overrides.
// Unknown keys and malformed values raise ConfigError; so does validation.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);
void apply_override(RunConfig& cfg, const std::string& assignment);
void validate(const RunConfig& cfg);

// Every key with its resolved value, "section.key = value", in a fixed order.
std::vector<std::string> config_echo(const RunConfig& cfg);

// Parses "x1[,x2]@t;..." into points.
std::vector<std::pair<ThinPoint, double>> parse_points(const std::string& text, int n);

}  // namespace thinfb
