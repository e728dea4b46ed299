#pragma once

#include <memory>
#include <string>
#include <vector>

#include "thinfb/config.hpp"
#include "thinfb/freeboundary.hpp"
#include "thinfb/obstacle.hpp"
#include "thinfb/polynomial.hpp"
#include "thinfb/presets.hpp"
#include "thinfb/solver.hpp"

namespace thinfb {

struct CheckLine {
    std::string name;
    double defect = 0.0;
    double tol = 0.0;
    bool passed = false;
    std::string detail;
};

struct SelftestReport {
    std::vector<CheckLine> checks;
    bool passed() const;
    std::string text() const;
};

// 20 thin monomials x1^i x2^j t^k of parabolic degree <= 6 (n = 2).
std::vector<ExactPolynomial> caloric_battery();

// Kernel identities at the configured a, then the exact caloric battery at
// a = -1/2, 0, 1/2 (and the configured a when it is a terminating decimal).
SelftestReport run_selftest(const RunConfig& cfg);

// Preset with the configured obstacle and outer boundary applied.
struct Setup {
    Preset preset;
    ObstacleSpec obstacle;
    Problem problem;
};
Setup make_setup(const RunConfig& cfg, const HalfGrid& g);

struct SolveOutput {
    std::string snapshot_path;
    std::string meta_path;
    Solution solution;
    ResidualReport residuals;
    bool passed = false;  // residuals within 10 psor_tol (obstacle within contact_tol), relative to scale
};
// Writes <out>/solution.thinfb and <out>/solution.meta.txt.
SolveOutput run_solve(const RunConfig& cfg);

// Snapshot with the preset exterior and source reattached, per the config.
struct Loaded {
    Setup setup;
    std::shared_ptr<ScalarField> U;
    std::shared_ptr<ScalarField> F;  // nodal source, null when the preset has none
    ThinField psi;
};
Loaded load_solution(const RunConfig& cfg, const std::string& snapshot);

// U, or U - psi (psi extended constantly in y) when the obstacle is not zero.
Field frequency_field(const Loaded& L);

// Writes <out>/functionals.csv: config echo as '#' lines, then the ladder table.
std::string run_functionals(const RunConfig& cfg, const std::string& snapshot);

struct ClassifyOutput {
    std::string records_path;
    std::vector<ClassificationRecord> records;
    bool gap_ok = true;
};
// Writes <out>/records.txt, <out>/strata.txt and <out>/strata.csv.
ClassifyOutput run_classify(const RunConfig& cfg, const std::string& snapshot);

struct ReduceOutput {
    std::string report_path;
    Reduction reduction;
    GrowthConstants fine, coarse;
    double drift = 0.0;  // max relative change of M0, M1 between the two grids
    std::size_t compared = 0, mismatched = 0;
    bool passed = false;
};
// Writes <out>/reduce.txt and the nodal V_k to <out>/vk.thinfb.
ReduceOutput run_reduce(const RunConfig& cfg, const std::string& snapshot);

// <out>/solution.thinfb unless a snapshot is configured.
std::string default_snapshot(const RunConfig& cfg);

}  // namespace thinfb
