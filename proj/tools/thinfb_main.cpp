#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "thinfb/config.hpp"
#include "thinfb/errors.hpp"
#include "thinfb/pipeline.hpp"

using namespace thinfb;

namespace {

// exit codes
constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kNonconvergence = 3;

struct Args {
    std::string config;
    std::string preset;
    std::string out;
    std::string snapshot;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Args& args) {
    sub->add_option("--config", args.config, "sectioned key = value config file");
    sub->add_option("--preset", args.preset, "preset name (problem.preset)");
    sub->add_option("--out", args.out, "output directory (output.dir)");
    sub->add_option("--override", args.overrides, "section.key=value, repeatable")->take_all();
    sub->add_option("--snapshot", args.snapshot, "input snapshot (output.snapshot)");
}

RunConfig resolve(const Args& args) {
    std::vector<std::string> ov;
    if (!args.preset.empty()) ov.push_back("problem.preset=" + args.preset);
    if (!args.out.empty()) ov.push_back("output.dir=" + args.out);
    if (!args.snapshot.empty()) ov.push_back("output.snapshot=" + args.snapshot);
    ov.insert(ov.end(), args.overrides.begin(), args.overrides.end());
    return load_config(args.config, ov);
}

int run(const std::string& cmd, const Args& args) {
    const RunConfig cfg = resolve(args);
    if (cmd == "selftest") {
        const SelftestReport rep = run_selftest(cfg);
        std::cout << rep.text();
        return rep.passed() ? kPass : kCheckFailed;
    }
    if (cmd == "solve") {
        const SolveOutput out = run_solve(cfg);
        const auto& r = out.residuals;
        std::printf("snapshot %s\nmeta %s\n", out.snapshot_path.c_str(), out.meta_path.c_str());
        std::printf("residual pde=%.3e complementarity=%.3e flux_sign=%.3e obstacle=%.3e (%s)\n", r.pde,
                    r.complementarity, r.flux_sign, r.obstacle, out.passed ? "pass" : "fail");
        return out.passed ? kPass : kCheckFailed;
    }
    const std::string snap = default_snapshot(cfg);
    if (cmd == "functionals") {
        std::printf("csv %s\n", run_functionals(cfg, snap).c_str());
        return kPass;
    }
    if (cmd == "classify") {
        const ClassifyOutput out = run_classify(cfg, snap);
        std::printf("records %s (%zu points)\n", out.records_path.c_str(), out.records.size());
        for (const auto& r : out.records) {
            std::printf("  x=%g", r.point[0]);
            if (r.n == 2) std::printf(",%g", r.point[1]);
            std::printf(" t=%g %s", r.t, to_string(r.cls).c_str());
            if (r.kappa) std::printf(" kappa=%.4f", *r.kappa);
            if (r.d_kappa) std::printf(" d=%d", *r.d_kappa);
            std::printf("\n");
        }
        if (!out.gap_ok) std::printf("gap check failed\n");
        return out.gap_ok ? kPass : kCheckFailed;
    }
    if (cmd == "reduce") {
        const ReduceOutput out = run_reduce(cfg, snap);
        std::printf("report %s\nk=%d M0=%.6g drift=%.3g gamma mismatches=%zu/%zu (%s)\n", out.report_path.c_str(),
                    out.reduction.k, out.fine.M0, out.drift, out.mismatched, out.compared,
                    out.passed ? "pass" : "fail");
        return out.passed ? kPass : kCheckFailed;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thin obstacle free boundary toolkit"};
    app.require_subcommand(1, 1);
    Args args;
    for (const char* name : {"selftest", "solve", "functionals", "classify", "reduce"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub, args);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        return run(cmd, args);
    } catch (const NonconvergenceError& e) {
        std::fprintf(stderr, "nonconvergence: %s\nlast residual: %.17g\n", e.what(), e.last_residual());
        return kNonconvergence;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kUsage;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return kUsage;
    } catch (const IllConditionedError& e) {
        std::fprintf(stderr, "ill-conditioned: %s (condition %.3g)\n", e.what(), e.condition());
        return kCheckFailed;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kUsage;
    }
}
