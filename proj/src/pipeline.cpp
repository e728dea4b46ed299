#include "thinfb/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "thinfb/errors.hpp"
#include "thinfb/functionals.hpp"
#include "thinfb/quadrature.hpp"
#include "thinfb/snapshot.hpp"
#include "thinfb/special_kernels.hpp"

namespace thinfb {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string echo_block(const RunConfig& cfg, const char* prefix) {
    std::string out;
    for (const auto& line : config_echo(cfg)) out += prefix + line + "\n";
    return out;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

HalfGrid config_grid(const RunConfig& cfg) {
    HalfGrid g = cfg.grid;
    g.n = cfg.n;
    return g;
}

std::string obstacle_name_for(const Preset& p) { return p.name == "sine-obstacle" ? "sine" : "zero"; }

}  // namespace

bool SelftestReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.passed; });
}

std::string SelftestReport::text() const {
    std::string out;
    for (const auto& c : checks) {
        out += (c.passed ? "PASS " : "FAIL ") + c.name + " defect=" + num(c.defect) + " tol=" + num(c.tol);
        if (!c.detail.empty()) out += " " + c.detail;
        out += "\n";
    }
    out += passed() ? "selftest: all checks passed\n" : "selftest: FAILED\n";
    return out;
}

std::vector<ExactPolynomial> caloric_battery() {
    // all 50 monomials of degree <= 6 in degree-major order, then 20 evenly spaced picks
    std::vector<Exponents> all;
    for (int deg = 0; deg <= 6; ++deg)
        for (int k = 0; 2 * k <= deg; ++k)
            for (int i = deg - 2 * k; i >= 0; --i) {
                Exponents e;
                e.x[0] = i;
                e.x[1] = deg - 2 * k - i;
                e.t = k;
                all.push_back(e);
            }
    std::vector<ExactPolynomial> out;
    const std::size_t last = all.size() - 1;
    for (std::size_t i = 0; i < 20; ++i) out.push_back(ExactPolynomial::monomial(2, all[(i * last + 9) / 19]));
    return out;
}

SelftestReport run_selftest(const RunConfig& cfg) {
    validate(cfg);
    SelftestReport rep;
    const WeightParam w = cfg.weight();

    KernelSelftestOptions opt;
    opt.start_nodes = cfg.selftest_start_nodes;
    opt.max_nodes = cfg.selftest_max_nodes;
    const double tol = std::min({cfg.tol_mass, cfg.tol_ck, cfg.tol_strip});
    const KernelSelftestReport kr = kernel_selftest(w, cfg.n, tol, opt);
    for (const auto& c : kr.checks) {
        CheckLine l;
        l.name = "kernel." + c.name;
        l.tol = c.name == "mass" ? cfg.tol_mass : c.name == "chapman_kolmogorov" ? cfg.tol_ck : cfg.tol_strip;
        l.defect = c.defect;
        l.passed = c.converged && std::isfinite(c.defect) && c.defect < l.tol;
        l.detail = c.detail;
        rep.checks.push_back(l);
    }

    std::vector<WeightParam> ws = {WeightParam(-1, 2), WeightParam(0, 1), WeightParam(1, 2)};
    if (w.has_exact() && w.exact_a() != Rational(-1, 2) && w.exact_a() != Rational(0) && w.exact_a() != Rational(1, 2))
        ws.push_back(w);
    const auto battery = caloric_battery();
    for (const auto& wa : ws) {
        CheckLine l;
        l.name = "caloric_extension a=" + wa.exact_a().str();
        int failed = 0;
        for (const auto& q : battery) {
            const ExactPolynomial p = caloric_extension(q, wa);
            const ExactPolynomial r = apply_La(p, wa);
            ExactPolynomial trace(2);
            for (const auto& [e, c] : p.terms())
                if (e.y == 0) trace.add(e, c);
            if (!r.is_zero() || !p.is_even_in_y() || !(trace - q).is_zero()) ++failed;
        }
        l.defect = failed;
        l.tol = 0.5;
        l.passed = failed == 0;
        l.detail = std::to_string(battery.size()) + " monomials, " + std::to_string(failed) + " failed";
        rep.checks.push_back(l);
    }
    return rep;
}

Setup make_setup(const RunConfig& cfg, const HalfGrid& g) {
    const WeightParam w = cfg.weight();
    Setup s{make_preset(cfg.preset, cfg.n, w), ObstacleSpec{}, Problem{}};
    const std::string oname = cfg.obstacle == "preset" ? obstacle_name_for(s.preset) : cfg.obstacle;
    s.obstacle = make_obstacle(oname, cfg.n, cfg.ell, cfg.obstacle_coefficients);
    s.problem = make_problem(s.preset, g);
    s.problem.obstacle = s.obstacle.psi;
    if (cfg.outer_bc == "zero") {
        s.problem.boundary = nullptr;
        s.problem.exterior = nullptr;
    }
    return s;
}

std::string default_snapshot(const RunConfig& cfg) {
    if (!cfg.snapshot.empty()) return cfg.snapshot;
    return (std::filesystem::path(cfg.out_dir) / "solution.thinfb").string();
}

SolveOutput run_solve(const RunConfig& cfg) {
    validate(cfg);
    const Setup s = make_setup(cfg, config_grid(cfg));
    SolveOutput out;
    out.solution = solve(s.problem, cfg.solver);
    out.residuals = residual_check(*out.solution.U, out.solution.F.get(), out.solution.psi, cfg.solver);
    const ResidualReport& r = out.residuals;
    const double lim = 10.0 * cfg.solver.psor_tol * r.scale;
    out.passed = r.pde <= lim && r.complementarity <= lim && r.flux_sign <= lim &&
                 r.obstacle <= cfg.solver.contact_tol * r.scale;

    out.snapshot_path = out_path(cfg, "solution.thinfb");
    write_snapshot(out.snapshot_path, *out.solution.U);

    long iters = 0;
    int contact = 0;
    for (const auto& st : out.solution.steps) {
        iters += st.iterations;
        contact = st.contact_nodes;
    }
    const HalfGrid& g = out.solution.U->grid();
    std::size_t final_contact = 0;
    {
        const ThinMask c = coincidence_mask(*out.solution.U, out.solution.psi, cfg.solver.contact_tol);
        for (std::size_t k = 0; k < g.thin_slice_size(); ++k) final_contact += c.values[(g.nt - 1) * g.thin_slice_size() + k];
    }
    std::string meta = echo_block(cfg, "");
    meta += "\n[run]\n";
    meta += "kernels = " + out.solution.kernels + "\n";
    meta += "omega = " + num(out.solution.omega) + "\n";
    meta += "psor_iterations = " + std::to_string(iters) + "\n";
    meta += "final_contact_nodes = " + std::to_string(contact) + "\n";
    meta += "final_contact_fraction = " + num(static_cast<double>(final_contact) / g.thin_slice_size()) + "\n";
    meta += "\n[residual_check]\n";
    meta += "pde = " + num(r.pde) + "\n";
    meta += "complementarity = " + num(r.complementarity) + "\n";
    meta += "flux_sign = " + num(r.flux_sign) + "\n";
    meta += "obstacle = " + num(r.obstacle) + "\n";
    meta += "scale = " + num(r.scale) + "\n";
    meta += std::string("status = ") + (out.passed ? "pass" : "fail") + "\n";
    out.meta_path = out_path(cfg, "solution.meta.txt");
    write_file_atomic(out.meta_path, meta);
    return out;
}

Loaded load_solution(const RunConfig& cfg, const std::string& snapshot) {
    validate(cfg);
    ScalarField raw = read_snapshot(snapshot);
    const HalfGrid g = raw.grid();
    if (g.n != cfg.n) throw ConfigError("snapshot dimension " + std::to_string(g.n) + " differs from problem.n");
    if (std::abs(raw.weight().a() - cfg.a()) > 1e-15)
        throw ConfigError("snapshot weight a = " + num(raw.weight().a()) + " differs from problem.a");
    Loaded L{make_setup(cfg, g), nullptr, nullptr, ThinField{}};
    L.U = std::make_shared<ScalarField>(g, cfg.weight());
    L.U->values() = std::move(raw.values());
    const Preset& p = L.setup.preset;
    // the closed form is the exact solution only for the preset's own obstacle and data
    const bool own = cfg.obstacle == "preset" && cfg.outer_bc == "preset";
    if (cfg.exterior == "preset" && own && p.exact) L.U->set_exterior(p.exact);
    if (p.source) {
        L.F = std::make_shared<ScalarField>(g, cfg.weight());
        L.F->fill(p.source);
    }
    L.psi = make_thin_field(g, L.setup.obstacle.psi);
    return L;
}

Field frequency_field(const Loaded& L) {
    const Preset& p = L.setup.preset;
    if (L.setup.obstacle.name == "zero") return grid_field(L.U, L.F, p.source);
    // U - psi with psi extended constantly in y; the source picks up -(d_t - Delta) psi
    const Subtracted sub = subtract_obstacle(*L.U, L.setup.obstacle);
    if (L.U->has_exterior()) {
        const auto ext = L.U->exterior();
        const auto psi = L.setup.obstacle.psi;
        sub.W->set_exterior([ext, psi, n = L.U->grid().n](const SpacePoint& X, double t) {
            std::array<double, kMaxThinDim> x{};
            for (int i = 0; i < n; ++i) x[i] = X.x[i];
            return ext(X, t) - psi(x, t);
        });
    }
    const auto srcU = p.source;
    const auto srcP = sub.source;
    return grid_field(sub.W, nullptr, [srcU, srcP](const SpacePoint& X, double t) {
        return (srcU ? srcU(X, t) : 0.0) + srcP(X, t);
    });
}

std::string run_functionals(const RunConfig& cfg, const std::string& snapshot) {
    const Loaded L = load_solution(cfg, snapshot);
    const Preset& p = L.setup.preset;
    const Field U = frequency_field(L);
    ProfileSpec spec;
    spec.radii = radius_ladder(cfg.r_max, cfg.ladder, cfg.ratio);
    spec.ell = cfg.ell;
    spec.sigma = cfg.sigma;
    spec.kappa = cfg.kappa;
    if (cfg.kappa && p.polynomial && p.polynomial->homogeneous_degree() == *cfg.kappa &&
        validate_P_kappa_plus(*p.polynomial, cfg.weight(), *cfg.kappa).in_P)
        spec.p_kappa = p.polynomial;
    const StripRule rule = make_strip_rule(cfg.weight(), cfg.n, cfg.orders);
    const FrequencyProfile prof = frequency_profile(U, cfg.weight(), spec, rule);

    std::string text = echo_block(cfg, "# ");
    text += "# snapshot = " + snapshot + "\n";
    text += "# phi_C = " + (prof.C ? num(*prof.C) : std::string("none")) + "\n";
    text += "# monneau_C = " + (prof.monneau_C ? num(*prof.monneau_C) : std::string("none")) + "\n";
    text += profile_csv(prof);
    const std::string path = out_path(cfg, "functionals.csv");
    write_file_atomic(path, text);
    return path;
}

ClassifyOutput run_classify(const RunConfig& cfg, const std::string& snapshot) {
    const Loaded L = load_solution(cfg, snapshot);
    const HalfGrid& g = L.U->grid();
    const WeightParam w = cfg.weight();

    ClassifyConfig cc = cfg.classify;
    cc.ell = cfg.ell;
    cc.sigma = cfg.sigma;
    cc.r_max = cfg.r_max;
    cc.ladder = cfg.ladder;
    cc.orders = cfg.orders;
    cc.kappa.class_tol = cc.class_tol;
    cc.fb.contact_tol = cfg.solver.contact_tol;

    const ClassifyInput in{L.U, L.F, L.psi, frequency_field(L)};

    std::vector<std::pair<ThinPoint, double>> points;
    if (cfg.points == "auto") {
        const ThinMask gamma = extended_free_boundary(*L.U, L.F.get(), L.psi, cc.fb);
        const int m = g.nt - 1;
        for (int i1 = 0; i1 < g.nx; ++i1)
            for (int i2 = 0; i2 < g.nx2(); ++i2)
                if (gamma.at(m, i1, i2)) {
                    ThinPoint x{};
                    x[0] = g.x(i1);
                    if (g.n == 2) x[1] = g.x(i2);
                    points.emplace_back(x, g.t(m));
                }
    } else {
        points = parse_points(cfg.points, cfg.n);
    }

    ClassifyOutput out;
    std::string text = echo_block(cfg, "# ");
    text += "# snapshot = " + snapshot + "\n";
    text += "# points = " + std::to_string(points.size()) + "\n\n";
    for (const auto& [x, t] : points) {
        out.records.push_back(classify_point(in, w, x, t, cc));
        out.gap_ok = out.gap_ok && out.records.back().gap_ok;
        text += serialize(out.records.back());
    }
    out.records_path = out_path(cfg, "records.txt");
    write_file_atomic(out.records_path, text);
    const auto strata = stratify(out.records);
    write_file_atomic(out_path(cfg, "strata.txt"), echo_block(cfg, "# ") + strata_summary(strata));
    write_file_atomic(out_path(cfg, "strata.csv"), echo_block(cfg, "# ") + strata_csv(strata));
    return out;
}

ReduceOutput run_reduce(const RunConfig& cfg, const std::string& snapshot) {
    const Loaded L = load_solution(cfg, snapshot);
    const Preset& p = L.setup.preset;
    const HalfGrid& g = L.U->grid();
    const WeightParam w = cfg.weight();
    const ObstacleSpec& psi = L.setup.obstacle;

    ReduceOutput out;
    out.reduction = globalize(grid_field(L.U, L.F, p.source), L.U, psi, w);
    const Reduction& R = out.reduction;

    HalfGrid coarse = g;
    coarse.nx = (g.nx - 1) / 2 + 1;
    coarse.ny = (g.ny - 1) / 2 + 1;
    coarse.nt = (g.nt - 1) / 4 + 1;
    out.fine = growth_bounds_check(R.F, g, cfg.ell);
    out.coarse = growth_bounds_check(R.F, coarse, cfg.ell);
    auto rel = [](double a, double b) {
        const double m = std::max(std::abs(a), std::abs(b));
        return m == 0.0 ? 0.0 : std::abs(a - b) / m;
    };
    out.drift = rel(out.fine.M0, out.coarse.M0);
    if (out.fine.M1 && out.coarse.M1) out.drift = std::max(out.drift, rel(*out.fine.M1, *out.coarse.M1));

    FreeBoundaryConfig fb = cfg.classify.fb;
    fb.contact_tol = cfg.solver.contact_tol;
    const ThinField zero = make_thin_field(g, [](const std::array<double, kMaxThinDim>&, double) { return 0.0; });
    const ThinMask gu = extended_free_boundary(*L.U, L.F.get(), L.psi, fb);
    const ThinMask gv = extended_free_boundary(*R.V_grid, R.F_grid.get(), zero, fb);
    const double inner = 0.5;
    for (int m = 1; m < g.nt; ++m)
        for (int i1 = 0; i1 < g.nx; ++i1)
            for (int i2 = 0; i2 < g.nx2(); ++i2) {
                const double r2 = g.x(i1) * g.x(i1) + (g.n == 2 ? g.x(i2) * g.x(i2) : 0.0);
                if (r2 >= inner * inner) continue;
                ++out.compared;
                out.mismatched += gu.at(m, i1, i2) != gv.at(m, i1, i2);
            }

    const bool finite = std::isfinite(out.fine.M0) && (!out.fine.M1 || std::isfinite(*out.fine.M1)) &&
                        (!out.fine.M2 || std::isfinite(*out.fine.M2));
    out.passed = finite && out.drift < 0.1 && out.mismatched == 0;

    std::string text = echo_block(cfg, "# ");
    text += "# snapshot = " + snapshot + "\n";
    text += "obstacle = " + psi.name + "\n";
    text += "k = " + std::to_string(R.k) + "\n";
    text += "ell = " + num(R.ell) + "\n";
    text += "q = " + to_text(R.q, ";") + "\n";
    auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("none"); };
    text += "M0 = " + num(out.fine.M0) + "\n";
    text += "M1 = " + opt(out.fine.M1) + "\n";
    text += "M2 = " + opt(out.fine.M2) + "\n";
    text += "samples = " + std::to_string(out.fine.samples) + "\n";
    text += "coarse_M0 = " + num(out.coarse.M0) + "\n";
    text += "coarse_M1 = " + opt(out.coarse.M1) + "\n";
    text += "coarse_M2 = " + opt(out.coarse.M2) + "\n";
    text += "drift = " + num(out.drift) + "\n";
    text += "gamma_compared = " + std::to_string(out.compared) + "\n";
    text += "gamma_mismatched = " + std::to_string(out.mismatched) + "\n";
    text += std::string("status = ") + (out.passed ? "pass" : "fail") + "\n";
    out.report_path = out_path(cfg, "reduce.txt");
    write_file_atomic(out.report_path, text);
    write_snapshot(out_path(cfg, "vk.thinfb"), *R.V_grid);
    return out;
}

}  // namespace thinfb
