#include "thinfb/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "thinfb/errors.hpp"

namespace thinfb {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(d)) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return d;
}

int to_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long d = 0;
    try {
        d = std::stol(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return static_cast<int>(d);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

#define NUM(K, F)                                                                    \
    Entry {                                                                          \
        K, [](const RunConfig& c) { return fmt(c.F); },                              \
            [](RunConfig& c, const std::string& v) { c.F = to_double(K, v); }        \
    }
#define INT(K, F)                                                                    \
    Entry {                                                                          \
        K, [](const RunConfig& c) { return std::to_string(c.F); },                   \
            [](RunConfig& c, const std::string& v) { c.F = to_int(K, v); }           \
    }
#define STR(K, F)                                                                    \
    Entry {                                                                          \
        K, [](const RunConfig& c) { return c.F; }, [](RunConfig& c, const std::string& v) { c.F = v; } \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        STR("problem.a", a_text),
        INT("problem.n", n),
        STR("problem.preset", preset),
        STR("problem.obstacle", obstacle),
        STR("problem.obstacle_coefficients", obstacle_coefficients),
        INT("grid.nx", grid.nx),
        INT("grid.ny", grid.ny),
        INT("grid.nt", grid.nt),
        NUM("grid.Rx", grid.Rx),
        NUM("grid.Ry", grid.Ry),
        NUM("grid.T", grid.T),
        NUM("solver.psor_tol", solver.psor_tol),
        NUM("solver.omega", solver.omega),
        INT("solver.max_iters", solver.max_iters),
        NUM("solver.contact_tol", solver.contact_tol),
        STR("solver.outer_bc", outer_bc),
        NUM("functionals.ell", ell),
        NUM("functionals.sigma", sigma),
        Entry{"functionals.kappa",
              [](const RunConfig& c) { return c.kappa ? std::to_string(*c.kappa) : std::string("none"); },
              [](RunConfig& c, const std::string& v) {
                  if (v == "none" || v.empty())
                      c.kappa.reset();
                  else
                      c.kappa = to_int("functionals.kappa", v);
              }},
        NUM("functionals.r_max", r_max),
        INT("functionals.ladder", ladder),
        NUM("functionals.ratio", ratio),
        INT("functionals.hermite", orders.hermite),
        INT("functionals.laguerre", orders.laguerre),
        INT("functionals.time_panels", orders.time_panels),
        INT("functionals.time_nodes", orders.time_nodes),
        NUM("functionals.c_trunc", orders.c_trunc),
        STR("functionals.exterior", exterior),
        NUM("classify.class_tol", classify.class_tol),
        NUM("classify.density_slope", classify.density_slope_max),
        NUM("classify.blowup_residual", classify.blowup_residual_max),
        NUM("classify.rank_tol", classify.rank_tol),
        NUM("classify.chop", classify.chop),
        NUM("classify.flux_tol", classify.fb.flux_tol),
        INT("classify.min_radii", classify.kappa.min_radii),
        NUM("classify.trunc_rel_max", classify.kappa.trunc_rel_max),
        Entry{"classify.r_fit",
              [](const RunConfig& c) { return c.classify.r_fit ? fmt(*c.classify.r_fit) : std::string("auto"); },
              [](RunConfig& c, const std::string& v) {
                  if (v == "auto" || v.empty())
                      c.classify.r_fit.reset();
                  else
                      c.classify.r_fit = to_double("classify.r_fit", v);
              }},
        STR("classify.points", points),
        NUM("selftest.tol_mass", tol_mass),
        NUM("selftest.tol_ck", tol_ck),
        NUM("selftest.tol_strip", tol_strip),
        INT("selftest.start_nodes", selftest_start_nodes),
        INT("selftest.max_nodes", selftest_max_nodes),
        STR("output.dir", out_dir),
        STR("output.snapshot", snapshot),
    };
    return table;
}

#undef NUM
#undef INT
#undef STR

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& e : entries()) {
        if (e.key == key) {
            e.set(cfg, trim(value));
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

double RunConfig::a() const { return to_double("problem.a", a_text); }

WeightParam RunConfig::weight() const {
    const double v = a();
    if (!(v > -1.0 && v < 1.0)) throw ConfigError("problem.a must lie in (-1, 1), got " + a_text);
    // terminating decimal -> exact fraction
    std::string s = trim(a_text);
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s = s.substr(1);
    }
    const auto dot = s.find('.');
    const std::string digits = dot == std::string::npos ? s : s.substr(0, dot) + s.substr(dot + 1);
    const int scale = dot == std::string::npos ? 0 : static_cast<int>(s.size() - dot - 1);
    const bool plain = !digits.empty() && digits.size() <= 15 && digits.find_first_not_of("0123456789") == std::string::npos;
    if (!plain) return WeightParam(v);
    long num = std::stol(digits), den = 1;
    for (int i = 0; i < scale; ++i) den *= 10;
    return WeightParam(neg ? -num : num, den);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    set_key(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::ini_parser::read_ini(path, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        for (const auto& [section, body] : tree) {
            if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
            for (const auto& [key, value] : body) set_key(cfg, section + "." + key, value.data());
        }
    }
    for (const auto& o : overrides) apply_override(cfg, o);
    validate(cfg);
    return cfg;
}

void validate(const RunConfig& c) {
    auto positive = [](const char* what, double v) {
        if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
    };
    c.weight();
    if (c.n < 1 || c.n > kMaxThinDim) throw ConfigError("problem.n must be 1 or 2");
    HalfGrid g = c.grid;
    g.n = c.n;
    try {
        g.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    positive("solver.psor_tol", c.solver.psor_tol);
    positive("solver.contact_tol", c.solver.contact_tol);
    if (c.solver.max_iters < 1) throw ConfigError("solver.max_iters must be >= 1");
    if (c.solver.omega != 0.0 && !(c.solver.omega > 0.0 && c.solver.omega < 2.0))
        throw ConfigError("solver.omega must be 0 (automatic) or lie in (0, 2)");
    if (c.outer_bc != "preset" && c.outer_bc != "zero") throw ConfigError("solver.outer_bc must be preset or zero");
    if (!(c.ell >= 2.0)) throw ConfigError("functionals.ell must be >= 2");
    if (!(c.sigma > 0.0 && c.sigma < 1.0)) throw ConfigError("functionals.sigma must lie in (0, 1)");
    positive("functionals.r_max", c.r_max);
    if (c.ladder < 3) throw ConfigError("functionals.ladder needs at least 3 radii");
    if (!(c.ratio > 1.0)) throw ConfigError("functionals.ratio must exceed 1");
    if (c.orders.hermite < 1 || c.orders.laguerre < 1 || c.orders.time_panels < 1 || c.orders.time_nodes < 1)
        throw ConfigError("functionals quadrature orders must be >= 1");
    positive("functionals.c_trunc", c.orders.c_trunc);
    if (c.exterior != "preset" && c.exterior != "zero") throw ConfigError("functionals.exterior must be preset or zero");
    if (c.r_max * c.r_max > c.grid.T) throw ConfigError("functionals.r_max^2 exceeds the time horizon grid.T");
    if (c.exterior == "zero" && c.r_max * c.orders.c_trunc > std::min(c.grid.Rx, c.grid.Ry))
        throw ConfigError("functionals.r_max exceeds the truncation bound extent / c_trunc with a zero exterior");
    positive("classify.class_tol", c.classify.class_tol);
    positive("classify.blowup_residual", c.classify.blowup_residual_max);
    positive("classify.rank_tol", c.classify.rank_tol);
    positive("classify.flux_tol", c.classify.fb.flux_tol);
    positive("classify.trunc_rel_max", c.classify.kappa.trunc_rel_max);
    if (c.classify.r_fit) positive("classify.r_fit", *c.classify.r_fit);
    if (c.points != "auto") parse_points(c.points, c.n);
    positive("selftest.tol_mass", c.tol_mass);
    positive("selftest.tol_ck", c.tol_ck);
    positive("selftest.tol_strip", c.tol_strip);
    if (c.selftest_start_nodes < 1 || c.selftest_max_nodes < c.selftest_start_nodes)
        throw ConfigError("selftest node counts must satisfy 1 <= start_nodes <= max_nodes");
    if (c.out_dir.empty()) throw ConfigError("output.dir must not be empty");
}

std::vector<std::string> config_echo(const RunConfig& cfg) {
    std::vector<std::string> out;
    for (const auto& e : entries()) out.push_back(e.key + " = " + e.get(cfg));
    return out;
}

std::vector<std::pair<ThinPoint, double>> parse_points(const std::string& text, int n) {
    std::vector<std::pair<ThinPoint, double>> pts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto at = item.find('@');
        if (at == std::string::npos) throw ConfigError("classify.points: '" + item + "' lacks '@t'");
        ThinPoint x{};
        std::stringstream xs(item.substr(0, at));
        std::string c;
        int i = 0;
        while (std::getline(xs, c, ',')) {
            if (i >= n) throw ConfigError("classify.points: too many coordinates in '" + item + "'");
            x[i++] = to_double("classify.points", trim(c));
        }
        if (i != n) throw ConfigError("classify.points: '" + item + "' needs " + std::to_string(n) + " coordinates");
        pts.emplace_back(x, to_double("classify.points", trim(item.substr(at + 1))));
    }
    if (pts.empty()) throw ConfigError("classify.points: no points given");
    return pts;
}

}  // namespace thinfb
