#include "thinfb/freeboundary.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "thinfb/errors.hpp"

namespace thinfb {

namespace {

double field_scale(const ScalarField& U) {
    double m = 1.0;
    for (double v : U.values()) m = std::max(m, std::abs(v));
    return m;
}

ThinMask empty_mask(const HalfGrid& g) {
    ThinMask m;
    m.grid = g;
    m.values.assign(static_cast<std::size_t>(g.nt) * g.thin_slice_size(), 0);
    return m;
}

// Boundary of `in` in the grid graph with edges along x_i and t.
void add_boundary(const ThinMask& in, ThinMask& out) {
    const HalfGrid& g = in.grid;
    const int n2 = g.nx2();
    for (int m = 0; m < g.nt; ++m)
        for (int i1 = 0; i1 < g.nx; ++i1)
            for (int i2 = 0; i2 < n2; ++i2) {
                if (!in.at(m, i1, i2)) continue;
                bool edge = false;
                auto probe = [&](int mm, int j1, int j2) {
                    if (mm < 0 || mm >= g.nt || j1 < 0 || j1 >= g.nx || j2 < 0 || j2 >= n2) return;
                    if (!in.at(mm, j1, j2)) edge = true;
                };
                probe(m - 1, i1, i2);
                probe(m + 1, i1, i2);
                probe(m, i1 - 1, i2);
                probe(m, i1 + 1, i2);
                if (g.n == 2) {
                    probe(m, i1, i2 - 1);
                    probe(m, i1, i2 + 1);
                }
                if (edge) out.at(m, i1, i2) = 1;
            }
}

struct NodeIndex {
    int m = 0, i1 = 0, i2 = 0;
};

NodeIndex nearest_node(const HalfGrid& g, const ThinPoint& x0, double t0) {
    const double eps = 1e-9;
    for (int i = 0; i < g.n; ++i)
        if (std::abs(x0[i]) > g.Rx * (1.0 + eps)) throw DomainError("point lies outside the grid");
    if (t0 > g.ht() * eps || t0 < -g.T * (1.0 + eps)) throw DomainError("point time lies outside the grid");
    NodeIndex k;
    k.i1 = static_cast<int>(std::lround((x0[0] + g.Rx) / g.hx()));
    k.i2 = g.n == 2 ? static_cast<int>(std::lround((x0[1] + g.Rx) / g.hx())) : 0;
    k.m = static_cast<int>(std::lround((t0 + g.T) / g.ht()));
    return k;
}

double thin_dist(const HalfGrid& g, int i1, int i2, const ThinPoint& x0) {
    double d = (g.x(i1) - x0[0]) * (g.x(i1) - x0[0]);
    if (g.n == 2) d += (g.x(i2) - x0[1]) * (g.x(i2) - x0[1]);
    return std::sqrt(d);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::size_t ThinMask::count() const {
    return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::uint8_t{1}));
}

ThinMask coincidence_mask(const ScalarField& U, const ThinField& psi, double contact_tol) {
    const HalfGrid& g = U.grid();
    ThinMask mask = empty_mask(g);
    const double tol = contact_tol * field_scale(U);
    for (int m = 0; m < g.nt; ++m)
        for (int i1 = 0; i1 < g.nx; ++i1)
            for (int i2 = 0; i2 < g.nx2(); ++i2)
                mask.at(m, i1, i2) = U.at(m, i1, i2, 0) - psi.at(m, i1, i2) <= tol;
    return mask;
}

ThinMask extended_free_boundary(const ScalarField& U, const ScalarField* F, const ThinField& psi,
                                const FreeBoundaryConfig& cfg) {
    const HalfGrid& g = U.grid();
    const double scale = field_scale(U);
    const ThinMask contact = coincidence_mask(U, psi, cfg.contact_tol);
    const ThinField flux = weighted_normal_derivative(U, cfg.scheme, F);
    ThinMask S = empty_mask(g);
    for (std::size_t k = 0; k < S.values.size(); ++k)
        S.values[k] = contact.values[k] && -flux.values[k] <= cfg.flux_tol * scale;
    ThinMask out = empty_mask(g);
    add_boundary(S, out);
    if (cfg.include_contact_edge) add_boundary(contact, out);
    return out;
}

std::vector<DensityRow> density_profile(const ThinMask& mask, const ThinPoint& x0, double t0,
                                        const std::vector<double>& radii) {
    const HalfGrid& g = mask.grid;
    const double eps = 1e-12;
    std::vector<DensityRow> rows;
    for (double r : radii) {
        if (!(r > 0.0)) throw DomainError("density_profile: radii must be positive");
        DensityRow row;
        row.r = r;
        std::size_t hit = 0;
        for (int m = 0; m < g.nt; ++m) {
            const double t = g.t(m);
            if (t > t0 + eps * g.ht() || t <= t0 - r * r + eps * g.ht()) continue;
            for (int i1 = 0; i1 < g.nx; ++i1)
                for (int i2 = 0; i2 < g.nx2(); ++i2) {
                    if (thin_dist(g, i1, i2, x0) >= r * (1.0 - eps)) continue;
                    ++row.nodes;
                    hit += mask.at(m, i1, i2);
                }
        }
        row.density = row.nodes ? static_cast<double>(hit) / row.nodes : 0.0;
        bool inside = t0 - r * r >= -g.T * (1.0 + eps);
        for (int i = 0; i < g.n; ++i) inside = inside && std::abs(x0[i]) + r <= g.Rx * (1.0 + eps);
        row.reliable = inside && r >= 3.0 * g.hx() && r * r >= 3.0 * g.ht();
        rows.push_back(row);
    }
    return rows;
}

std::optional<double> density_slope(const std::vector<DensityRow>& rows) {
    std::vector<double> lx, ly;
    for (const auto& r : rows) {
        if (!r.reliable) continue;
        if (r.density <= 0.0) return -std::numeric_limits<double>::infinity();
        lx.push_back(std::log(r.r));
        ly.push_back(std::log(r.density));
    }
    if (lx.size() < 2) return std::nullopt;
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxy += (lx[k] - mx) * (ly[k] - my);
        sxx += (lx[k] - mx) * (lx[k] - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

KappaEstimate estimate_kappa(const FrequencyProfile& profile, const KappaConfig& cfg) {
    std::vector<double> xs, ns;
    double trunc = 0.0, smallest = std::numeric_limits<double>::infinity();
    for (const auto& row : profile.rows) {
        if (!row.N || !(row.H > 0.0)) continue;
        if (row.trunc_err > cfg.trunc_rel_max * row.H) continue;
        if (row.r < cfg.min_radius) continue;
        xs.push_back(std::pow(row.r, 1.0 - profile.sigma));
        ns.push_back(*row.N);
        trunc = std::max(trunc, row.trunc_err / row.H);
        smallest = std::min(smallest, row.r);
    }
    if (static_cast<int>(xs.size()) < cfg.min_radii) {
        throw DomainError("estimate_kappa: " + std::to_string(xs.size()) + " reliable radii, need " +
                          std::to_string(cfg.min_radii));
    }
    const double m = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ns[k];
    }
    mx /= m;
    my /= m;
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ns[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    KappaEstimate e;
    e.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    e.kappa = my - e.slope * mx;
    double ssr = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double d = ns[k] - (e.kappa + e.slope * xs[k]);
        ssr += d * d;
    }
    e.uncertainty = std::sqrt(ssr / std::max(1.0, m - 2.0)) + trunc;
    e.radii_used = static_cast<int>(xs.size());
    e.smallest_radius = smallest;
    e.at_ceiling = e.kappa >= profile.ell - 1.0 + profile.sigma - cfg.class_tol;
    return e;
}

BlowupFit extract_blowup(const Field& U, int kappa, const WeightParam& w, double r_fit, const StripRule& rule,
                         double chop) {
    if (kappa < 1) throw DomainError("extract_blowup: kappa must be positive");
    if (U.n != rule.n) throw DomainError("extract_blowup: field and rule dimensions differ");
    truncation_bound(U, r_fit, rule);
    const int n = U.n;
    std::vector<FloatPolynomial> basis;
    for (int j = 0; 2 * j <= kappa; ++j) {
        const int rest = kappa - 2 * j;
        for (int a1 = rest; a1 >= 0; --a1) {
            const int a2 = rest - a1;
            if (n == 1 && a2 != 0) continue;
            Exponents e;
            e.x[0] = a1;
            e.x[1] = a2;
            e.t = j;
            basis.push_back(caloric_extension(FloatPolynomial::monomial(n, e), w));
        }
    }
    const std::size_t ns = rule.space_size();
    const Eigen::Index rows = static_cast<Eigen::Index>(rule.tau.size() * ns);
    const Eigen::Index cols = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows);
    const double rk = std::pow(r_fit, kappa);
    Eigen::Index row = 0;
    for (std::size_t k = 0; k < rule.tau.size(); ++k) {
        const double t = -rule.tau[k];
        const double c = 2.0 * std::sqrt(rule.tau[k]);
        for (std::size_t s = 0; s < ns; ++s, ++row) {
            SpacePoint X = rule.xi[s];
            for (int i = 0; i < n; ++i) X.x[i] *= c;
            X.y *= c;
            const double sw = std::sqrt(rule.time_weight[k] * rule.space_weight[s]);
            SpacePoint Y = X;
            for (int i = 0; i < n; ++i) Y.x[i] *= r_fit;
            Y.y *= r_fit;
            b(row) = sw * U.sample(Y, r_fit * r_fit * t).u / rk;
            for (Eigen::Index q = 0; q < cols; ++q) A(row, q) = sw * basis[static_cast<std::size_t>(q)].evaluate(X, t);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    BlowupFit fit;
    fit.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (fit.condition > 1e12) throw IllConditionedError("extract_blowup: ill-conditioned basis", fit.condition);
    const Eigen::VectorXd coef = svd.solve(b);
    const double bn = b.norm();
    fit.residual = bn > 0.0 ? (A * coef - b).norm() / bn : 0.0;
    const double cmax = coef.cwiseAbs().maxCoeff();
    fit.p = FloatPolynomial(n);
    for (Eigen::Index q = 0; q < cols; ++q) {
        if (std::abs(coef(q)) <= chop * cmax) continue;
        Exponents none;
        fit.p = fit.p + basis[static_cast<std::size_t>(q)] * FloatPolynomial::monomial(n, none, coef(q));
    }
    return fit;
}

std::string to_string(PointClass c) {
    switch (c) {
        case PointClass::regular: return "regular";
        case PointClass::singular: return "singular";
        case PointClass::degenerate_family: return "degenerate-family";
        case PointClass::top_truncation: return "top-truncation";
        default: return "undetermined";
    }
}

ClassificationRecord classify_point(const ClassifyInput& in, const WeightParam& w, const ThinPoint& x0, double t0,
                                    const ClassifyConfig& cfg) {
    if (!in.U) throw DomainError("classify_point: no grid solution");
    const HalfGrid& g = in.U->grid();
    const NodeIndex node = nearest_node(g, x0, t0);
    const ThinMask gamma = extended_free_boundary(*in.U, in.F.get(), in.psi, cfg.fb);
    if (!gamma.at(node.m, node.i1, node.i2)) throw DomainError("classify_point: point is not on the extended free boundary");

    ClassificationRecord rec;
    rec.point = x0;
    rec.t = t0;
    rec.n = g.n;
    rec.s = w.s();
    const double one_s = 1.0 + w.s();
    const double tol = cfg.class_tol;

    const StripRule rule = make_strip_rule(w, g.n, cfg.orders);
    const Field centred = translated(in.field, x0, t0);
    ProfileSpec spec;
    spec.ell = cfg.ell;
    spec.sigma = cfg.sigma;
    for (double r : radius_ladder(cfg.r_max, cfg.ladder)) {
        try {
            truncation_bound(centred, r, rule);
            spec.radii.push_back(r);
        } catch (const DomainError&) {
            rec.notes.push_back("radius " + fmt(r) + " refused by truncation");
        }
    }

    const ThinMask contact = coincidence_mask(*in.U, in.psi, cfg.fb.contact_tol);
    rec.density = density_profile(contact, x0, t0, spec.radii.empty() ? radius_ladder(cfg.r_max, cfg.ladder) : spec.radii);
    rec.density_slope = density_slope(rec.density);

    // growth of the gap near the point
    {
        double rmin = 0.0;
        for (const auto& d : rec.density)
            if (d.reliable) rmin = d.r;
        if (rmin > 0.0) {
            double le = 0, lp = 0, lh = 0;
            for (int m = 0; m < g.nt; ++m) {
                const double dt = g.t(m) - t0;
                for (int i1 = 0; i1 < g.nx; ++i1)
                    for (int i2 = 0; i2 < g.nx2(); ++i2) {
                        const double dx = thin_dist(g, i1, i2, x0);
                        const double u = std::abs(in.U->at(m, i1, i2, 0) - in.psi.at(m, i1, i2));
                        if (m == node.m && dx <= rmin) le = std::max(le, u);
                        if (dx <= rmin && dt <= 0.0 && dt >= -rmin * rmin) lp = std::max(lp, u);
                        if (dx * dx + dt * dt <= rmin * rmin) lh = std::max(lh, u);
                    }
            }
            const double rs = std::pow(rmin, one_s);
            rec.L_ell = le / rs;
            rec.L_par = lp / rs;
            rec.L_hyp = lh / rs;
        }
    }

    if (spec.radii.size() < 3) {
        rec.notes.push_back("fewer than 3 admissible radii");
        return rec;
    }
    const FrequencyProfile prof = frequency_profile(centred, w, spec, rule);
    rec.phi_C = prof.C;
    KappaConfig kc = cfg.kappa;
    kc.class_tol = tol;
    if (kc.min_radius <= 0.0) kc.min_radius = 3.0 * std::max(g.hx(), g.hy());
    KappaEstimate est;
    try {
        est = estimate_kappa(prof, kc);
    } catch (const DomainError& e) {
        rec.notes.push_back(e.what());
        return rec;
    }
    rec.kappa = est.kappa;
    rec.kappa_err = est.uncertainty;
    const double k = est.kappa;

    if (k < one_s - tol) {
        rec.notes.push_back("kappa below 1+s: inconsistent with the lower bound");
        return rec;
    }
    if (std::abs(k - one_s) <= tol) {
        rec.cls = PointClass::regular;
        return rec;
    }
    if (k > one_s + tol && k < 2.0 - tol) {
        rec.gap_ok = false;
        rec.notes.push_back("kappa inside the gap (1+s, 2)");
        return rec;
    }
    if (est.at_ceiling) {
        rec.cls = PointClass::top_truncation;
        return rec;
    }
    const int m2 = 2 * static_cast<int>(std::lround(k / 2.0));
    if (m2 >= 2 && std::abs(k - m2) <= tol) {
        const double r_fit = cfg.r_fit.value_or(2.0 * est.smallest_radius);
        bool fit_ok = false, member = false;
        try {
            const BlowupFit fit = extract_blowup(centred, m2, w, r_fit, rule, cfg.chop);
            rec.blowup = fit.p;
            rec.blowup_residual = fit.residual;
            fit_ok = fit.residual <= cfg.blowup_residual_max;
            const MembershipReport mr = validate_P_kappa_plus(fit.p, w, m2);
            member = mr.in_P;
            for (const auto& why : mr.reasons) rec.notes.push_back("blowup " + why);
            if (mr.homogeneous && *mr.kappa_est == m2) rec.d_kappa = spatial_dimension(fit.p, m2, cfg.rank_tol);
        } catch (const std::exception& e) {
            rec.notes.push_back(std::string("blowup fit failed: ") + e.what());
        }
        const bool thin = rec.density_slope && *rec.density_slope <= cfg.density_slope_max;
        if (!thin) rec.notes.push_back("contact density does not decay");
        if (!fit_ok) rec.notes.push_back("blowup residual above threshold");
        if (thin && fit_ok && member) {
            rec.cls = PointClass::singular;
        }
        return rec;
    }
    for (int m = 1; 2 * m + 1 - w.a() <= cfg.ell; ++m) {
        if (std::abs(k - (2 * m + 1 - w.a())) <= tol) {
            rec.cls = PointClass::degenerate_family;
            return rec;
        }
    }
    rec.notes.push_back("kappa matches no admissible value");
    return rec;
}

std::string serialize(const ClassificationRecord& r) {
    std::ostringstream os;
    os << "point=";
    for (int i = 0; i < r.n; ++i) os << (i ? "," : "") << fmt(r.point[i]);
    os << "\nt=" << fmt(r.t) << '\n';
    os << "class=" << to_string(r.cls) << '\n';
    os << "kappa=" << (r.kappa ? fmt(*r.kappa) : "") << '\n';
    os << "kappa_err=" << fmt(r.kappa_err) << '\n';
    os << "phi_C=" << (r.phi_C ? fmt(*r.phi_C) : "") << '\n';
    os << "density=";
    for (std::size_t k = 0; k < r.density.size(); ++k) {
        os << (k ? ";" : "") << fmt(r.density[k].r) << ':' << fmt(r.density[k].density)
           << (r.density[k].reliable ? "" : ":unreliable");
    }
    os << "\ndensity_slope=" << (r.density_slope ? fmt(*r.density_slope) : "") << '\n';
    os << "d_kappa=" << (r.d_kappa ? std::to_string(*r.d_kappa) : "") << '\n';
    os << "gap_ok=" << (r.gap_ok ? 1 : 0) << '\n';
    os << "L_ell=" << fmt(r.L_ell) << "\nL_par=" << fmt(r.L_par) << "\nL_hyp=" << fmt(r.L_hyp) << '\n';
    for (const auto& note : r.notes) os << "note=" << note << '\n';
    os << "blowup_residual=" << fmt(r.blowup_residual) << '\n';
    os << "blowup=" << (r.blowup ? to_text(*r.blowup, ";") : "") << "\n\n";
    return os.str();
}

std::map<StratumKey, Stratum> stratify(const std::vector<ClassificationRecord>& records) {
    std::map<StratumKey, Stratum> out;
    for (const auto& r : records) {
        if (r.cls != PointClass::singular || !r.kappa || !r.d_kappa) continue;
        const StratumKey key{static_cast<int>(std::lround(*r.kappa)), *r.d_kappa};
        Stratum& s = out[key];
        s.label = *r.d_kappa == r.n ? "time-like" : "space-like";
        s.points.emplace_back(r.point, r.t);
    }
    return out;
}

std::string strata_summary(const std::map<StratumKey, Stratum>& strata) {
    std::ostringstream os;
    if (strata.empty()) os << "no singular points\n";
    for (const auto& [key, s] : strata) {
        os << "Sigma_" << key.kappa << "^" << key.d << " (" << s.label << "): " << s.points.size() << " point"
           << (s.points.size() == 1 ? "" : "s") << '\n';
    }
    return os.str();
}

std::string strata_csv(const std::map<StratumKey, Stratum>& strata) {
    std::ostringstream os;
    os << "kappa,d,label,count,points\n";
    for (const auto& [key, s] : strata) {
        os << key.kappa << ',' << key.d << ',' << s.label << ',' << s.points.size() << ',';
        for (std::size_t k = 0; k < s.points.size(); ++k) {
            os << (k ? ";" : "") << fmt(s.points[k].first[0]) << ' ' << fmt(s.points[k].first[1]) << ' '
               << fmt(s.points[k].second);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace thinfb
