#include "thinfb/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "thinfb/simd/kernels.hpp"

namespace thinfb {

namespace {

SpacePoint physical(const SpacePoint& xi, double c, int n) {
    SpacePoint X;
    for (int i = 0; i < n; ++i) X.x[i] = c * xi.x[i];
    X.y = c * xi.y;
    return X;
}

double z_of(const FieldSample& s, const SpacePoint& X, double t, int n) {
    return dot(X, s.grad, n) + 2.0 * t * s.ut;
}

double weighted(const std::vector<double>& w, const std::vector<double>& v) {
    return simd::active_kernels().weighted_sum(w.data(), v.data(), w.size());
}

void check_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
}

}  // namespace

double truncation_bound(const Field& U, double r, const StripRule& rule) {
    check_radius(r);
    if (!U.extent) return 0.0;
    const FieldExtent& e = *U.extent;
    if (!e.zero_outside) return 0.0;
    const double c = rule.orders.c_trunc;
    const double reach = std::min(e.Rx, e.Ry);
    if (reach < c * r || e.T < r * r * (1.0 - 1e-12)) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "refused: radius %.6g needs extent >= %.4g * r and time span >= r^2 (extent %.6g, span %.6g); "
                      "tail bound exp(-R^2/4r^2) = %.3g",
                      r, c, reach, e.T, std::exp(-reach * reach / (4.0 * r * r)));
        throw DomainError(buf);
    }
    // Mass of the normalized Gaussian outside the box at |t| = r^2.
    double tail = U.n * std::erfc(e.Rx / (2.0 * r));
    tail += boost::math::gamma_q(0.5 * (rule.a + 1.0), e.Ry * e.Ry / (4.0 * r * r));
    return tail;
}

StripValue strip_integral(const Field& U, const StripRule& rule, double r, const StripIntegrand& f) {
    check_radius(r);
    if (U.n != rule.n) throw DomainError("strip_integral: field and rule dimensions differ");
    const double tail = truncation_bound(U, r, rule);
    std::vector<double> slice_vals(rule.space_size());
    std::vector<double> time_vals(rule.tau.size());
    double max_abs = 0.0;
    for (std::size_t k = 0; k < rule.tau.size(); ++k) {
        const double t = -r * r * rule.tau[k];
        const double c = 2.0 * r * std::sqrt(rule.tau[k]);
        for (std::size_t s = 0; s < rule.space_size(); ++s) {
            const SpacePoint X = physical(rule.xi[s], c, rule.n);
            slice_vals[s] = f(U.sample(X, t), X, t);
            max_abs = std::max(max_abs, std::abs(slice_vals[s]));
        }
        time_vals[k] = weighted(rule.space_weight, slice_vals);
    }
    return {weighted(rule.time_weight, time_vals), tail * max_abs};
}

double slice_integral(const Field& U, const StripRule& rule, double r, const StripIntegrand& f) {
    check_radius(r);
    truncation_bound(U, r, rule);
    std::vector<double> vals(rule.space_size());
    const double t = -r * r;
    for (std::size_t s = 0; s < rule.space_size(); ++s) {
        const SpacePoint X = physical(rule.xi[s], 2.0 * r, rule.n);
        vals[s] = f(U.sample(X, t), X, t);
    }
    return weighted(rule.space_weight, vals);
}

FunctionalValues functional_suite(const Field& U, const StripRule& rule, double r) {
    check_radius(r);
    if (U.n != rule.n) throw DomainError("functional_suite: field and rule dimensions differ");
    const double tail = truncation_bound(U, r, rule);
    const int n = U.n;
    const std::size_t ns = rule.space_size();
    std::vector<double> h(ns), d(ns), uf(ns), uz(ns);
    std::vector<double> th(rule.tau.size()), td(th.size()), tuf(th.size()), tuz(th.size());
    double max_u2 = 0.0;
    for (std::size_t k = 0; k < rule.tau.size(); ++k) {
        const double t = -r * r * rule.tau[k];
        const double c = 2.0 * r * std::sqrt(rule.tau[k]);
        for (std::size_t s = 0; s < ns; ++s) {
            const SpacePoint X = physical(rule.xi[s], c, n);
            const FieldSample q = U.sample(X, t);
            h[s] = q.u * q.u;
            d[s] = -t * norm_sq(q.grad, n);
            uf[s] = -t * q.u * q.f;
            uz[s] = 0.5 * q.u * z_of(q, X, t, n);
            max_u2 = std::max(max_u2, h[s]);
        }
        th[k] = weighted(rule.space_weight, h);
        td[k] = weighted(rule.space_weight, d);
        tuf[k] = weighted(rule.space_weight, uf);
        tuz[k] = weighted(rule.space_weight, uz);
    }
    FunctionalValues v;
    v.r = r;
    v.H = weighted(rule.time_weight, th);
    v.D = weighted(rule.time_weight, td);
    v.I = v.D - weighted(rule.time_weight, tuf);
    v.I_z = weighted(rule.time_weight, tuz);
    v.trunc_err = tail * max_u2;
    if (v.H > 0.0) {
        v.N = 2.0 * v.I / v.H;
        v.Ntilde = 2.0 * v.D / v.H;
    }
    return v;
}

std::vector<double> radius_ladder(double r_max, int count, double ratio) {
    check_radius(r_max);
    if (count < 1 || !(ratio > 1.0)) throw DomainError("radius_ladder: need count >= 1 and ratio > 1");
    std::vector<double> r(count);
    for (int k = 0; k < count; ++k) r[k] = r_max * std::pow(ratio, -static_cast<double>(k));
    return r;
}

namespace {

// Derivative at s[k] of the Lagrange interpolant through a window of up to
// five neighbouring points (centered where possible).
double lagrange_derivative(const std::vector<double>& s, const std::vector<double>& f, std::size_t k) {
    const std::size_t n = s.size();
    const std::size_t width = std::min<std::size_t>(5, n % 2 == 0 && n < 5 ? n - 1 : n);
    std::size_t lo = k >= width / 2 ? k - width / 2 : 0;
    if (lo + width > n) lo = n - width;
    double der = 0.0;
    for (std::size_t i = lo; i < lo + width; ++i) {
        // d/ds of L_i at s_k
        double li = 0.0;
        for (std::size_t m = lo; m < lo + width; ++m) {
            if (m == i) continue;
            double term = 1.0 / (s[i] - s[m]);
            for (std::size_t q = lo; q < lo + width; ++q) {
                if (q == i || q == m) continue;
                term *= (s[k] - s[q]) / (s[i] - s[q]);
            }
            li += term;
        }
        der += li * f[i];
    }
    return der;
}

}  // namespace

PhiResult almgren_phi(const std::vector<double>& radii, const std::vector<double>& H, double ell, double sigma,
                      double C) {
    if (radii.size() < 3) throw DomainError("almgren_phi: need at least 3 ladder radii");
    if (radii.size() != H.size()) throw DomainError("almgren_phi: radii and H differ in length");
    if (!(ell >= 2.0)) throw DomainError("almgren_phi: ell must be >= 2");
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("almgren_phi: sigma must lie in (0, 1)");
    const double p = 2.0 * ell - 2.0 + 2.0 * sigma;
    const std::size_t n = radii.size();
    std::vector<double> s(n), logm(n);
    PhiResult out;
    out.in_E.resize(n);
    out.phi.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        check_radius(radii[k]);
        s[k] = std::log(radii[k]);
        const double floor_v = std::pow(radii[k], p);
        out.in_E[k] = H[k] > floor_v;
        logm[k] = std::log(std::max(H[k], floor_v));
    }
    for (std::size_t k = 0; k < n; ++k) {
        // r d/dr log M = d log M / d log r
        const double dlog = lagrange_derivative(s, logm, k);
        const double e = std::exp(C * std::pow(radii[k], 1.0 - sigma));
        out.phi[k] = 0.5 * e * dlog + 2.0 * (e - 1.0);
    }
    return out;
}

namespace {

// Smallest increment of g along increasing radius.
double min_increment(const std::vector<double>& radii, const std::vector<double>& g) {
    std::vector<std::size_t> order(radii.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < order.size(); ++i) m = std::min(m, g[order[i]] - g[order[i - 1]]);
    return m;
}

}  // namespace

PhiFit fit_phi_constant(const std::vector<double>& radii, const std::vector<double>& H, double ell, double sigma,
                        double slack) {
    PhiFit fit;
    for (int i = 0; i <= 100; ++i) {
        const double C = 0.1 * i;
        fit.at_C = almgren_phi(radii, H, ell, sigma, C);
        fit.min_increment = min_increment(radii, fit.at_C.phi);
        if (fit.min_increment >= -slack) {
            fit.C = C;
            return fit;
        }
    }
    return fit;
}

std::optional<double> fit_monotone_correction(const std::vector<double>& radii, const std::vector<double>& g,
                                              double sigma, double slack) {
    std::vector<double> h(g.size());
    for (int i = 0; i <= 100; ++i) {
        const double C = 0.1 * i;
        for (std::size_t k = 0; k < g.size(); ++k) h[k] = g[k] + C * std::pow(radii[k], 1.0 - sigma);
        if (min_increment(radii, h) >= -slack) return C;
    }
    return std::nullopt;
}

double weiss(const FunctionalValues& v, double kappa) {
    return std::pow(v.r, -2.0 * kappa) * (v.D - 0.5 * kappa * v.H);
}

std::optional<double> weiss_from_frequency(const FunctionalValues& v, double kappa) {
    if (!v.Ntilde) return std::nullopt;
    return v.H / (2.0 * std::pow(v.r, 2.0 * kappa)) * (*v.Ntilde - kappa);
}

namespace {

double monneau_impl(const Field& U, const FloatPolynomial& p, int kappa, double r, const StripRule& rule) {
    const Field V = difference(U, polynomial_field(p));
    const StripValue s = strip_integral(V, rule, r, [](const FieldSample& q, const SpacePoint&, double) {
        return q.u * q.u;
    });
    return s.value / std::pow(r, 2.0 * kappa);
}

void require_member(const MembershipReport& m) {
    if (m.in_P) return;
    std::string why;
    for (const auto& s : m.reasons) why += (why.empty() ? "" : ", ") + s;
    throw DomainError("monneau: polynomial rejected (" + why + ")");
}

}  // namespace

double monneau(const Field& U, const ExactPolynomial& p, const WeightParam& w, int kappa, double r,
               const StripRule& rule) {
    require_member(validate_P_kappa_plus(p, w, kappa));
    return monneau_impl(U, p.to_float(), kappa, r, rule);
}

double monneau(const Field& U, const FloatPolynomial& p, const WeightParam& w, int kappa, double r,
               const StripRule& rule) {
    require_member(validate_P_kappa_plus(p, w, kappa));
    return monneau_impl(U, p, kappa, r, rule);
}

FrequencyProfile frequency_profile(const Field& U, const WeightParam& w, const ProfileSpec& spec,
                                   const StripRule& rule) {
    if (spec.radii.size() < 3) throw DomainError("frequency_profile: need at least 3 radii");
    for (std::size_t k = 1; k < spec.radii.size(); ++k)
        if (!(spec.radii[k] < spec.radii[k - 1])) throw DomainError("frequency_profile: radii must decrease");
    FrequencyProfile prof;
    prof.ell = spec.ell;
    prof.sigma = spec.sigma;
    std::vector<double> H;
    for (double r : spec.radii) {
        const FunctionalValues v = functional_suite(U, rule, r);
        RadiusRecord rec;
        rec.r = r;
        rec.H = v.H;
        rec.D = v.D;
        rec.I = v.I;
        rec.N = v.N;
        rec.Ntilde = v.Ntilde;
        rec.trunc_err = v.trunc_err;
        if (spec.kappa) rec.W = weiss(v, *spec.kappa);
        if (spec.kappa && spec.p_kappa) rec.M = monneau(U, *spec.p_kappa, w, *spec.kappa, r, rule);
        prof.rows.push_back(rec);
        H.push_back(v.H);
    }
    const PhiFit fit = fit_phi_constant(spec.radii, H, spec.ell, spec.sigma, spec.slack);
    prof.C = fit.C;
    prof.phi_monotone = fit.C.has_value();
    for (std::size_t k = 0; k < prof.rows.size(); ++k) {
        prof.rows[k].in_E = fit.at_C.in_E[k];
        if (H[k] > 0.0 || !fit.at_C.in_E[k]) prof.rows[k].Phi = fit.at_C.phi[k];
    }
    if (spec.kappa && spec.p_kappa) {
        std::vector<double> M;
        for (const auto& rec : prof.rows) M.push_back(*rec.M);
        prof.monneau_C = fit_monotone_correction(spec.radii, M, spec.sigma, spec.slack);
    }
    return prof;
}

std::string profile_csv(const FrequencyProfile& p) {
    std::ostringstream os;
    os << "r,H,D,I,N,Ntilde,Phi,W,M,trunc_err\n";
    auto num = [&](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    auto opt = [&](const std::optional<double>& v) {
        if (v) num(*v);
    };
    for (const auto& r : p.rows) {
        num(r.r);
        os << ',';
        num(r.H);
        os << ',';
        num(r.D);
        os << ',';
        num(r.I);
        os << ',';
        opt(r.N);
        os << ',';
        opt(r.Ntilde);
        os << ',';
        opt(r.Phi);
        os << ',';
        opt(r.W);
        os << ',';
        opt(r.M);
        os << ',';
        num(r.trunc_err);
        os << '\n';
    }
    return os.str();
}

ScalarField rescale(const ScalarField& U, double r, RescaleMode mode, const StripRule& rule, double kappa,
                    const HalfGrid* target) {
    check_radius(r);
    auto shared = std::make_shared<ScalarField>(U);
    double scale = 1.0;
    if (mode == RescaleMode::almgren) {
        const FunctionalValues v = functional_suite(grid_field(shared), rule, r);
        if (!(v.H > 0.0)) throw DomainError("rescale: H(U, r) = 0, Almgren rescaling undefined");
        scale = std::sqrt(v.H);
    } else {
        scale = std::pow(r, kappa);
    }
    if (!target) {
        ScalarField out(U.grid().dilated(r), U.weight());
        for (std::size_t k = 0; k < out.values().size(); ++k) out.values()[k] = U.values()[k] / scale;
        if (U.has_exterior()) {
            auto ext = U.exterior();
            const int n = U.grid().n;
            out.set_exterior([ext, r, scale, n](const SpacePoint& X, double t) {
                SpacePoint Y = X;
                for (int i = 0; i < n; ++i) Y.x[i] *= r;
                Y.y *= r;
                return ext(Y, r * r * t) / scale;
            });
        }
        out.set_interpolation(U.interpolation());
        return out;
    }
    ScalarField lin = U;
    lin.set_interpolation(InterpOrder::linear);
    ScalarField out(*target, U.weight());
    out.fill([&](const SpacePoint& X, double t) {
        SpacePoint Y = X;
        for (int i = 0; i < target->n; ++i) Y.x[i] *= r;
        Y.y *= r;
        return lin.value(Y, r * r * t) / scale;
    });
    return out;
}

VariationReport variation_checks(const Field& U, const StripRule& rule, double r, double rel_step) {
    check_radius(r);
    const int n = U.n;
    VariationReport rep;
    rep.r = r;
    const double dr = rel_step * r;
    auto H_at = [&](double rr) { return functional_suite(U, rule, rr); };
    auto diff4 = [dr](double fm2, double fm1, double fp1, double fp2) {
        return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * dr);
    };
    const FunctionalValues v0 = H_at(r);
    const FunctionalValues vm2 = H_at(r - 2 * dr), vm1 = H_at(r - dr), vp1 = H_at(r + dr), vp2 = H_at(r + 2 * dr);
    rep.H_prime_fd = diff4(vm2.H, vm1.H, vp1.H, vp2.H);
    rep.H_prime_formula = 4.0 * v0.I / r;
    rep.D_prime_fd = diff4(vm2.D, vm1.D, vp1.D, vp2.D);
    rep.I_prime_fd = diff4(vm2.I, vm1.I, vp1.I, vp2.I);

    const double zz = strip_integral(U, rule, r, [n](const FieldSample& q, const SpacePoint& X, double t) {
                          const double z = z_of(q, X, t, n);
                          return z * z;
                      }).value;
    const double zf = strip_integral(U, rule, r, [n](const FieldSample& q, const SpacePoint& X, double t) {
                          return -t * z_of(q, X, t, n) * q.f;
                      }).value;
    const double uf = strip_integral(U, rule, r, [](const FieldSample& q, const SpacePoint&, double t) {
                          return -t * q.u * q.f;
                      }).value;
    const double slice_uf =
        slice_integral(U, rule, r, [](const FieldSample& q, const SpacePoint&, double) { return q.u * q.f; });
    // (1/r^3) int_{S_r} = (1/r) times the normalized strip average
    rep.D_prime_formula = (zz + 2.0 * zf) / r;
    rep.I_prime_formula = (zz + 2.0 * zf + 2.0 * uf) / r - 2.0 * r * slice_uf;

    rep.slice = slice_integral(U, rule, r, [](const FieldSample& q, const SpacePoint&, double) { return q.u * q.u; });
    rep.slice_formula = v0.N ? v0.H * (1.0 + *v0.N) : 0.0;
    rep.one_plus_N = v0.N ? 1.0 + *v0.N : 0.0;

    auto rel = [](double a, double b) {
        const double s = std::max(std::abs(a), std::abs(b));
        return s == 0.0 ? 0.0 : std::abs(a - b) / s;
    };
    rep.H_defect = rel(rep.H_prime_fd, rep.H_prime_formula);
    rep.slice_defect = rel(rep.slice, rep.slice_formula);
    rep.D_defect = rel(rep.D_prime_fd, rep.D_prime_formula);
    rep.I_defect = rel(rep.I_prime_fd, rep.I_prime_formula);
    return rep;
}

}  // namespace thinfb
