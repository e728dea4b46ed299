#include "thinfb/special_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "thinfb/errors.hpp"
#include "thinfb/quadrature.hpp"

namespace thinfb {

namespace {

void check_bessel_args(double nu, double z) {
    if (!std::isfinite(nu) || nu <= -1.0)
        throw DomainError("bessel_i: order must be > -1");
    if (!std::isfinite(z) || z < 0.0)
        throw DomainError("bessel_i: argument must be finite and >= 0");
}

// sum_k (z^2/4)^k / (k! Gamma(k + nu + 1)), which equals (z/2)^{-nu} I_nu(z).
double reduced_series(double nu, double z, const BesselPolicy& p) {
    const double q = 0.25 * z * z;
    double term = 1.0 / std::tgamma(nu + 1.0);
    double sum = term;
    for (int k = 1; k <= p.series_terms_max; ++k) {
        term *= q / (static_cast<double>(k) * (k + nu));
        sum += term;
        if (term <= p.abs_tol * sum && static_cast<double>(k) > 0.5 * z) return sum;
    }
    throw NonconvergenceError("bessel_i: power series did not converge within series_terms_max", term / sum);
}

// Large-argument expansion without the exp(z) / sqrt(2 pi z) prefactor.
double asymptotic_sum(double nu, double z, const BesselPolicy& p) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= p.series_terms_max; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (8.0 * k * z);
        if (std::abs(next) >= std::abs(term)) break;  // expansion started to diverge
        term = next;
        sum += term;
        if (std::abs(term) <= p.abs_tol * std::abs(sum)) break;
    }
    return sum;
}

// log of (z/2)^{-nu} I_nu(z), valid for z >= 0.
double log_reduced_bessel(double nu, double z, const BesselPolicy& p) {
    if (z <= p.crossover) return std::log(reduced_series(nu, z, p));
    return z - 0.5 * std::log(2.0 * std::numbers::pi * z) + std::log(asymptotic_sum(nu, z, p)) -
           nu * std::log(0.5 * z);
}

// log of p(y, eta, t) exp(eta^2 / 4t); the dropped Gaussian factor is the
// quadrature weight in the self test.
double log_kernel_without_eta_gaussian(const WeightParam& w, double y, double eta, double t,
                                       const BesselPolicy& p) {
    const double a = w.a();
    const double nu = 0.5 * (a - 1.0);
    const double z = y * eta / (2.0 * t);
    // (2t)^{-(a+1)/2} z^{-nu} I_nu(z) = (2t)^{-(a+1)/2} 2^{-nu} [(z/2)^{-nu} I_nu(z)]
    return -0.5 * (a + 1.0) * std::log(2.0 * t) - nu * std::log(2.0) + log_reduced_bessel(nu, z, p) -
           y * y / (4.0 * t);
}

void check_point(const char* what, double v) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite input");
}

}  // namespace

double bessel_i(double nu, double z, const BesselPolicy& policy) {
    check_bessel_args(nu, z);
    if (z == 0.0) {
        if (nu == 0.0) return 1.0;
        return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (z <= policy.crossover) return std::pow(0.5 * z, nu) * reduced_series(nu, z, policy);
    return std::exp(log_bessel_i(nu, z, policy));
}

double log_bessel_i(double nu, double z, const BesselPolicy& policy) {
    check_bessel_args(nu, z);
    if (z == 0.0) return std::log(bessel_i(nu, z, policy));
    if (z <= policy.crossover) return nu * std::log(0.5 * z) + std::log(reduced_series(nu, z, policy));
    return z - 0.5 * std::log(2.0 * std::numbers::pi * z) + std::log(asymptotic_sum(nu, z, policy));
}

double bessel_normalization(const WeightParam& w) {
    return 1.0 / (std::pow(2.0, w.a()) * std::tgamma(0.5 * (w.a() + 1.0)));
}

double bessel_heat_kernel(const WeightParam& w, double y, double eta, double t, const BesselPolicy& policy) {
    check_point("bessel_heat_kernel", y);
    check_point("bessel_heat_kernel", eta);
    check_point("bessel_heat_kernel", t);
    if (y < 0.0 || eta < 0.0) throw DomainError("bessel_heat_kernel: y and eta must be >= 0");
    if (t <= 0.0) return 0.0;
    const double a = w.a();
    if (y == 0.0 || eta == 0.0) {
        const double r2 = y * y + eta * eta;
        return bessel_normalization(w) * std::pow(t, -0.5 * (a + 1.0)) * std::exp(-r2 / (4.0 * t));
    }
    return std::exp(log_kernel_without_eta_gaussian(w, y, eta, t, policy) - eta * eta / (4.0 * t));
}

double euclidean_heat_kernel(int n, const double* x, const double* xi, double t) {
    if (t <= 0.0) return 0.0;
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) d2 += (x[i] - xi[i]) * (x[i] - xi[i]);
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * n) * std::exp(-d2 / (4.0 * t));
}

double neumann_kernel(const WeightParam& w, int n, const SpacePoint& X, const SpacePoint& Y, double t,
                      const BesselPolicy& policy) {
    if (n < 1 || n > kMaxThinDim) throw DomainError("neumann_kernel: n must be 1 or 2");
    return euclidean_heat_kernel(n, X.x.data(), Y.x.data(), t) * bessel_heat_kernel(w, X.y, Y.y, t, policy);
}

double neumann_fundamental(const WeightParam& w, int n, const SpacePoint& X, double t, bool backward) {
    if (n < 1 || n > kMaxThinDim) throw DomainError("neumann_fundamental: n must be 1 or 2");
    if (!std::isfinite(t)) throw DomainError("neumann_fundamental: non-finite time");
    if (backward ? !(t < 0.0) : !(t > 0.0))
        throw DomainError(backward ? "backward kernel requires t < 0" : "forward kernel requires t > 0");
    if (X.y < 0.0) throw DomainError("neumann_fundamental: y must be >= 0");
    const double tt = std::abs(t);
    const double r2 = norm_sq(X, n);
    return std::pow(4.0 * std::numbers::pi, -0.5 * n) * bessel_normalization(w) *
           std::pow(tt, -0.5 * (n + w.a() + 1.0)) * std::exp(-r2 / (4.0 * tt));
}

bool KernelSelftestReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const KernelCheck& c) { return c.passed; });
}

namespace {

// Runs quad(nodes) with doubling node counts until two successive values agree to tol / 10.
template <class Quad>
KernelCheck doubling_check(const std::string& name, double exact, double tol, const KernelSelftestOptions& opt,
                           Quad quad) {
    KernelCheck c;
    c.name = name;
    c.tol = tol;
    int nodes = std::min(opt.start_nodes, opt.max_nodes);
    double prev = quad(nodes);
    c.nodes_used = nodes;
    double value = prev;
    while (nodes * 2 <= opt.max_nodes) {
        nodes *= 2;
        value = quad(nodes);
        c.nodes_used = nodes;
        const double est = std::abs(value - prev);
        prev = value;
        if (est < 0.1 * tol) {
            c.converged = true;
            break;
        }
    }
    c.defect = std::abs(value - exact);
    c.passed = c.converged && std::isfinite(value) && c.defect < tol;
    c.detail = "value=" + std::to_string(value) + " nodes=" + std::to_string(c.nodes_used) +
               (c.converged ? "" : " (node doubling did not stabilize)");
    return c;
}

}  // namespace

KernelSelftestReport kernel_selftest(const WeightParam& w, int n, double tol, const KernelSelftestOptions& opt) {
    if (n < 1 || n > kMaxThinDim) throw DomainError("kernel_selftest: n must be 1 or 2");
    if (!(tol > 0.0)) throw DomainError("kernel_selftest: tolerance must be positive");
    const double a = w.a();
    const BesselPolicy& bp = opt.bessel;
    KernelSelftestReport rep;

    // Mass: int_0^inf p(y, eta, t) eta^a d eta = 1, with eta = 2 sqrt(t) v.
    rep.checks.push_back(doubling_check("mass", 1.0, tol, opt, [&](int nodes) {
        const GaussRule g = half_line_rule(nodes, a);
        const double y = opt.mass_y, t = opt.mass_t;
        const double scale = std::pow(2.0 * std::sqrt(t), a + 1.0);
        std::vector<double> terms(g.nodes.size());
        for (std::size_t k = 0; k < g.nodes.size(); ++k) {
            const double eta = 2.0 * std::sqrt(t) * g.nodes[k];
            terms[k] = g.weights[k] * scale * std::exp(log_kernel_without_eta_gaussian(w, y, eta, t, bp));
        }
        return pairwise_sum(terms.data(), terms.size());
    }));

    // Semigroup: int p(y, z, s) p(z, eta, t) z^a dz = p(y, eta, s + t).
    {
        const double y = opt.ck_y, eta = opt.ck_eta, s = opt.ck_s, t = opt.ck_t;
        const double exact = bessel_heat_kernel(w, y, eta, s + t, bp);
        const double tau = s * t / (s + t);
        KernelCheck c = doubling_check("chapman_kolmogorov", exact, tol, opt, [&](int nodes) {
            const GaussRule g = half_line_rule(nodes, a);
            const double scale = std::pow(2.0 * std::sqrt(tau), a + 1.0);
            std::vector<double> terms(g.nodes.size());
            for (std::size_t k = 0; k < g.nodes.size(); ++k) {
                const double z = 2.0 * std::sqrt(tau) * g.nodes[k];
                terms[k] = g.weights[k] * scale *
                           std::exp(log_kernel_without_eta_gaussian(w, y, z, s, bp) +
                                    log_kernel_without_eta_gaussian(w, eta, z, t, bp));
            }
            return pairwise_sum(terms.data(), terms.size());
        });
        c.defect /= std::max(1.0, std::abs(exact));
        c.passed = c.converged && c.defect < tol;
        rep.checks.push_back(c);
    }

    // Backward strip mass: (1/r^2) int_{-r^2}^0 int G(X, t) y^a dX dt = 1, with
    // the kernel evaluated in physical coordinates.
    rep.checks.push_back(doubling_check("strip_mass", 1.0, tol, opt, [&](int nodes) {
        QuadratureOrders q;
        q.hermite = std::max(2, nodes / 2);
        q.laguerre = std::max(2, nodes / 2);
        q.time_panels = 2;
        q.time_nodes = 4;
        const GaussRule gh = gauss_hermite(q.hermite);
        const GaussRule gv = half_line_rule(q.laguerre, a);
        const GaussRule gl = gauss_legendre(q.time_nodes);
        const double r = opt.strip_r;
        std::vector<double> time_terms;
        for (int p = 0; p < q.time_panels; ++p) {
            for (int m = 0; m < q.time_nodes; ++m) {
                const double sp = (p + 0.5 * (gl.nodes[m] + 1.0)) / q.time_panels;
                const double wt = 0.5 * gl.weights[m] / q.time_panels * 2.0 * sp;  // d tau = 2 s ds
                const double t = -r * r * sp * sp;
                const double c = 2.0 * std::sqrt(-t);
                std::vector<double> space_terms;
                const int nx = n == 1 ? 1 : q.hermite;
                for (int i1 = 0; i1 < q.hermite; ++i1)
                    for (int i2 = 0; i2 < nx; ++i2)
                        for (int k = 0; k < q.laguerre; ++k) {
                            SpacePoint X;
                            X.x[0] = c * gh.nodes[i1];
                            double wx = gh.weights[i1] * std::exp(gh.nodes[i1] * gh.nodes[i1]) * c;
                            if (n == 2) {
                                X.x[1] = c * gh.nodes[i2];
                                wx *= gh.weights[i2] * std::exp(gh.nodes[i2] * gh.nodes[i2]) * c;
                            }
                            const double v = gv.nodes[k];
                            X.y = c * v;
                            const double wy = gv.weights[k] * std::exp(v * v) * std::pow(c, a + 1.0);
                            space_terms.push_back(wx * wy * neumann_fundamental(w, n, X, t, true));
                        }
                time_terms.push_back(wt * pairwise_sum(space_terms.data(), space_terms.size()));
            }
        }
        return pairwise_sum(time_terms.data(), time_terms.size());
    }));
    return rep;
}

}  // namespace thinfb
