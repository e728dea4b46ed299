#include "thinfb/obstacle.hpp"

#include <algorithm>
#include <cmath>

#include "thinfb/errors.hpp"

namespace thinfb {

namespace {

using Thin = std::array<double, kMaxThinDim>;

// Quintic smoothstep and its first two derivatives, clamped to [0, 1].
struct Step {
    double s, ds, dds;
};

Step smoothstep(double u, int order) {
    if (u <= 0.0) return {0.0, 0.0, 0.0};
    if (u >= 1.0) return {1.0, 0.0, 0.0};
    if (order == 0) return {u, 1.0, 0.0};
    const double u2 = u * u, u3 = u2 * u;
    return {u3 * (10.0 - 15.0 * u + 6.0 * u2), 30.0 * u2 * (1.0 - u) * (1.0 - u), 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)};
}

double required(const ObstacleSpec& p, std::array<int, kMaxThinDim> alpha, int j, const Thin& x, double t) {
    const auto v = p.derivative(alpha, j, x, t);
    if (!v) throw DomainError("obstacle '" + p.name + "': missing derivative");
    return *v;
}

double laplacian(const ObstacleSpec& p, const Thin& x, double t) {
    double s = required(p, {2, 0}, 0, x, t);
    if (p.n == 2) s += required(p, {0, 2}, 0, x, t);
    return s;
}

SpacePoint local_point(const SpacePoint& X, const Thin& x0) {
    SpacePoint Y = X;
    Y.x[0] -= x0[0];
    Y.x[1] -= x0[1];
    return Y;
}

}  // namespace

int taylor_degree(double ell) {
    if (!(ell >= 2.0) || !std::isfinite(ell)) throw DomainError("regularity ell must be >= 2");
    const double f = std::floor(ell);
    return f == ell ? static_cast<int>(f) - 1 : static_cast<int>(f);
}

void ObstacleSpec::validate() const {
    if (n < 1 || n > kMaxThinDim) throw DomainError("obstacle: n must be 1 or 2");
    if (k < 2) throw DomainError("obstacle: Taylor degree k must be >= 2");
    if (!psi || !derivative) throw DomainError("obstacle '" + name + "': sampler or derivatives missing");
}

ObstacleSpec polynomial_obstacle(const FloatPolynomial& q, double ell, const std::string& name) {
    if (q.has_y()) throw DomainError("obstacle polynomial must not depend on y");
    ObstacleSpec o;
    o.name = name;
    o.n = q.n();
    o.ell = ell;
    o.k = taylor_degree(ell);
    auto poly = std::make_shared<FloatPolynomial>(q);
    o.psi = [poly](const Thin& x, double t) {
        SpacePoint X;
        X.x = x;
        return poly->evaluate(X, t);
    };
    o.derivative = [poly](std::array<int, kMaxThinDim> alpha, int j, const Thin& x, double t) -> std::optional<double> {
        FloatPolynomial d = *poly;
        for (int i = 0; i < alpha[0]; ++i) d = d.derivative(Var::x1);
        if (alpha[1] > 0 && d.n() < 2) return 0.0;
        for (int i = 0; i < alpha[1]; ++i) d = d.derivative(Var::x2);
        for (int i = 0; i < j; ++i) d = d.derivative(Var::t);
        SpacePoint X;
        X.x = x;
        return d.evaluate(X, t);
    };
    return o;
}

std::vector<std::string> obstacle_names() { return {"zero", "quadratic", "sine", "custom"}; }

ObstacleSpec make_obstacle(const std::string& name, int n, double ell, const std::string& custom) {
    if (n < 1 || n > kMaxThinDim) throw DomainError("obstacle: n must be 1 or 2");
    ObstacleSpec o;
    if (name == "zero") {
        o = polynomial_obstacle(FloatPolynomial(n), ell, name);
    } else if (name == "quadratic") {
        Exponents x2, t1;
        x2.x[0] = 2;
        t1.t = 1;
        o = polynomial_obstacle(FloatPolynomial::monomial(n, x2) + FloatPolynomial::monomial(n, t1), ell, name);
    } else if (name == "sine") {
        o.name = name;
        o.n = n;
        o.ell = ell;
        o.k = taylor_degree(ell);
        o.psi = [](const Thin& x, double) { return std::sin(x[0]); };
        o.derivative = [](std::array<int, kMaxThinDim> a, int j, const Thin& x, double) -> std::optional<double> {
            if (j > 0 || a[1] > 0) return 0.0;
            switch (a[0] % 4) {
                case 0: return std::sin(x[0]);
                case 1: return std::cos(x[0]);
                case 2: return -std::sin(x[0]);
                default: return -std::cos(x[0]);
            }
        };
    } else if (name == "custom") {
        if (custom.empty()) throw ConfigError("custom obstacle needs a coefficient list");
        o = polynomial_obstacle(parse_polynomial<double>(custom, n, ';'), ell, name);
    } else {
        throw ConfigError("unknown obstacle '" + name + "'");
    }
    o.validate();
    return o;
}

double obstacle_source(const ObstacleSpec& psi, const Thin& x, double t) {
    return -(required(psi, {0, 0}, 1, x, t) - laplacian(psi, x, t));
}

Subtracted subtract_obstacle(const ScalarField& U, const ObstacleSpec& psi) {
    psi.validate();
    const HalfGrid& g = U.grid();
    if (g.n != psi.n) throw DomainError("subtract_obstacle: dimensions differ");
    Subtracted out;
    out.W = std::make_shared<ScalarField>(U);
    out.F = std::make_shared<ScalarField>(g, U.weight());
    for (int m = 0; m < g.nt; ++m)
        for (int i1 = 0; i1 < g.nx; ++i1)
            for (int i2 = 0; i2 < g.nx2(); ++i2) {
                const Thin x{g.x(i1), g.n == 2 ? g.x(i2) : 0.0};
                const double p = psi.psi(x, g.t(m));
                const double f = obstacle_source(psi, x, g.t(m));
                for (int j = 0; j < g.ny; ++j) {
                    out.W->at(m, i1, i2, j) -= p;
                    out.F->at(m, i1, i2, j) = f;
                }
            }
    if (U.has_exterior()) {
        auto ext = U.exterior();
        auto ps = psi.psi;
        out.W->set_exterior([ext, ps](const SpacePoint& X, double t) { return ext(X, t) - ps(X.x, t); });
    }
    ObstacleSpec copy = psi;
    out.source = [copy](const SpacePoint& X, double t) { return obstacle_source(copy, X.x, t); };
    return out;
}

void CutoffSpec::validate() const {
    if (!(inner >= 0.0 && inner < outer)) throw DomainError("cutoff: need 0 <= inner < outer");
    if (order != 0 && order != 2) throw DomainError("cutoff: order must be 0 (linear) or 2 (quintic)");
    // zeta_y / y must stay bounded as y -> 0
    double prev = 0.0;
    for (double y : {1e-2, 1e-4, 1e-6, 1e-8}) {
        SpacePoint X;
        X.y = y;
        const double q = std::abs(evaluate_cutoff(*this, X, 1, 0.0).grad.y) / y;
        if (q > 10.0 * std::max(1.0, prev)) throw DomainError("cutoff: zeta_y is not O(y) at the thin space");
        prev = std::max(prev, q);
    }
}

CutoffValue evaluate_cutoff(const CutoffSpec& c, const SpacePoint& X, int n, double a, const Thin& x0) {
    CutoffValue v;
    const double w = c.outer - c.inner;
    double rho = 0.0;
    for (int i = 0; i < n; ++i) rho += (X.x[i] - x0[i]) * (X.x[i] - x0[i]);
    rho = std::sqrt(rho);
    const Step sx = smoothstep((rho - c.inner) / w, c.order);
    const double z1 = 1.0 - sx.s, z1p = -sx.ds / w, z1pp = -sx.dds / (w * w);

    const double y = std::abs(X.y), sgn = X.y < 0 ? -1.0 : 1.0;
    double z2, z2p, Bz2;
    if (c.in_y_squared) {
        const double wy = c.outer * c.outer - c.inner * c.inner;
        const Step sy = smoothstep((y * y - c.inner * c.inner) / wy, c.order);
        const double gp = -sy.ds / wy, gpp = -sy.dds / (wy * wy);
        z2 = 1.0 - sy.s;
        z2p = 2.0 * y * gp;
        // z2'' + (a/y) z2' with z2 = g(y^2)
        Bz2 = (2.0 + 2.0 * a) * gp + 4.0 * y * y * gpp;
    } else {
        const Step sy = smoothstep((y - c.inner) / w, c.order);
        z2 = 1.0 - sy.s;
        z2p = -sy.ds / w;
        const double z2pp = -sy.dds / (w * w);
        Bz2 = z2pp + (y > 0.0 ? a / y * z2p : 0.0);
    }
    v.zeta = z1 * z2;
    for (int i = 0; i < n; ++i) v.grad.x[i] = rho > 0.0 ? z1p * (X.x[i] - x0[i]) / rho * z2 : 0.0;
    v.grad.y = sgn * z1 * z2p;
    // radial Laplacian; zeta1 is constant near rho = 0
    const double lap1 = z1pp + (rho > 0.0 ? (n - 1) / rho * z1p : 0.0);
    v.La = lap1 * z2 + z1 * Bz2;
    return v;
}

Reduction globalize(const Field& U, std::shared_ptr<const ScalarField> U_grid, const ObstacleSpec& psi,
                    const WeightParam& w, const CutoffSpec& cutoff, const Thin& x0, double t0) {
    psi.validate();
    cutoff.validate();
    if (U.n != psi.n) throw DomainError("globalize: dimensions differ");
    const int n = U.n;
    Reduction R;
    R.k = psi.k;
    R.ell = psi.ell;
    R.x0 = x0;
    R.t0 = t0;
    R.q = taylor_polynomial(psi.derivative, n, x0, t0, psi.k);
    R.q_ext = caloric_extension(R.q, w);

    struct Data {
        FloatPolynomial qe, qe_x1, qe_x2, qe_y, qe_t, q_t, q_lap;
    };
    auto d = std::make_shared<Data>();
    d->qe = R.q_ext;
    d->qe_x1 = R.q_ext.derivative(Var::x1);
    d->qe_x2 = n == 2 ? R.q_ext.derivative(Var::x2) : FloatPolynomial(n);
    d->qe_y = R.q_ext.derivative(Var::y);
    d->qe_t = R.q_ext.derivative(Var::t);
    d->q_t = R.q.derivative(Var::t);
    d->q_lap = R.q.derivative(Var::x1).derivative(Var::x1);
    if (n == 2) d->q_lap += R.q.derivative(Var::x2).derivative(Var::x2);

    const double a = w.a();
    auto sampler = U.sample;
    const bool has_f = U.has_source;
    auto sample = [d, sampler, has_f, psi, cutoff, n, a, x0, t0](const SpacePoint& X, double t) {
        const FieldSample s = sampler(X, t);
        const SpacePoint L = local_point(X, x0);
        const double tl = t - t0;
        SpacePoint Lt = L;
        Lt.y = 0.0;
        const Thin x = X.x;
        // psi_k = psi - q on the thin space, extended constantly in y
        const double pk = psi.psi(x, t) - d->qe.evaluate(Lt, tl);
        const double pk_t = required(psi, {0, 0}, 1, x, t) - d->q_t.evaluate(Lt, tl);
        const double pk_lap = laplacian(psi, x, t) - d->q_lap.evaluate(Lt, tl);
        std::array<double, kMaxThinDim> pk_grad{};
        pk_grad[0] = required(psi, {1, 0}, 0, x, t) - d->qe_x1.evaluate(Lt, tl);
        if (n == 2) pk_grad[1] = required(psi, {0, 1}, 0, x, t) - d->qe_x2.evaluate(Lt, tl);

        const double W = s.u - d->qe.evaluate(L, tl) - pk;
        SpaceVector gW;
        gW.x[0] = s.grad.x[0] - d->qe_x1.evaluate(L, tl) - pk_grad[0];
        if (n == 2) gW.x[1] = s.grad.x[1] - d->qe_x2.evaluate(L, tl) - pk_grad[1];
        gW.y = s.grad.y - d->qe_y.evaluate(L, tl);
        const double Wt = s.ut - d->qe_t.evaluate(L, tl) - pk_t;

        const CutoffValue z = evaluate_cutoff(cutoff, X, n, a, x0);
        FieldSample v;
        v.u = z.zeta * W;
        for (int i = 0; i < n; ++i) v.grad.x[i] = z.zeta * gW.x[i] + W * z.grad.x[i];
        v.grad.y = z.zeta * gW.y + W * z.grad.y;
        v.ut = z.zeta * Wt;
        double cross = gW.y * z.grad.y;
        for (int i = 0; i < n; ++i) cross += gW.x[i] * z.grad.x[i];
        v.f = z.zeta * (pk_lap - pk_t + (has_f ? s.f : 0.0)) - W * z.La - 2.0 * cross;
        return v;
    };
    R.V.n = n;
    R.V.sample = sample;
    R.V.has_source = true;
    R.V.label = "V_k(" + psi.name + ")";
    // V_k vanishes outside the cutoff support, so the strip needs no tail bound
    R.F = [sample](const SpacePoint& X, double t) { return sample(X, t).f; };

    if (U_grid) {
        const HalfGrid& g = U_grid->grid();
        R.V_grid = std::make_shared<ScalarField>(g, w);
        R.F_grid = std::make_shared<ScalarField>(g, w);
        for (int m = 0; m < g.nt; ++m)
            for (int i1 = 0; i1 < g.nx; ++i1)
                for (int i2 = 0; i2 < g.nx2(); ++i2)
                    for (int j = 0; j < g.ny; ++j) {
                        SpacePoint X;
                        X.x[0] = g.x(i1);
                        if (n == 2) X.x[1] = g.x(i2);
                        X.y = g.y(j);
                        const double t = g.t(m);
                        const SpacePoint L = local_point(X, x0);
                        SpacePoint Lt = L;
                        Lt.y = 0.0;
                        const double pk = psi.psi(X.x, t) - d->qe.evaluate(Lt, t - t0);
                        const double W = U_grid->at(m, i1, i2, j) - d->qe.evaluate(L, t - t0) - pk;
                        const CutoffValue z = evaluate_cutoff(cutoff, X, n, a, x0);
                        R.V_grid->at(m, i1, i2, j) = z.zeta * W;
                        R.F_grid->at(m, i1, i2, j) = sample(X, t).f;
                    }
        R.V_grid->set_interpolation(U_grid->interpolation());
        // outside the grid V_k is zero except in time; keep the sampler for off-node evaluation
        R.V_grid->set_exterior([sample](const SpacePoint& X, double t) { return sample(X, t).u; });
    }
    return R;
}

GrowthConstants growth_bounds_check(const SpaceTimeFunction& F, const HalfGrid& g, double ell,
                                    const GrowthRegion& region) {
    GrowthConstants c;
    const int n = g.n;
    const double hx = g.hx(), hy = g.hy(), ht = g.ht();
    const double h = std::max(hx, hy);
    const double rmin = region.exclude_cells * h;
    if (ell >= 3.0) c.M1 = 0.0;
    if (ell >= 4.0) c.M2 = 0.0;
    for (int m = 0; m < g.nt; ++m) {
        const double t = g.t(m);
        if (t <= -region.radius * region.radius) continue;
        for (int i1 = 0; i1 < g.nx; ++i1)
            for (int i2 = 0; i2 < g.nx2(); ++i2)
                for (int j = 0; j < g.ny; ++j) {
                    SpacePoint X;
                    X.x[0] = g.x(i1);
                    if (n == 2) X.x[1] = g.x(i2);
                    X.y = g.y(j);
                    double xr = 0.0;
                    for (int i = 0; i < n; ++i) xr = std::max(xr, std::abs(X.x[i]));
                    if (xr >= region.radius || X.y >= region.radius) continue;
                    const double rho = std::sqrt(norm_sq(X, n) + std::abs(t));
                    if (rho < rmin) continue;
                    ++c.samples;
                    const double f0 = F(X, t);
                    c.M0 = std::max(c.M0, std::abs(f0) / std::pow(rho, ell - 2.0));
                    if (c.M1) {
                        double g2 = 0.0;
                        for (int i = 0; i < n; ++i) {
                            SpacePoint P = X, M = X;
                            P.x[i] += hx;
                            M.x[i] -= hx;
                            const double d = (F(P, t) - F(M, t)) / (2.0 * hx);
                            g2 += d * d;
                        }
                        SpacePoint P = X, M = X;
                        P.y += hy;
                        M.y -= hy;  // F is even in y
                        const double dy = (F(P, t) - F(M, t)) / (2.0 * hy);
                        g2 += dy * dy;
                        c.M1 = std::max(*c.M1, std::sqrt(g2) / std::pow(rho, ell - 3.0));
                    }
                    if (c.M2) {
                        // backward differences keep t <= 0
                        const double dt = (3.0 * f0 - 4.0 * F(X, t - ht) + F(X, t - 2.0 * ht)) / (2.0 * ht);
                        c.M2 = std::max(*c.M2, std::abs(dt) / std::pow(rho, ell - 4.0));
                    }
                }
    }
    return c;
}

}  // namespace thinfb
