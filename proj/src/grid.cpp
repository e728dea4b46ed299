#include "thinfb/grid.hpp"

#include <algorithm>
#include <cmath>

#include "thinfb/polynomial.hpp"

namespace thinfb {

void HalfGrid::validate() const {
    if (n < 1 || n > kMaxThinDim) throw DomainError("grid: n must be 1 or 2");
    if (nx < 4 || ny < 4 || nt < 2) throw DomainError("grid: need nx, ny >= 4 and nt >= 2");
    if (!(Rx > 0.0) || !(Ry > 0.0) || !(T > 0.0) || !std::isfinite(Rx) || !std::isfinite(Ry) || !std::isfinite(T))
        throw DomainError("grid: extents must be positive and finite");
}

HalfGrid HalfGrid::dilated(double r) const {
    HalfGrid g = *this;
    g.Rx /= r;
    g.Ry /= r;
    g.T /= r * r;
    return g;
}

ScalarField::ScalarField(HalfGrid grid, WeightParam w) : grid_(grid), w_(w) {
    grid_.validate();
    values_.assign(grid_.size(), 0.0);
}

bool ScalarField::contains(const SpacePoint& X, double t) const {
    const double eps = 1e-12;
    for (int i = 0; i < grid_.n; ++i)
        if (std::abs(X.x[i]) > grid_.Rx * (1.0 + eps)) return false;
    return X.y >= 0.0 && X.y <= grid_.Ry * (1.0 + eps) && t >= -grid_.T * (1.0 + eps) && t <= grid_.T * eps;
}

void ScalarField::fill(const SpaceTimeFunction& f) {
    const HalfGrid& g = grid_;
    for (int m = 0; m < g.nt; ++m)
        for (int i1 = 0; i1 < g.nx; ++i1)
            for (int i2 = 0; i2 < g.nx2(); ++i2)
                for (int j = 0; j < g.ny; ++j) {
                    SpacePoint X;
                    X.x[0] = g.x(i1);
                    if (g.n == 2) X.x[1] = g.x(i2);
                    X.y = g.y(j);
                    at(m, i1, i2, j) = f(X, g.t(m));
                }
}

namespace {

// Interpolation stencil along one axis: node indices and basis weights
// (value and derivative). Index -k maps to +k when reflect is set.
struct AxisStencil {
    int count = 0;
    std::array<int, 4> idx{};
    std::array<double, 4> w{};
    std::array<double, 4> dw{};
};

AxisStencil axis_stencil(double z, double z0, double h, int nodes, bool reflect, InterpOrder order) {
    AxisStencil s;
    const double u = (z - z0) / h;
    const int width = order == InterpOrder::cubic ? 4 : 2;
    s.count = width;
    int base = static_cast<int>(std::floor(u)) - (width == 4 ? 1 : 0);
    const int lo = reflect && width == 4 ? -1 : 0;
    base = std::clamp(base, lo, nodes - width);
    for (int k = 0; k < width; ++k) {
        const int node = base + k;
        s.idx[k] = reflect ? std::abs(node) : node;
        double w = 1.0, dw = 0.0;
        for (int l = 0; l < width; ++l) {
            if (l == k) continue;
            const double denom = static_cast<double>(k - l);
            const double factor = (u - (base + l)) / denom;
            // product rule for the derivative of the Lagrange basis
            double prod = 1.0 / denom;
            for (int m = 0; m < width; ++m) {
                if (m == k || m == l) continue;
                prod *= (u - (base + m)) / static_cast<double>(k - m);
            }
            dw += prod;
            w *= factor;
        }
        s.w[k] = w;
        s.dw[k] = dw / h;
    }
    return s;
}

}  // namespace

ScalarField::Sample ScalarField::sample(const SpacePoint& X, double t, bool want_derivatives) const {
    Sample out;
    if (!contains(X, t)) {
        if (!exterior_) return out;
        out.u = exterior_(X, t);
        if (want_derivatives) {
            // Centered differences of the exterior function.
            const double e = 1e-6;
            for (int i = 0; i < grid_.n; ++i) {
                SpacePoint p = X, q = X;
                p.x[i] += e;
                q.x[i] -= e;
                out.grad.x[i] = (exterior_(p, t) - exterior_(q, t)) / (2 * e);
            }
            SpacePoint p = X, q = X;
            p.y += e;
            q.y = std::max(0.0, q.y - e);
            out.grad.y = (exterior_(p, t) - exterior_(q, t)) / (p.y - q.y);
            out.ut = (exterior_(X, t + e) - exterior_(X, t - e)) / (2 * e);
        }
        return out;
    }
    const HalfGrid& g = grid_;
    const AxisStencil sx1 = axis_stencil(X.x[0], -g.Rx, g.hx(), g.nx, false, interp_);
    AxisStencil sx2;
    if (g.n == 2) {
        sx2 = axis_stencil(X.x[1], -g.Rx, g.hx(), g.nx, false, interp_);
    } else {
        sx2.count = 1;
        sx2.idx[0] = 0;
        sx2.w[0] = 1.0;
        sx2.dw[0] = 0.0;
    }
    const AxisStencil sy = axis_stencil(X.y, 0.0, g.hy(), g.ny, true, interp_);
    const AxisStencil st = axis_stencil(t, -g.T, g.ht(), g.nt, false, g.nt >= 4 ? interp_ : InterpOrder::linear);

    for (int a = 0; a < st.count; ++a) {
        const int m = st.idx[a];
        for (int b = 0; b < sx1.count; ++b) {
            const int i1 = sx1.idx[b];
            for (int c = 0; c < sx2.count; ++c) {
                const int i2 = sx2.idx[c];
                const double* line = values_.data() + g.index(m, i1, i2, 0);
                double v = 0.0, vy = 0.0;
                for (int d = 0; d < sy.count; ++d) {
                    v += sy.w[d] * line[sy.idx[d]];
                    vy += sy.dw[d] * line[sy.idx[d]];
                }
                const double wx = sx1.w[b] * sx2.w[c];
                out.u += st.w[a] * wx * v;
                if (want_derivatives) {
                    out.grad.x[0] += st.w[a] * sx1.dw[b] * sx2.w[c] * v;
                    if (g.n == 2) out.grad.x[1] += st.w[a] * sx1.w[b] * sx2.dw[c] * v;
                    out.grad.y += st.w[a] * wx * vy;
                    out.ut += st.dw[a] * wx * v;
                }
            }
        }
    }
    return out;
}

ThinField make_thin_field(const HalfGrid& g, const ThinFunction& f) {
    ThinField th{g, std::vector<double>(g.thin_slice_size() * g.nt)};
    for (int m = 0; m < g.nt; ++m)
        for (int i1 = 0; i1 < g.nx; ++i1)
            for (int i2 = 0; i2 < g.nx2(); ++i2) {
                std::array<double, kMaxThinDim> x{g.x(i1), g.n == 2 ? g.x(i2) : 0.0};
                th.at(m, i1, i2) = f(x, g.t(m));
            }
    return th;
}

Field polynomial_field(const FloatPolynomial& p, const FloatPolynomial* source) {
    struct Parts {
        FloatPolynomial p, px1, px2, py, pt, f;
        bool has_f;
    };
    auto parts = std::make_shared<Parts>(Parts{p, p.derivative(Var::x1),
                                               p.n() == 2 ? p.derivative(Var::x2) : FloatPolynomial(p.n()),
                                               p.derivative(Var::y), p.derivative(Var::t),
                                               source ? *source : FloatPolynomial(p.n()), source != nullptr});
    Field f;
    f.n = p.n();
    f.has_source = source != nullptr;
    f.label = "polynomial";
    f.sample = [parts](const SpacePoint& X, double t) {
        FieldSample s;
        s.u = parts->p.evaluate(X, t);
        s.grad.x[0] = parts->px1.evaluate(X, t);
        s.grad.x[1] = parts->px2.evaluate(X, t);
        s.grad.y = parts->py.evaluate(X, t);
        s.ut = parts->pt.evaluate(X, t);
        if (parts->has_f) s.f = parts->f.evaluate(X, t);
        return s;
    };
    return f;
}

Field grid_field(std::shared_ptr<const ScalarField> U, std::shared_ptr<const ScalarField> F,
                 SpaceTimeFunction analytic_source) {
    Field f;
    f.n = U->grid().n;
    f.has_source = F != nullptr || static_cast<bool>(analytic_source);
    f.label = "grid";
    const HalfGrid& g = U->grid();
    f.extent = FieldExtent{g.Rx, g.Ry, g.T, !U->has_exterior()};
    f.sample = [U, F, analytic_source](const SpacePoint& X, double t) {
        const auto s = U->sample(X, t, true);
        FieldSample out;
        out.u = s.u;
        out.grad = s.grad;
        out.ut = s.ut;
        if (F) out.f = F->value(X, t);
        else if (analytic_source) out.f = analytic_source(X, t);
        return out;
    };
    return f;
}

Field translated(const Field& U, const std::array<double, kMaxThinDim>& x0, double t0) {
    Field f = U;
    f.label = U.label + "+translated";
    if (f.extent) {
        double reach = f.extent->Rx;
        for (int i = 0; i < U.n; ++i) reach = std::min(reach, f.extent->Rx - std::abs(x0[i]));
        f.extent->Rx = reach;
        f.extent->T = f.extent->T + t0;
    }
    auto inner = U.sample;
    const int n = U.n;
    f.sample = [inner, x0, t0, n](const SpacePoint& X, double t) {
        SpacePoint Y = X;
        for (int i = 0; i < n; ++i) Y.x[i] += x0[i];
        return inner(Y, t + t0);
    };
    return f;
}

Field dilated(const Field& U, double r, double scale) {
    Field f = U;
    f.label = U.label + "+dilated";
    if (f.extent) {
        f.extent->Rx /= r;
        f.extent->Ry /= r;
        f.extent->T /= r * r;
    }
    auto inner = U.sample;
    const int n = U.n;
    f.sample = [inner, r, scale, n](const SpacePoint& X, double t) {
        SpacePoint Y = X;
        for (int i = 0; i < n; ++i) Y.x[i] *= r;
        Y.y *= r;
        FieldSample s = inner(Y, r * r * t);
        s.u /= scale;
        for (int i = 0; i < n; ++i) s.grad.x[i] *= r / scale;
        s.grad.y *= r / scale;
        s.ut *= r * r / scale;
        s.f *= r * r / scale;
        return s;
    };
    return f;
}

Field difference(const Field& U, const Field& V) {
    if (U.n != V.n) throw DomainError("difference: mismatched dimensions");
    Field f = U;
    f.label = U.label + "-" + V.label;
    f.has_source = U.has_source || V.has_source;
    auto a = U.sample;
    auto b = V.sample;
    f.sample = [a, b](const SpacePoint& X, double t) {
        FieldSample s = a(X, t);
        const FieldSample q = b(X, t);
        s.u -= q.u;
        for (int i = 0; i < kMaxThinDim; ++i) s.grad.x[i] -= q.grad.x[i];
        s.grad.y -= q.grad.y;
        s.ut -= q.ut;
        s.f -= q.f;
        return s;
    };
    return f;
}

}  // namespace thinfb
