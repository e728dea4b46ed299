#include "thinfb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thinfb/simd/kernels.hpp"

namespace thinfb {

StencilOperator::StencilOperator(const HalfGrid& g, const WeightParam& w) : g_(g) {
    g_.validate();
    const double a = w.a();
    const double h = g_.hy();
    mass_.resize(g_.ny);
    face_.resize(g_.ny);
    auto prim = [a](double y) { return std::pow(y, 1.0 + a) / (1.0 + a); };
    for (int j = 0; j < g_.ny; ++j) {
        const double lo = j == 0 ? 0.0 : (j - 0.5) * h;
        mass_[j] = prim((j + 0.5) * h) - prim(lo);
        face_[j] = std::pow((j + 0.5) * h, a);
    }
}

std::vector<double> StencilOperator::apply(const double* slice) const {
    const HalfGrid& g = g_;
    std::vector<double> out(g.slice_size(), 0.0);
    const double hx2 = g.hx() * g.hx();
    const double hy = g.hy();
    const int lo2 = g.n == 2 ? 1 : 0, hi2 = g.n == 2 ? g.nx - 1 : 1;
    for (int i1 = 1; i1 < g.nx - 1; ++i1)
        for (int i2 = lo2; i2 < hi2; ++i2) {
            const double* u = slice + g.line_offset(i1, i2);
            const double* l1 = slice + g.line_offset(i1 - 1, i2);
            const double* r1 = slice + g.line_offset(i1 + 1, i2);
            double* o = out.data() + g.line_offset(i1, i2);
            for (int j = 0; j < g.ny - 1; ++j) {
                double flux = face_[j] * (u[j + 1] - u[j]) / hy;
                if (j > 0) flux -= face_[j - 1] * (u[j] - u[j - 1]) / hy;
                double lap = (l1[j] - 2.0 * u[j] + r1[j]) / hx2;
                if (g.n == 2) {
                    const double* l2 = slice + g.line_offset(i1, i2 - 1);
                    const double* r2 = slice + g.line_offset(i1, i2 + 1);
                    lap += (l2[j] - 2.0 * u[j] + r2[j]) / hx2;
                }
                o[j] = flux / mass_[j] + lap;
            }
        }
    return out;
}

double StencilOperator::inner(const double* u, const double* v) const {
    const HalfGrid& g = g_;
    std::vector<double> w(g.slice_size());
    const double vol = std::pow(g.hx(), g.n);
    for (std::size_t l = 0; l < g.line_count(); ++l)
        for (int j = 0; j < g.ny; ++j) w[l * g.ny + j] = mass_[j] * vol * u[l * g.ny + j];
    return simd::active_kernels().weighted_sum(w.data(), v, w.size());
}

ImplicitStepper::ImplicitStepper(const HalfGrid& g, const WeightParam& w, const SolverConfig& cfg)
    : g_(g), cfg_(cfg), op_(g, w) {
    if (!(cfg.psor_tol > 0.0)) throw DomainError("solver: psor_tol must be positive");
    if (cfg.max_iters < 1) throw DomainError("solver: max_iters must be >= 1");
    if (cfg.omega != 0.0 && !(cfg.omega > 0.0 && cfg.omega < 2.0))
        throw DomainError("solver: omega must lie in (0, 2)");
    const int ny = g_.ny;
    const double dt = g_.ht(), hx2 = g_.hx() * g_.hx(), hy = g_.hy();
    const auto& V = op_.mass();
    const auto& wf = op_.face_weight();
    cs_.assign(ny, 0.0);
    cn_.assign(ny, 0.0);
    cx_.assign(ny, 0.0);
    inv_diag_.assign(ny, 0.0);
    double rho = 0.0;
    for (int j = 0; j < ny - 1; ++j) {
        cs_[j] = j == 0 ? 0.0 : wf[j - 1] / hy;
        cn_[j] = wf[j] / hy;
        cx_[j] = V[j] / hx2;
        const double off = cs_[j] + cn_[j] + 2.0 * g_.n * cx_[j];
        const double diag = V[j] / dt + off;
        inv_diag_[j] = 1.0 / diag;
        rho = std::max(rho, off / diag);
    }
    if (cfg.omega != 0.0) {
        omega_ = cfg.omega;
    } else {
        // Young's formula with the Jacobi radius bounded by the row ratio.
        const double r = std::min(rho, 0.9999);
        omega_ = 2.0 / (1.0 + std::sqrt(1.0 - r * r));
    }
}

void ImplicitStepper::build_rhs(const double* prev, const double* source_next, std::vector<double>& rhs) const {
    const auto& V = op_.mass();
    const double dt = g_.ht();
    rhs.resize(g_.slice_size());
    for (std::size_t l = 0; l < g_.line_count(); ++l)
        for (int j = 0; j < g_.ny; ++j) {
            const std::size_t k = l * g_.ny + j;
            rhs[k] = V[j] * (prev[k] / dt + (source_next ? source_next[k] : 0.0));
        }
}

namespace {

struct LineRange {
    int lo2, hi2;
};

LineRange second_axis(const HalfGrid& g) { return g.n == 2 ? LineRange{1, g.nx - 1} : LineRange{0, 1}; }

}  // namespace

StepStats ImplicitStepper::step(const double* prev, double* next, const double* source_next,
                                const double* psi_next) const {
    const HalfGrid& g = g_;
    const auto& K = simd::active_kernels();
    std::vector<double> rhs;
    build_rhs(prev, source_next, rhs);
    const simd::LineStencil st{cs_.data(), cn_.data(), cx_.data(), inv_diag_.data()};
    const LineRange ax2 = second_axis(g);

    double scale = 1.0;
    for (std::size_t k = 0; k < g.slice_size(); ++k) scale = std::max(scale, std::abs(prev[k]));
    for (std::size_t k = 0; k < g.slice_size(); ++k) scale = std::max(scale, std::abs(next[k]));

    // Interior initial guess from the previous slice, projected onto the constraint.
    for (int i1 = 1; i1 < g.nx - 1; ++i1)
        for (int i2 = ax2.lo2; i2 < ax2.hi2; ++i2) {
            const std::size_t off = g.line_offset(i1, i2);
            for (int j = 0; j < g.ny - 1; ++j) next[off + j] = prev[off + j];
            const double psi = psi_next ? psi_next[static_cast<std::size_t>(i1) * g.nx2() + i2]
                                        : -std::numeric_limits<double>::infinity();
            next[off] = std::max(next[off], psi);
        }

    StepStats stats;
    const double tol = cfg_.psor_tol * scale;
    for (int it = 1; it <= cfg_.max_iters; ++it) {
        double maxd = 0.0;
        for (int color = 0; color < 2; ++color)
            for (int i1 = 1; i1 < g.nx - 1; ++i1)
                for (int i2 = ax2.lo2; i2 < ax2.hi2; ++i2) {
                    const int parity = (color + i1 + i2) % 2;
                    double* u = next + g.line_offset(i1, i2);
                    const double* b = rhs.data() + g.line_offset(i1, i2);
                    simd::LineNeighbours nb;
                    nb.l1 = next + g.line_offset(i1 - 1, i2);
                    nb.r1 = next + g.line_offset(i1 + 1, i2);
                    if (g.n == 2) {
                        nb.l2 = next + g.line_offset(i1, i2 - 1);
                        nb.r2 = next + g.line_offset(i1, i2 + 1);
                    }
                    if (parity == 0) {
                        double xs = nb.l1[0] + nb.r1[0];
                        if (nb.l2) xs = xs + nb.l2[0] + nb.r2[0];
                        const double sigma = cn_[0] * u[1] + cx_[0] * xs;
                        const double gs = (b[0] + sigma) * inv_diag_[0];
                        double nu = u[0] + omega_ * (gs - u[0]);
                        if (psi_next) nu = std::max(nu, psi_next[static_cast<std::size_t>(i1) * g.nx2() + i2]);
                        maxd = std::max(maxd, std::abs(nu - u[0]));
                        u[0] = nu;
                    }
                    maxd = std::max(maxd, K.relax_line(u, b, st, nb, 1, static_cast<std::size_t>(g.ny - 1),
                                                       parity, omega_));
                }
        stats.iterations = it;
        stats.last_update = maxd;
        if (maxd < tol) {
            if (psi_next)
                for (int i1 = 1; i1 < g.nx - 1; ++i1)
                    for (int i2 = ax2.lo2; i2 < ax2.hi2; ++i2)
                        if (next[g.line_offset(i1, i2)] - psi_next[static_cast<std::size_t>(i1) * g.nx2() + i2] <=
                            cfg_.contact_tol)
                            ++stats.contact_nodes;
            return stats;
        }
    }
    throw NonconvergenceError("projected SOR did not converge within max_iters", stats.last_update);
}

void ImplicitStepper::scaled_residual(const double* prev, const double* next, const double* source_next,
                                      double* out) const {
    const HalfGrid& g = g_;
    const auto& K = simd::active_kernels();
    std::vector<double> rhs;
    build_rhs(prev, source_next, rhs);
    const simd::LineStencil st{cs_.data(), cn_.data(), cx_.data(), inv_diag_.data()};
    const LineRange ax2 = second_axis(g);
    std::fill(out, out + g.slice_size(), 0.0);
    for (int i1 = 1; i1 < g.nx - 1; ++i1)
        for (int i2 = ax2.lo2; i2 < ax2.hi2; ++i2) {
            const std::size_t off = g.line_offset(i1, i2);
            simd::LineNeighbours nb;
            nb.l1 = next + g.line_offset(i1 - 1, i2);
            nb.r1 = next + g.line_offset(i1 + 1, i2);
            if (g.n == 2) {
                nb.l2 = next + g.line_offset(i1, i2 - 1);
                nb.r2 = next + g.line_offset(i1, i2 + 1);
            }
            double xs = nb.l1[0] + nb.r1[0];
            if (nb.l2) xs = xs + nb.l2[0] + nb.r2[0];
            out[off] = next[off] / inv_diag_[0] - (cn_[0] * next[off + 1] + cx_[0] * xs) - rhs[off];
            K.line_residual(out + off, next + off, rhs.data() + off, st, nb, 1, static_cast<std::size_t>(g.ny - 1));
            for (int j = 0; j < g.ny - 1; ++j) out[off + j] *= inv_diag_[j];
        }
}

void ImplicitStepper::thin_multiplier(const double* prev, const double* next, const double* source_next,
                                      double* out) const {
    const HalfGrid& g = g_;
    std::vector<double> res(g.slice_size());
    scaled_residual(prev, next, source_next, res.data());
    for (int i1 = 0; i1 < g.nx; ++i1)
        for (int i2 = 0; i2 < g.nx2(); ++i2) {
            const std::size_t off = g.line_offset(i1, i2);
            out[static_cast<std::size_t>(i1) * g.nx2() + i2] = res[off] / inv_diag_[0];
        }
}

Solution solve(const Problem& prob, const SolverConfig& cfg) {
    const HalfGrid& g = prob.grid;
    g.validate();
    Solution sol;
    sol.U = std::make_shared<ScalarField>(g, prob.w);
    sol.F = std::make_shared<ScalarField>(g, prob.w);
    if (prob.source) sol.F->fill(prob.source);
    sol.psi = make_thin_field(g, prob.obstacle ? prob.obstacle
                                               : ThinFunction([](const std::array<double, kMaxThinDim>&, double) {
                                                     return -std::numeric_limits<double>::infinity();
                                                 }));
    if (!prob.initial) throw DomainError("solve: initial data is required");

    ScalarField& U = *sol.U;
    const std::size_t ss = g.slice_size();
    for (int i1 = 0; i1 < g.nx; ++i1)
        for (int i2 = 0; i2 < g.nx2(); ++i2)
            for (int j = 0; j < g.ny; ++j) {
                SpacePoint X;
                X.x[0] = g.x(i1);
                if (g.n == 2) X.x[1] = g.x(i2);
                X.y = g.y(j);
                U.at(0, i1, i2, j) = prob.initial(X, g.t(0));
            }

    ImplicitStepper stepper(g, prob.w, cfg);
    sol.omega = stepper.omega();
    sol.kernels = simd::active_kernels().name;
    const bool constrained = static_cast<bool>(prob.obstacle);
    for (int m = 1; m < g.nt; ++m) {
        double* next = U.values().data() + m * ss;
        const double* prev = U.values().data() + (m - 1) * ss;
        const double t = g.t(m);
        for (int i1 = 0; i1 < g.nx; ++i1)
            for (int i2 = 0; i2 < g.nx2(); ++i2) {
                const bool xb = i1 == 0 || i1 == g.nx - 1 || (g.n == 2 && (i2 == 0 || i2 == g.nx - 1));
                for (int j = 0; j < g.ny; ++j) {
                    if (!xb && j != g.ny - 1) continue;
                    SpacePoint X;
                    X.x[0] = g.x(i1);
                    if (g.n == 2) X.x[1] = g.x(i2);
                    X.y = g.y(j);
                    U.at(m, i1, i2, j) = prob.boundary ? prob.boundary(X, t) : 0.0;
                }
            }
        const double* src = prob.source ? sol.F->values().data() + m * ss : nullptr;
        const double* psi = constrained ? sol.psi.values.data() + m * g.thin_slice_size() : nullptr;
        sol.steps.push_back(stepper.step(prev, next, src, psi));
    }
    if (prob.exterior) U.set_exterior(prob.exterior);
    return sol;
}

ResidualReport residual_check(const ScalarField& U, const ScalarField* F, const ThinField& psi,
                              const SolverConfig& cfg) {
    const HalfGrid& g = U.grid();
    ImplicitStepper stepper(g, U.weight(), cfg);
    ResidualReport rep;
    for (double v : U.values()) rep.scale = std::max(rep.scale, std::abs(v));
    const std::size_t ss = g.slice_size();
    std::vector<double> res(ss);
    const int lo2 = g.n == 2 ? 1 : 0, hi2 = g.n == 2 ? g.nx - 1 : 1;
    for (int m = 1; m < g.nt; ++m) {
        const double* prev = U.values().data() + (m - 1) * ss;
        const double* next = U.values().data() + m * ss;
        const double* src = F ? F->values().data() + m * ss : nullptr;
        stepper.scaled_residual(prev, next, src, res.data());
        for (int i1 = 1; i1 < g.nx - 1; ++i1)
            for (int i2 = lo2; i2 < hi2; ++i2) {
                const std::size_t off = g.line_offset(i1, i2);
                for (int j = 1; j < g.ny - 1; ++j) rep.pde = std::max(rep.pde, std::abs(res[off + j]));
                const double gap = next[off] - psi.at(m, i1, i2);
                const double lam = res[off];
                if (std::isfinite(gap)) rep.complementarity = std::max(rep.complementarity, std::abs(std::min(gap, lam)));
                else rep.complementarity = std::max(rep.complementarity, std::abs(lam));
                rep.flux_sign = std::max(rep.flux_sign, -lam);
                rep.obstacle = std::max(rep.obstacle, -gap);
            }
    }
    return rep;
}

ThinField weighted_normal_derivative(const ScalarField& U, FluxScheme scheme, const ScalarField* F) {
    const HalfGrid& g = U.grid();
    StencilOperator op(g, U.weight());
    const auto& wf = op.face_weight();
    const double hy = g.hy();
    ThinField out{g, std::vector<double>(g.thin_slice_size() * g.nt, 0.0)};
    std::unique_ptr<ImplicitStepper> stepper;
    if (scheme == FluxScheme::finite_volume) stepper = std::make_unique<ImplicitStepper>(g, U.weight(), SolverConfig{});
    const std::size_t ss = g.slice_size();
    std::vector<double> lam(g.thin_slice_size());
    for (int m = 0; m < g.nt; ++m) {
        const double* slice = U.values().data() + m * ss;
        const bool fv = scheme == FluxScheme::finite_volume && m > 0;
        if (fv) {
            const double* src = F ? F->values().data() + m * ss : nullptr;
            stepper->thin_multiplier(slice - ss, slice, src, lam.data());
        }
        for (int i1 = 0; i1 < g.nx; ++i1)
            for (int i2 = 0; i2 < g.nx2(); ++i2) {
                const double* u = slice + g.line_offset(i1, i2);
                const double f_half = wf[0] * (u[1] - u[0]) / hy;
                double v = f_half;
                if (scheme == FluxScheme::extrapolated) {
                    const double f_3half = wf[1] * (u[2] - u[1]) / hy;
                    v = 0.5 * (3.0 * f_half - f_3half);
                } else if (fv) {
                    const bool xb = i1 == 0 || i1 == g.nx - 1 || (g.n == 2 && (i2 == 0 || i2 == g.nx - 1));
                    v = xb ? f_half : -lam[static_cast<std::size_t>(i1) * g.nx2() + i2];
                }
                out.at(m, i1, i2) = v;
            }
    }
    return out;
}

}  // namespace thinfb
