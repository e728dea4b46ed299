#include "thinfb/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "thinfb/errors.hpp"

namespace thinfb {

namespace {

// Nodes and weights from the Jacobi matrix of the three-term recurrence.
GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NonconvergenceError("Golub-Welsch eigensolver failed", 0.0);
    GaussRule g;
    const Eigen::Index n = diag.size();
    g.nodes.resize(n);
    g.weights.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        g.weights[i] = mu0 * v0 * v0;
    }
    return g;
}

void check_count(int count) {
    if (count < 1) throw DomainError("quadrature rule needs at least one node");
}

}  // namespace

GaussRule gauss_legendre(int count) {
    check_count(count);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(count);
    Eigen::VectorXd e(std::max(count - 1, 0));
    for (int k = 1; k < count; ++k) e(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(d, e, 2.0);
}

GaussRule gauss_hermite(int count) {
    check_count(count);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(count);
    Eigen::VectorXd e(std::max(count - 1, 0));
    for (int k = 1; k < count; ++k) e(k - 1) = std::sqrt(0.5 * k);
    return golub_welsch(d, e, std::sqrt(std::numbers::pi));
}

GaussRule gauss_laguerre(int count, double alpha) {
    check_count(count);
    if (!(alpha > -1.0)) throw DomainError("gauss_laguerre: alpha must be > -1");
    Eigen::VectorXd d(count);
    Eigen::VectorXd e(std::max(count - 1, 0));
    for (int k = 0; k < count; ++k) d(k) = 2.0 * k + alpha + 1.0;
    for (int k = 1; k < count; ++k) e(k - 1) = std::sqrt(k * (k + alpha));
    return golub_welsch(d, e, std::tgamma(alpha + 1.0));
}

GaussRule half_line_rule(int count, double a) {
    // int f(v) v^a e^{-v^2} dv = (1/2) int f(sqrt u) u^{(a-1)/2} e^{-u} du
    GaussRule g = gauss_laguerre(count, 0.5 * (a - 1.0));
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        g.nodes[k] = std::sqrt(g.nodes[k]);
        g.weights[k] *= 0.5;
    }
    return g;
}

StripRule make_strip_rule(const WeightParam& w, int n, const QuadratureOrders& orders) {
    if (n < 1 || n > kMaxThinDim) throw DomainError("make_strip_rule: n must be 1 or 2");
    if (orders.hermite < 1 || orders.laguerre < 1 || orders.time_panels < 1 || orders.time_nodes < 1)
        throw DomainError("make_strip_rule: quadrature orders must be positive");
    StripRule rule;
    rule.n = n;
    rule.a = w.a();
    rule.orders = orders;

    const GaussRule gh = gauss_hermite(orders.hermite);
    const GaussRule gv = half_line_rule(orders.laguerre, w.a());
    const double hnorm = 1.0 / std::sqrt(std::numbers::pi);
    const double vnorm = 2.0 / std::tgamma(0.5 * (w.a() + 1.0));
    const int n2 = n == 2 ? orders.hermite : 1;
    for (int i1 = 0; i1 < orders.hermite; ++i1)
        for (int i2 = 0; i2 < n2; ++i2)
            for (int k = 0; k < orders.laguerre; ++k) {
                SpacePoint p;
                p.x[0] = gh.nodes[i1];
                double wt = gh.weights[i1] * hnorm;
                if (n == 2) {
                    p.x[1] = gh.nodes[i2];
                    wt *= gh.weights[i2] * hnorm;
                }
                p.y = gv.nodes[k];
                wt *= gv.weights[k] * vnorm;
                rule.xi.push_back(p);
                rule.space_weight.push_back(wt);
            }

    // tau = s^2, s in [0, 1] split into panels; d tau = 2 s ds.
    const GaussRule gl = gauss_legendre(orders.time_nodes);
    for (int p = 0; p < orders.time_panels; ++p)
        for (int m = 0; m < orders.time_nodes; ++m) {
            const double s = (p + 0.5 * (gl.nodes[m] + 1.0)) / orders.time_panels;
            rule.tau.push_back(s * s);
            rule.time_weight.push_back(gl.weights[m] / orders.time_panels * s);
        }
    return rule;
}

double pairwise_sum(const double* v, std::size_t count) {
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += v[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, count - half);
}

}  // namespace thinfb
