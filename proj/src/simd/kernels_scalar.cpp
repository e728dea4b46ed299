#include <algorithm>
#include <cmath>

#include "thinfb/quadrature.hpp"
#include "thinfb/simd/kernels.hpp"

namespace thinfb::simd {

namespace {

inline double neighbour_sum(const LineNeighbours& nb, std::size_t j) {
    double s = nb.l1[j] + nb.r1[j];
    if (nb.l2) s = s + nb.l2[j] + nb.r2[j];
    return s;
}

double relax_line_scalar(double* u, const double* rhs, const LineStencil& st, const LineNeighbours& nb,
                         std::size_t jbeg, std::size_t jend, int parity, double omega) {
    double maxd = 0.0;
    std::size_t j = jbeg + ((jbeg % 2) != static_cast<std::size_t>(parity) ? 1 : 0);
    for (; j < jend; j += 2) {
        const double sigma = st.cs[j] * u[j - 1] + st.cn[j] * u[j + 1] + st.cx[j] * neighbour_sum(nb, j);
        const double gs = (rhs[j] + sigma) * st.inv_diag[j];
        const double nu = u[j] + omega * (gs - u[j]);
        const double d = std::abs(nu - u[j]);
        if (d > maxd) maxd = d;
        u[j] = nu;
    }
    return maxd;
}

void line_residual_scalar(double* out, const double* u, const double* rhs, const LineStencil& st,
                          const LineNeighbours& nb, std::size_t jbeg, std::size_t jend) {
    for (std::size_t j = jbeg; j < jend; ++j) {
        const double sigma = st.cs[j] * u[j - 1] + st.cn[j] * u[j + 1] + st.cx[j] * neighbour_sum(nb, j);
        out[j] = u[j] / st.inv_diag[j] - sigma - rhs[j];
    }
}

double weighted_sum_scalar(const double* w, const double* v, std::size_t count) {
    // Pairwise over blocks of four so rounding stays O(log n).
    constexpr std::size_t kBlock = 256;
    double partial[4096];
    std::size_t nblocks = 0;
    double total = 0.0;
    std::size_t i = 0;
    while (i < count) {
        const std::size_t end = std::min(count, i + kBlock);
        double s = 0.0;
        for (; i < end; ++i) s += w[i] * v[i];
        partial[nblocks++] = s;
        if (nblocks == 4096) {
            total += thinfb::pairwise_sum(partial, nblocks);
            nblocks = 0;
        }
    }
    return total + thinfb::pairwise_sum(partial, nblocks);
}

const KernelTable kScalar{"scalar", relax_line_scalar, line_residual_scalar, weighted_sum_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace thinfb::simd
