#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "thinfb/quadrature.hpp"
#include "thinfb/simd/kernels.hpp"

namespace thinfb::simd {

namespace {

inline __m256d neighbour_sum4(const LineNeighbours& nb, std::size_t j) {
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(nb.l1 + j), _mm256_loadu_pd(nb.r1 + j));
    if (nb.l2) {
        s = _mm256_add_pd(s, _mm256_loadu_pd(nb.l2 + j));
        s = _mm256_add_pd(s, _mm256_loadu_pd(nb.r2 + j));
    }
    return s;
}

inline double neighbour_sum1(const LineNeighbours& nb, std::size_t j) {
    double s = nb.l1[j] + nb.r1[j];
    if (nb.l2) s = s + nb.l2[j] + nb.r2[j];
    return s;
}

inline __m256d sigma4(const double* u, const LineStencil& st, const LineNeighbours& nb, std::size_t j) {
    const __m256d a = _mm256_mul_pd(_mm256_loadu_pd(st.cs + j), _mm256_loadu_pd(u + j - 1));
    const __m256d b = _mm256_mul_pd(_mm256_loadu_pd(st.cn + j), _mm256_loadu_pd(u + j + 1));
    const __m256d c = _mm256_mul_pd(_mm256_loadu_pd(st.cx + j), neighbour_sum4(nb, j));
    return _mm256_add_pd(_mm256_add_pd(a, b), c);
}

double relax_line_avx2(double* u, const double* rhs, const LineStencil& st, const LineNeighbours& nb,
                       std::size_t jbeg, std::size_t jend, int parity, double omega) {
    const __m256d vomega = _mm256_set1_pd(omega);
    const __m256d signmask = _mm256_set1_pd(-0.0);
    __m256d vmax = _mm256_setzero_pd();
    std::size_t j = jbeg;
    for (; j + 4 <= jend; j += 4) {
        // lanes j, j+1, j+2, j+3; active where (j + lane) % 2 == parity
        const bool even_first = ((j % 2) == static_cast<std::size_t>(parity));
        const __m256d mask = even_first ? _mm256_castsi256_pd(_mm256_setr_epi64x(-1, 0, -1, 0))
                                        : _mm256_castsi256_pd(_mm256_setr_epi64x(0, -1, 0, -1));
        const __m256d uj = _mm256_loadu_pd(u + j);
        const __m256d gs = _mm256_mul_pd(_mm256_add_pd(_mm256_loadu_pd(rhs + j), sigma4(u, st, nb, j)),
                                         _mm256_loadu_pd(st.inv_diag + j));
        const __m256d nu = _mm256_add_pd(uj, _mm256_mul_pd(vomega, _mm256_sub_pd(gs, uj)));
        const __m256d out = _mm256_blendv_pd(uj, nu, mask);
        const __m256d d = _mm256_andnot_pd(signmask, _mm256_sub_pd(out, uj));
        vmax = _mm256_max_pd(vmax, d);
        _mm256_storeu_pd(u + j, out);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vmax);
    double maxd = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; j < jend; ++j) {
        if ((j % 2) != static_cast<std::size_t>(parity)) continue;
        const double sigma = st.cs[j] * u[j - 1] + st.cn[j] * u[j + 1] + st.cx[j] * neighbour_sum1(nb, j);
        const double gs = (rhs[j] + sigma) * st.inv_diag[j];
        const double nu = u[j] + omega * (gs - u[j]);
        const double dd = std::abs(nu - u[j]);
        if (dd > maxd) maxd = dd;
        u[j] = nu;
    }
    return maxd;
}

void line_residual_avx2(double* out, const double* u, const double* rhs, const LineStencil& st,
                        const LineNeighbours& nb, std::size_t jbeg, std::size_t jend) {
    std::size_t j = jbeg;
    for (; j + 4 <= jend; j += 4) {
        const __m256d diag_u = _mm256_div_pd(_mm256_loadu_pd(u + j), _mm256_loadu_pd(st.inv_diag + j));
        const __m256d r = _mm256_sub_pd(_mm256_sub_pd(diag_u, sigma4(u, st, nb, j)), _mm256_loadu_pd(rhs + j));
        _mm256_storeu_pd(out + j, r);
    }
    for (; j < jend; ++j) {
        const double sigma = st.cs[j] * u[j - 1] + st.cn[j] * u[j + 1] + st.cx[j] * neighbour_sum1(nb, j);
        out[j] = u[j] / st.inv_diag[j] - sigma - rhs[j];
    }
}

double weighted_sum_avx2(const double* w, const double* v, std::size_t count) {
    constexpr std::size_t kBlock = 256;
    double partial[4096];
    std::size_t nblocks = 0;
    double total = 0.0;
    std::size_t i = 0;
    while (i < count) {
        const std::size_t end = std::min(count, i + kBlock);
        __m256d acc = _mm256_setzero_pd();
        for (; i + 4 <= end; i += 4)
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(v + i)));
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, acc);
        double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
        for (; i < end; ++i) s += w[i] * v[i];
        partial[nblocks++] = s;
        if (nblocks == 4096) {
            total += thinfb::pairwise_sum(partial, nblocks);
            nblocks = 0;
        }
    }
    return total + thinfb::pairwise_sum(partial, nblocks);
}

const KernelTable kAvx2{"avx2", relax_line_avx2, line_residual_avx2, weighted_sum_avx2};

}  // namespace

const KernelTable* avx2_kernels_compiled() { return &kAvx2; }

}  // namespace thinfb::simd
