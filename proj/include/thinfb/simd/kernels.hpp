#pragma once

#include <cstddef>
#include <string>

namespace thinfb::simd {

// One y-line of the implicit stencil. Coefficient arrays are indexed by the
// y node j and shared by all lines; x-neighbour lines are l1/r1 (and l2/r2
// when n = 2, otherwise null).
struct LineStencil {
    const double* cs = nullptr;        // coupling to j - 1
    const double* cn = nullptr;        // coupling to j + 1
    const double* cx = nullptr;        // coupling to each x neighbour
    const double* inv_diag = nullptr;  // 1 / diagonal
};

struct LineNeighbours {
    const double* l1 = nullptr;
    const double* r1 = nullptr;
    const double* l2 = nullptr;
    const double* r2 = nullptr;
};

// Over-relaxed Gauss-Seidel update of the nodes j in [jbeg, jend) with j % 2 ==
// parity. Nodes of the other parity are left untouched, so a full line can be
// processed at once under red-black ordering. Returns the largest |update|.
using RelaxLineFn = double (*)(double* u, const double* rhs, const LineStencil& st, const LineNeighbours& nb,
                               std::size_t jbeg, std::size_t jend, int parity, double omega);

// out[j] = (A u)[j] - rhs[j] for j in [jbeg, jend), where A has diagonal
// 1 / inv_diag[j] and the off-diagonal couplings of LineStencil with a minus sign.
using LineResidualFn = void (*)(double* out, const double* u, const double* rhs, const LineStencil& st,
                                const LineNeighbours& nb, std::size_t jbeg, std::size_t jend);

// sum_i w[i] * v[i]
using WeightedSumFn = double (*)(const double* w, const double* v, std::size_t count);

struct KernelTable {
    const char* name;
    RelaxLineFn relax_line;
    LineResidualFn line_residual;
    WeightedSumFn weighted_sum;
};

const KernelTable& scalar_kernels();
// Null when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

// Chosen once per process: AVX2 when available, unless THINFB_SIMD=scalar.
const KernelTable& active_kernels();

}  // namespace thinfb::simd
