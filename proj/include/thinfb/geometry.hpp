#pragma once

#include <array>
#include <cmath>

namespace thinfb {

inline constexpr int kMaxThinDim = 2;

// A point (x, y) of the closed upper half-space; x has n <= 2 used entries.
struct SpacePoint {
    std::array<double, kMaxThinDim> x{};
    double y = 0.0;
};

// Gradient in (x, y). Unused x entries are zero.
struct SpaceVector {
    std::array<double, kMaxThinDim> x{};
    double y = 0.0;
};

inline double norm_sq(const SpacePoint& p, int n) {
    double s = p.y * p.y;
    for (int i = 0; i < n; ++i) s += p.x[i] * p.x[i];
    return s;
}

inline double norm_sq(const SpaceVector& v, int n) {
    double s = v.y * v.y;
    for (int i = 0; i < n; ++i) s += v.x[i] * v.x[i];
    return s;
}

inline double dot(const SpacePoint& p, const SpaceVector& v, int n) {
    double s = p.y * v.y;
    for (int i = 0; i < n; ++i) s += p.x[i] * v.x[i];
    return s;
}

}  // namespace thinfb
