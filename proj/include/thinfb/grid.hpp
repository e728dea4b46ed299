#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thinfb/errors.hpp"
#include "thinfb/geometry.hpp"
#include "thinfb/weight.hpp"

namespace thinfb {

using SpaceTimeFunction = std::function<double(const SpacePoint&, double)>;
using ThinFunction = std::function<double(const std::array<double, kMaxThinDim>&, double)>;

// Tensor grid on [-Rx, Rx]^n x [0, Ry] x [-T, 0]; node counts include both ends.
struct HalfGrid {
    int n = 1;
    int nx = 65;
    int ny = 65;
    int nt = 257;
    double Rx = 1.0;
    double Ry = 1.0;
    double T = 0.25;

    void validate() const;

    double hx() const { return 2.0 * Rx / (nx - 1); }
    double hy() const { return Ry / (ny - 1); }
    double ht() const { return T / (nt - 1); }
    double x(int i) const { return -Rx + i * hx(); }
    double y(int j) const { return j * hy(); }
    double t(int m) const { return -T + m * ht(); }

    int nx2() const { return n == 2 ? nx : 1; }
    std::size_t line_count() const { return static_cast<std::size_t>(nx) * nx2(); }
    std::size_t slice_size() const { return line_count() * ny; }
    std::size_t thin_slice_size() const { return line_count(); }
    std::size_t size() const { return slice_size() * nt; }
    // Row-major (time, x1, x2, y).
    std::size_t index(int m, int i1, int i2, int j) const {
        return ((static_cast<std::size_t>(m) * nx + i1) * nx2() + i2) * ny + j;
    }
    std::size_t line_offset(int i1, int i2) const { return (static_cast<std::size_t>(i1) * nx2() + i2) * ny; }

    // Same node counts with all lengths divided by r (times by r^2).
    HalfGrid dilated(double r) const;
};

enum class InterpOrder { linear, cubic };

// Values of a function on a HalfGrid together with how to evaluate it off the
// nodes. Outside the grid the exterior function is used when set, else zero.
class ScalarField {
public:
    ScalarField(HalfGrid grid, WeightParam w);

    const HalfGrid& grid() const { return grid_; }
    const WeightParam& weight() const { return w_; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    double& at(int m, int i1, int i2, int j) { return values_[grid_.index(m, i1, i2, j)]; }
    double at(int m, int i1, int i2, int j) const { return values_[grid_.index(m, i1, i2, j)]; }

    void set_exterior(SpaceTimeFunction f) { exterior_ = std::move(f); }
    const SpaceTimeFunction& exterior() const { return exterior_; }
    bool has_exterior() const { return static_cast<bool>(exterior_); }
    void set_interpolation(InterpOrder o) { interp_ = o; }
    InterpOrder interpolation() const { return interp_; }

    bool contains(const SpacePoint& X, double t) const;

    struct Sample {
        double u = 0.0;
        SpaceVector grad{};
        double ut = 0.0;
    };
    // Interpolated value, spatial gradient and time derivative.
    Sample sample(const SpacePoint& X, double t, bool want_derivatives = true) const;
    double value(const SpacePoint& X, double t) const { return sample(X, t, false).u; }

    // Fill every node from f.
    void fill(const SpaceTimeFunction& f);

private:
    HalfGrid grid_;
    WeightParam w_;
    std::vector<double> values_;
    SpaceTimeFunction exterior_;
    InterpOrder interp_ = InterpOrder::cubic;
};

// Thin-space data psi(x, t) on the x-t nodes of a grid.
struct ThinField {
    HalfGrid grid;
    std::vector<double> values;  // (time, x1, x2)

    double& at(int m, int i1, int i2) { return values[(static_cast<std::size_t>(m) * grid.nx + i1) * grid.nx2() + i2]; }
    double at(int m, int i1, int i2) const {
        return values[(static_cast<std::size_t>(m) * grid.nx + i1) * grid.nx2() + i2];
    }
};

ThinField make_thin_field(const HalfGrid& g, const ThinFunction& f);

// Pointwise field used by the functionals: value, gradient, time derivative and
// right-hand side at a space-time point.
struct FieldSample {
    double u = 0.0;
    SpaceVector grad{};
    double ut = 0.0;
    double f = 0.0;
};

struct FieldExtent {
    double Rx = 0.0;
    double Ry = 0.0;
    double T = 0.0;
    // Tail bound applies only when values outside the extent are taken as zero.
    bool zero_outside = true;
};

struct Field {
    int n = 1;
    std::function<FieldSample(const SpacePoint&, double)> sample;
    std::optional<FieldExtent> extent;
    bool has_source = false;
    std::string label;
};

template <class S>
class BasicPolynomial;

// Polynomial with an optional polynomial right-hand side.
Field polynomial_field(const BasicPolynomial<double>& p, const BasicPolynomial<double>* source = nullptr);

// Grid field; the source may be a grid field or an analytic function.
Field grid_field(std::shared_ptr<const ScalarField> U, std::shared_ptr<const ScalarField> F = nullptr,
                 SpaceTimeFunction analytic_source = nullptr);

// (X, t) -> U(X + (x0, 0), t + t0).
Field translated(const Field& U, const std::array<double, kMaxThinDim>& x0, double t0);

// (X, t) -> U(r X, r^2 t) / scale, with derivatives and source scaled accordingly.
Field dilated(const Field& U, double r, double scale);

// U - V (sources subtracted as well).
Field difference(const Field& U, const Field& V);

}  // namespace thinfb
