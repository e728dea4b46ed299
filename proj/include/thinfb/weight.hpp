#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "thinfb/errors.hpp"

namespace thinfb {

using Rational = boost::multiprecision::cpp_rational;

// The weight exponent a in (-1, 1); s = (1 - a) / 2 is the fractional order.
class WeightParam {
public:
    explicit WeightParam(double a) : a_(a) {
        if (!std::isfinite(a) || a <= -1.0 || a >= 1.0)
            throw DomainError("weight exponent a must lie in (-1, 1), got " + std::to_string(a));
    }

    WeightParam(long num, long den) : WeightParam(static_cast<double>(num) / static_cast<double>(den)) {
        exact_ = Rational(num, den);
    }

    double a() const noexcept { return a_; }
    double s() const noexcept { return 0.5 * (1.0 - a_); }

    // Exact value when built from a fraction, otherwise the binary value of a.
    Rational exact_a() const { return exact_ ? *exact_ : Rational(a_); }
    bool has_exact() const noexcept { return exact_.has_value(); }

private:
    double a_;
    std::optional<Rational> exact_;
};

}  // namespace thinfb
