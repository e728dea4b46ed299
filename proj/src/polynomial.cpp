#include "thinfb/polynomial.hpp"

namespace thinfb {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

FloatPolynomial taylor_polynomial(const ObstacleDerivative& psi, int n, const std::array<double, kMaxThinDim>& x0,
                                  double t0, int k) {
    if (k < 0) throw DomainError("taylor_polynomial: order must be >= 0");
    FloatPolynomial q(n);
    for (int j = 0; 2 * j <= k; ++j)
        for (int a1 = 0; a1 + 2 * j <= k; ++a1)
            for (int a2 = 0; a1 + a2 + 2 * j <= k; ++a2) {
                if (n == 1 && a2 != 0) continue;
                const auto d = psi({a1, a2}, j, x0, t0);
                if (!d) throw DomainError("taylor_polynomial: obstacle derivative of order " +
                                          std::to_string(a1 + a2 + 2 * j) + " is unavailable");
                Exponents e;
                e.x = {a1, a2};
                e.t = j;
                q.add(e, *d / (factorial(a1) * factorial(a2) * factorial(j)));
            }
    return q;
}

}  // namespace thinfb
