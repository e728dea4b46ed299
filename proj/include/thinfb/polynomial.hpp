#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "thinfb/errors.hpp"
#include "thinfb/geometry.hpp"
#include "thinfb/weight.hpp"

namespace thinfb {

// Exponents of x1^x[0] x2^x[1] y^y t^t.
struct Exponents {
    std::array<int, kMaxThinDim> x{};
    int y = 0;
    int t = 0;

    int thin_degree() const { return x[0] + x[1]; }
    // Degree under (X, t) -> (r X, r^2 t).
    int parabolic_degree() const { return x[0] + x[1] + y + 2 * t; }

    friend bool operator<(const Exponents& l, const Exponents& r) {
        return std::tie(l.x[0], l.x[1], l.y, l.t) < std::tie(r.x[0], r.x[1], r.y, r.t);
    }
    friend bool operator==(const Exponents& l, const Exponents& r) = default;
};

enum class Var { x1, x2, y, t };

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return static_cast<double>(v); }

template <class S>
class BasicPolynomial {
public:
    using Scalar = S;
    using TermMap = std::map<Exponents, S>;

    explicit BasicPolynomial(int n = 1) : n_(n) {
        if (n < 1 || n > kMaxThinDim) throw DomainError("polynomial: thin dimension must be 1 or 2");
    }

    static BasicPolynomial monomial(int n, const Exponents& e, const S& c = S(1)) {
        BasicPolynomial p(n);
        p.add(e, c);
        return p;
    }

    int n() const { return n_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const Exponents& e, const S& c) {
        if (e.x[0] < 0 || e.x[1] < 0 || e.y < 0 || e.t < 0) throw DomainError("polynomial: negative exponent");
        if (n_ == 1 && e.x[1] != 0) throw DomainError("polynomial: x2 used with n = 1");
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (c != S(0)) terms_.emplace(e, c);
            return;
        }
        it->second += c;
        if (it->second == S(0)) terms_.erase(it);
    }

    S coefficient(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? S(0) : it->second;
    }

    BasicPolynomial& operator+=(const BasicPolynomial& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) add(e, c);
        return *this;
    }
    BasicPolynomial& operator-=(const BasicPolynomial& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) add(e, -c);
        return *this;
    }
    BasicPolynomial& operator*=(const S& s) {
        if (s == S(0)) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }
    friend BasicPolynomial operator+(BasicPolynomial l, const BasicPolynomial& r) { return l += r; }
    friend BasicPolynomial operator-(BasicPolynomial l, const BasicPolynomial& r) { return l -= r; }
    friend BasicPolynomial operator*(BasicPolynomial l, const S& s) { return l *= s; }
    friend BasicPolynomial operator*(const S& s, BasicPolynomial l) { return l *= s; }

    friend BasicPolynomial operator*(const BasicPolynomial& l, const BasicPolynomial& r) {
        l.check_same(r);
        BasicPolynomial out(l.n_);
        for (const auto& [e1, c1] : l.terms_)
            for (const auto& [e2, c2] : r.terms_) {
                Exponents e;
                e.x = {e1.x[0] + e2.x[0], e1.x[1] + e2.x[1]};
                e.y = e1.y + e2.y;
                e.t = e1.t + e2.t;
                out.add(e, c1 * c2);
            }
        return out;
    }

    BasicPolynomial derivative(Var v) const {
        if (v == Var::x2 && n_ < 2) throw DomainError("polynomial: no x2 coordinate for n = 1");
        BasicPolynomial out(n_);
        for (const auto& [e, c] : terms_) {
            Exponents d = e;
            int* slot = v == Var::x1 ? &d.x[0] : v == Var::x2 ? &d.x[1] : v == Var::y ? &d.y : &d.t;
            if (*slot == 0) continue;
            const S factor(*slot);
            --*slot;
            out.add(d, c * factor);
        }
        return out;
    }

    // Multiply by y^m.
    BasicPolynomial times_y_power(int m) const {
        BasicPolynomial out(n_);
        for (const auto& [e, c] : terms_) {
            Exponents d = e;
            d.y += m;
            out.add(d, c);
        }
        return out;
    }

    double evaluate(const SpacePoint& X, double t) const {
        double sum = 0.0;
        for (const auto& [e, c] : terms_) {
            double m = to_double(c);
            m *= ipow(X.x[0], e.x[0]);
            if (n_ == 2) m *= ipow(X.x[1], e.x[1]);
            m *= ipow(X.y, e.y) * ipow(t, e.t);
            sum += m;
        }
        return sum;
    }

    SpaceVector gradient(const SpacePoint& X, double t) const {
        SpaceVector g;
        g.x[0] = derivative(Var::x1).evaluate(X, t);
        if (n_ == 2) g.x[1] = derivative(Var::x2).evaluate(X, t);
        g.y = derivative(Var::y).evaluate(X, t);
        return g;
    }

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e.parabolic_degree());
        return d;
    }

    // Parabolic degree if every term has the same one.
    std::optional<int> homogeneous_degree() const {
        if (terms_.empty()) return std::nullopt;
        const int d = terms_.begin()->first.parabolic_degree();
        for (const auto& [e, c] : terms_)
            if (e.parabolic_degree() != d) return std::nullopt;
        return d;
    }

    bool has_y() const {
        for (const auto& [e, c] : terms_)
            if (e.y != 0) return true;
        return false;
    }

    bool is_even_in_y() const {
        for (const auto& [e, c] : terms_)
            if (e.y % 2 != 0) return false;
        return true;
    }

    BasicPolynomial<double> to_float() const {
        BasicPolynomial<double> out(n_);
        for (const auto& [e, c] : terms_) out.add(e, to_double(c));
        return out;
    }

    double max_abs_coefficient() const {
        double m = 0.0;
        for (const auto& [e, c] : terms_) m = std::max(m, std::abs(to_double(c)));
        return m;
    }

private:
    static double ipow(double b, int e) {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    }
    void check_same(const BasicPolynomial& o) const {
        if (o.n_ != n_) throw DomainError("polynomial: mismatched thin dimension");
    }

    int n_;
    TermMap terms_;
};

using ExactPolynomial = BasicPolynomial<Rational>;
using FloatPolynomial = BasicPolynomial<double>;

namespace detail {

template <class S>
S weight_value(const WeightParam& w) {
    if constexpr (std::is_same_v<S, Rational>)
        return w.exact_a();
    else
        return S(w.a());
}

}  // namespace detail

// Delta_x p - d_t p.
template <class S>
BasicPolynomial<S> backward_heat(const BasicPolynomial<S>& p) {
    BasicPolynomial<S> out = p.derivative(Var::t) * S(-1);
    out += p.derivative(Var::x1).derivative(Var::x1);
    if (p.n() == 2) out += p.derivative(Var::x2).derivative(Var::x2);
    return out;
}

// Unique y-even solution of L_a U = 0 whose trace at y = 0 is q.
template <class S>
BasicPolynomial<S> caloric_extension(const BasicPolynomial<S>& q, const WeightParam& w) {
    if (q.has_y()) throw DomainError("caloric_extension: input must not depend on y");
    const S a = detail::weight_value<S>(w);
    BasicPolynomial<S> out = q;
    BasicPolynomial<S> g = q;
    S coeff(1);
    for (int k = 1; !g.is_zero(); ++k) {
        g = backward_heat(g);
        if (g.is_zero()) break;
        coeff = coeff / (S(2 * k) * (S(2 * k - 1) + a));
        const S sign = k % 2 == 0 ? S(1) : S(-1);
        out += g.times_y_power(2 * k) * (sign * coeff);
    }
    return out;
}

// L_a p = d_t p - Delta_x p - d_yy p - (a / y) d_y p; requires p even in y.
template <class S>
BasicPolynomial<S> apply_La(const BasicPolynomial<S>& p, const WeightParam& w) {
    if (!p.is_even_in_y()) throw DomainError("apply_La: polynomial has odd powers of y");
    const S a = detail::weight_value<S>(w);
    BasicPolynomial<S> out = backward_heat(p) * S(-1);
    for (const auto& [e, c] : p.terms()) {
        if (e.y < 2) continue;
        Exponents d = e;
        d.y -= 2;
        out.add(d, c * (S(e.y * (e.y - 1)) + a * S(e.y)) * S(-1));
    }
    return out;
}

// Z p = <X, grad p> + 2 t d_t p.
template <class S>
BasicPolynomial<S> z_apply(const BasicPolynomial<S>& p) {
    BasicPolynomial<S> out(p.n());
    for (const auto& [e, c] : p.terms()) out.add(e, c * S(e.parabolic_degree()));
    return out;
}

struct MembershipReport {
    bool caloric = false;
    bool even_in_y = false;
    bool nonneg_thin = false;
    bool homogeneous = false;
    std::optional<int> kappa_est;
    double min_thin_value = 0.0;  // minimum on the thin parabolic unit sphere
    bool in_P = false;
    std::vector<std::string> reasons;
};

// Minimum of p(x, 0, t) over {|x|^2 + |t| = 1, t <= 0}, sampled at `samples`
// points per parameter direction.
template <class S>
double thin_sphere_minimum(const BasicPolynomial<S>& p, int samples) {
    const auto f = p.to_float();
    double m = std::numeric_limits<double>::infinity();
    const int nth = p.n() == 2 ? samples : 2;
    for (int i = 0; i <= samples; ++i) {
        const double tau = static_cast<double>(i) / samples;
        const double rho = std::sqrt(1.0 - tau);
        for (int k = 0; k < nth; ++k) {
            SpacePoint X;
            if (p.n() == 1) {
                X.x[0] = k == 0 ? rho : -rho;
            } else {
                const double th = 2.0 * 3.14159265358979323846 * k / nth;
                X.x[0] = rho * std::cos(th);
                X.x[1] = rho * std::sin(th);
            }
            m = std::min(m, f.evaluate(X, -tau));
        }
    }
    return m;
}

// Membership in the class of caloric, y-even, thin-nonnegative, kappa-homogeneous
// polynomials with kappa = 2m.
template <class S>
MembershipReport validate_P_kappa_plus(const BasicPolynomial<S>& p, const WeightParam& w, int kappa,
                                       int samples = 1000, double float_tol = 1e-9) {
    MembershipReport r;
    const BasicPolynomial<S> res = apply_La(p.is_even_in_y() ? p : BasicPolynomial<S>(p.n()), w);
    if constexpr (std::is_same_v<S, Rational>) {
        r.caloric = p.is_even_in_y() && res.is_zero();
    } else {
        r.caloric = p.is_even_in_y() && res.max_abs_coefficient() <= float_tol * std::max(1.0, p.max_abs_coefficient());
    }
    r.even_in_y = p.is_even_in_y();
    r.kappa_est = p.homogeneous_degree();
    r.homogeneous = r.kappa_est.has_value();
    r.min_thin_value = p.is_zero() ? 0.0 : thin_sphere_minimum(p, samples);
    r.nonneg_thin = r.min_thin_value >= -1e-12 * std::max(1.0, p.max_abs_coefficient());
    if (!r.caloric) r.reasons.push_back("not caloric");
    if (!r.even_in_y) r.reasons.push_back("not even in y");
    if (!r.nonneg_thin) r.reasons.push_back("negative on the thin space");
    if (!r.homogeneous) r.reasons.push_back("not parabolically homogeneous");
    else if (*r.kappa_est != kappa) r.reasons.push_back("homogeneity degree differs from kappa");
    if (kappa <= 0 || kappa % 2 != 0) r.reasons.push_back("kappa is not a positive even integer");
    if (p.is_zero()) r.reasons.push_back("zero polynomial");
    r.in_P = r.reasons.empty();
    return r;
}

// n minus the rank of the vectors grad_x d_x^alpha d_t^j p over |alpha| + 2j = kappa - 1.
template <class S>
int spatial_dimension(const BasicPolynomial<S>& p, int kappa, double rank_tol = 1e-10) {
    const auto deg = p.homogeneous_degree();
    if (!deg || *deg != kappa) throw DomainError("spatial_dimension: polynomial is not kappa-homogeneous");
    const int n = p.n();
    std::vector<std::array<double, kMaxThinDim>> rows;
    for (int j = 0; 2 * j <= kappa - 1; ++j) {
        const int rest = kappa - 1 - 2 * j;
        for (int a1 = 0; a1 <= rest; ++a1) {
            const int a2 = rest - a1;
            if (n == 1 && a2 != 0) continue;
            BasicPolynomial<S> q = p;
            for (int i = 0; i < j; ++i) q = q.derivative(Var::t);
            for (int i = 0; i < a1; ++i) q = q.derivative(Var::x1);
            for (int i = 0; i < a2; ++i) q = q.derivative(Var::x2);
            std::array<double, kMaxThinDim> row{};
            for (int i = 0; i < n; ++i) {
                const auto d = q.derivative(i == 0 ? Var::x1 : Var::x2);
                row[i] = to_double(d.coefficient(Exponents{}));
            }
            rows.push_back(row);
        }
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int i = 0; i < n; ++i) m(static_cast<Eigen::Index>(r), i) = rows[r][i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return n;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rank_tol * sv(0)) ++rank;
    return n - rank;
}

// Derivative oracle for a thin-space obstacle: returns d_x^alpha d_t^j psi at (x, t)
// or nothing if that derivative is unavailable.
using ObstacleDerivative =
    std::function<std::optional<double>(std::array<int, kMaxThinDim> alpha, int j,
                                        const std::array<double, kMaxThinDim>& x, double t)>;

// Parabolic Taylor polynomial of degree k at (x0, t0), in local coordinates
// (x - x0, t - t0).
FloatPolynomial taylor_polynomial(const ObstacleDerivative& psi, int n, const std::array<double, kMaxThinDim>& x0,
                                  double t0, int k);

// One term per line: "coeff * x1^a x2^b y^m t^j" (factors with zero exponent omitted).
template <class S>
std::string to_text(const BasicPolynomial<S>& p, const char* term_sep = "\n") {
    std::ostringstream os;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        if (!first) os << term_sep;
        first = false;
        if constexpr (std::is_same_v<S, Rational>) {
            os << c.str();
        } else {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", c);
            os << buf;
        }
        bool star = false;
        auto factor = [&](const char* name, int ex) {
            if (ex == 0) return;
            os << (star ? " " : " * ") << name << '^' << ex;
            star = true;
        };
        factor("x1", e.x[0]);
        factor("x2", e.x[1]);
        factor("y", e.y);
        factor("t", e.t);
    }
    return os.str();
}

template <class S>
BasicPolynomial<S> parse_polynomial(const std::string& text, int n, char term_sep = '\n') {
    BasicPolynomial<S> p(n);
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line, term_sep)) {
        std::istringstream ls(line);
        std::string coeff;
        if (!(ls >> coeff)) continue;
        S c;
        try {
            if constexpr (std::is_same_v<S, Rational>) {
                c = Rational(coeff);
            } else {
                std::size_t used = 0;
                c = std::stod(coeff, &used);
                if (used != coeff.size()) throw ConfigError("bad coefficient");
            }
        } catch (const std::exception&) {
            throw ConfigError("polynomial: bad coefficient '" + coeff + "'");
        }
        Exponents e;
        std::string tok;
        while (ls >> tok) {
            if (tok == "*") continue;
            const auto caret = tok.find('^');
            const std::string name = tok.substr(0, caret);
            int ex = 1;
            if (caret != std::string::npos) {
                try {
                    ex = std::stoi(tok.substr(caret + 1));
                } catch (const std::exception&) {
                    throw ConfigError("polynomial: bad exponent in '" + tok + "'");
                }
            }
            if (name == "x1") e.x[0] += ex;
            else if (name == "x2") e.x[1] += ex;
            else if (name == "y") e.y += ex;
            else if (name == "t") e.t += ex;
            else throw ConfigError("polynomial: unknown variable '" + name + "'");
        }
        if (n == 1 && e.x[1] != 0) throw ConfigError("polynomial: x2 used with n = 1");
        p.add(e, c);
    }
    return p;
}

}  // namespace thinfb
