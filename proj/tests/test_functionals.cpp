#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "thinfb/errors.hpp"
#include "thinfb/functionals.hpp"
#include "thinfb/presets.hpp"

using namespace thinfb;

namespace {

Field constant_field(int n, double c) {
    Field f;
    f.n = n;
    f.sample = [c](const SpacePoint&, double) {
        FieldSample s;
        s.u = c;
        return s;
    };
    return f;
}

}  // namespace

TEST_CASE("strip weights integrate constants exactly") {
    for (double a : {-0.5, 0.0, 0.5}) {
        for (int n : {1, 2}) {
            const StripRule rule = make_strip_rule(WeightParam(a), n);
            const FunctionalValues v = functional_suite(constant_field(n, 1.0), rule, 0.3);
            CHECK(v.H == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(v.D == 0.0);
            CHECK(*v.N == 0.0);
        }
    }
}

TEST_CASE("zero field has undefined frequency") {
    const StripRule rule = make_strip_rule(WeightParam(0.0), 1);
    const FunctionalValues v = functional_suite(constant_field(1, 0.0), rule, 0.5);
    CHECK(v.H == 0.0);
    CHECK_FALSE(v.N.has_value());
    CHECK_FALSE(v.Ntilde.has_value());
}

TEST_CASE("homogeneous caloric polynomials have frequency kappa") {
    for (double a : {-0.5, 0.0, 0.5}) {
        const WeightParam w(a);
        for (int n : {1, 2}) {
            const StripRule rule = make_strip_rule(w, n);
            const Field p2 = polynomial_field(p2_polynomial(n, w));
            const Field p4 = polynomial_field(p4_polynomial(n, w));
            const Field tl = polynomial_field(timelike_polynomial(n, w));
            for (double r : {0.1, 0.7}) {
                CHECK(*functional_suite(p2, rule, r).N == doctest::Approx(2.0).epsilon(1e-10));
                CHECK(*functional_suite(p4, rule, r).N == doctest::Approx(4.0).epsilon(1e-10));
                CHECK(*functional_suite(tl, rule, r).N == doctest::Approx(2.0).epsilon(1e-10));
                const FunctionalValues v = functional_suite(p2, rule, r);
                // the defining form and the Dirichlet form agree without a source
                CHECK(v.I_z == doctest::Approx(v.I).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("H scales like r^{2 kappa}") {
    const WeightParam w(0.25);
    const StripRule rule = make_strip_rule(w, 1);
    const Field p4 = polynomial_field(p4_polynomial(1, w));
    const double h1 = functional_suite(p4, rule, 0.2).H;
    const double h2 = functional_suite(p4, rule, 0.4).H;
    CHECK(h2 / h1 == doctest::Approx(256.0).epsilon(1e-11));
}

TEST_CASE("H of x^2 by hand") {
    // x^2 - y^2 at a = 0, n = 1: E[(x^2 - y^2)^2] with x, y ~ N(0, 2|t|), y folded, averaged over t
    // E x^4 = 12 t^2, E x^2 y^2 = 4 t^2, E y^4 = 12 t^2 -> 16 t^2; (1/r^2) int_0^{r^2} 16 t^2 dt = 16 r^4 / 3
    const WeightParam w(0.0);
    const StripRule rule = make_strip_rule(w, 1);
    const Field p2 = polynomial_field(p2_polynomial(1, w));
    const double r = 0.6;
    CHECK(functional_suite(p2, rule, r).H == doctest::Approx(16.0 * std::pow(r, 4) / 3.0).epsilon(1e-12));
}

TEST_CASE("regular profile has frequency 3/2") {
    const WeightParam w(0.0);
    const Preset p = make_preset("regular-a0", 1, w);
    QuadratureOrders q;
    q.hermite = 64;
    q.laguerre = 64;
    const StripRule rule = make_strip_rule(w, 1, q);
    for (double r : {0.05, 0.3}) {
        const FunctionalValues v = functional_suite(p.analytic, rule, r);
        // the singular gradient limits the Gauss rule accuracy
        CHECK(*v.N == doctest::Approx(1.5).epsilon(2e-3));
    }
}

TEST_CASE("almgren phi") {
    const WeightParam w(0.0);
    const StripRule rule = make_strip_rule(w, 1);
    const Field p2 = polynomial_field(p2_polynomial(1, w));
    const std::vector<double> radii = radius_ladder(0.5, 8);
    std::vector<double> H;
    for (double r : radii) H.push_back(functional_suite(p2, rule, r).H);

    SUBCASE("p2 inside E with C = 0") {
        const PhiResult res = almgren_phi(radii, H, 4.0, 0.5, 0.0);
        for (std::size_t k = 0; k < radii.size(); ++k) {
            CHECK(res.in_E[k]);
            CHECK(res.phi[k] == doctest::Approx(2.0).epsilon(1e-9));
        }
    }
    SUBCASE("outside E equals ell - 1 + sigma") {
        std::vector<double> tiny(H.size(), 0.0);
        const PhiResult res = almgren_phi(radii, tiny, 4.0, 0.5, 0.0);
        for (std::size_t k = 0; k < radii.size(); ++k) {
            CHECK_FALSE(res.in_E[k]);
            CHECK(res.phi[k] == doctest::Approx(3.5).epsilon(1e-9));
        }
    }
    SUBCASE("C fit") {
        const PhiFit fit = fit_phi_constant(radii, H, 4.0, 0.5);
        REQUIRE(fit.C.has_value());
        CHECK(*fit.C == 0.0);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(almgren_phi({0.1, 0.2}, {1.0, 1.0}, 4.0, 0.5, 0.0), DomainError);
        CHECK_THROWS_AS(almgren_phi(radii, H, 1.5, 0.5, 0.0), DomainError);
    }
}

TEST_CASE("weiss and monneau") {
    const WeightParam w(0.0);
    const StripRule rule = make_strip_rule(w, 1);
    const FloatPolynomial q2 = p2_polynomial(1, w);
    const Field p2 = polynomial_field(q2);
    const FunctionalValues v = functional_suite(p2, rule, 0.4);
    CHECK(std::abs(weiss(v, 2.0)) < 1e-12);
    CHECK(weiss(v, 2.0) == doctest::Approx(*weiss_from_frequency(v, 2.0)).epsilon(1e-10));
    CHECK(weiss(v, 1.0) == doctest::Approx(*weiss_from_frequency(v, 1.0)).epsilon(1e-10));

    // U = p2 + 0.1 p4: M_2 = 0.01 H(p4, r) / r^4 = 0.01 H(p4, 1) r^4
    const FloatPolynomial q4 = p4_polynomial(1, w);
    Exponents zero;
    const Field U = polynomial_field(q2 + q4 * FloatPolynomial::monomial(1, zero, 0.1));
    const double h41 = functional_suite(polynomial_field(q4), rule, 1.0).H;
    for (double r : {0.2, 0.5}) {
        CHECK(monneau(U, q2, w, 2, r, rule) == doctest::Approx(0.01 * h41 * std::pow(r, 4)).epsilon(1e-10));
    }
    // a polynomial that is negative on the thin space is rejected
    const FloatPolynomial neg = q2 * FloatPolynomial::monomial(1, zero, -1.0);
    CHECK_THROWS_AS(monneau(U, neg, w, 2, 0.3, rule), DomainError);
}

TEST_CASE("frequency profile csv") {
    const WeightParam w(0.0);
    const StripRule rule = make_strip_rule(w, 1);
    ProfileSpec spec;
    spec.radii = radius_ladder(0.4, 5);
    spec.kappa = 2;
    spec.p_kappa = p2_polynomial(1, w);
    const FrequencyProfile prof = frequency_profile(polynomial_field(p2_polynomial(1, w)), w, spec, rule);
    REQUIRE(prof.rows.size() == 5);
    CHECK(prof.phi_monotone);
    for (const auto& r : prof.rows) {
        CHECK(*r.N == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(std::abs(*r.M) < 1e-20);
    }
    const std::string csv = profile_csv(prof);
    CHECK(csv.rfind("r,H,D,I,N,Ntilde,Phi,W,M,trunc_err\n", 0) == 0);
}

TEST_CASE("first variation identities") {
    for (double a : {-0.4, 0.0, 0.6}) {
        const WeightParam w(a);
        const StripRule rule = make_strip_rule(w, 1);
        // U = (1 + t) p2 solves the equation with F = p2
        const Preset p = make_preset("manufactured", 1, w);
        const VariationReport rep = variation_checks(p.analytic, rule, 0.5);
        CHECK(rep.H_defect < 1e-6);
        CHECK(rep.D_defect < 1e-6);
        CHECK(rep.I_defect < 1e-6);
        // the slice identity holds for solutions with F = 0
        const VariationReport rq = variation_checks(polynomial_field(p4_polynomial(1, w)), rule, 0.5);
        CHECK(rq.slice_defect < 1e-10);
        CHECK(rq.one_plus_N == doctest::Approx(5.0).epsilon(1e-10));
    }
}

TEST_CASE("grid fields: refusal, rescaling") {
    const WeightParam w(0.0);
    const StripRule rule = make_strip_rule(w, 1);
    HalfGrid g;
    g.nx = 33;
    g.ny = 17;
    g.nt = 17;
    auto U = std::make_shared<ScalarField>(g, w);
    const FloatPolynomial q = p2_polynomial(1, w);
    U->fill([&](const SpacePoint& X, double t) { return q.evaluate(X, t); });

    // extent 1 < 8.6 r for r = 0.2
    CHECK_THROWS_AS(functional_suite(grid_field(U), rule, 0.2), DomainError);
    // an analytic exterior lifts the refusal
    U->set_exterior([&q](const SpacePoint& X, double t) { return q.evaluate(X, t); });
    const FunctionalValues v = functional_suite(grid_field(U), rule, 0.2);
    CHECK(*v.N == doctest::Approx(2.0).epsilon(1e-6));

    const ScalarField R = rescale(*U, 0.2, RescaleMode::almgren, rule);
    auto Rs = std::make_shared<ScalarField>(R);
    CHECK(functional_suite(grid_field(Rs), rule, 1.0).H == doctest::Approx(1.0).epsilon(1e-9));

    const ScalarField K = rescale(*U, 0.5, RescaleMode::homogeneous, rule, 2.0, &g);
    // p2 is 2-homogeneous so the homogeneous rescaling leaves interior nodes unchanged
    CHECK(K.at(8, 16, 0, 4) == doctest::Approx(U->at(8, 16, 0, 4)).epsilon(1e-12));
}
