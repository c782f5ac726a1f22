#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "roctb/errors.hpp"
#include "roctb/roots.hpp"

using namespace roctb;
using std::numbers::pi;

TEST_CASE("h at hand-checked points") {
    CHECK(eval_h(1.0, 0.0, 1.0) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(eval_h(2.0, pi, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(h_at_pi(2.0, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(eval_h(1.0, pi, 1.0), SingularityError);
}

TEST_CASE("h agrees with the direct formula off the axes") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.05, 4.0), ut(-3.0, 3.0), ur(0.1, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double a = ua(rng), th = ut(rng), r = ur(rng);
        CHECK(eval_h(a, th, r) == doctest::Approx(oracle::h_direct(a, th, r)).epsilon(1e-12));
    }
}

TEST_CASE("dh/da matches a central difference") {
    for (double th : {0.0, 0.4, 2.0, pi}) {
        for (double a : {0.3, 1.5, 2.5}) {
            const double h = 1e-6;
            const double fd = (eval_h(a + h, th, 1.3) - eval_h(a - h, th, 1.3)) / (2 * h);
            CHECK(dh_da(a, th, 1.3) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("root triples match a sign-scan oracle") {
    for (double r : {0.5, 1.0, 2.0}) {
        const RootTriple t = find_alphas(r);
        CHECK(t.alpha1 < 1.0);
        CHECK(1.0 < t.alpha2);
        CHECK(t.alpha2 < t.alpha3);
        CHECK(std::abs(h_at_pi(t.alpha1, r)) < 1e-12);
        CHECK(std::abs(h_at_zero(t.alpha2, r)) < 1e-12);
        CHECK(std::abs(h_at_pi(t.alpha3, r)) < 1e-12);
        const auto pi_roots_in = oracle::scan_roots([r](double a) { return oracle::h_direct(a, pi, r); }, 1e-3, 0.999, 100000);
        const auto zero_roots = oracle::scan_roots([r](double a) { return oracle::h_direct(a, 0.0, r); }, 1.0, 5.0, 100000);
        const auto pi_roots_out = oracle::scan_roots([r](double a) { return oracle::h_direct(a, pi, r); }, 1.001, 5.0, 100000);
        REQUIRE(pi_roots_in.size() == 1);
        REQUIRE(zero_roots.size() == 1);
        REQUIRE(pi_roots_out.size() == 1);
        CHECK(std::abs(t.alpha1 - pi_roots_in[0]) < 1e-10);
        CHECK(std::abs(t.alpha2 - zero_roots[0]) < 1e-10);
        CHECK(std::abs(t.alpha3 - pi_roots_out[0]) < 1e-10);
    }
}

TEST_CASE("equal-mass regression values") {
    const RootTriple t = find_alphas(1.0);
    CHECK(t.alpha1 == doctest::Approx(0.484875361640).epsilon(1e-11));
    CHECK(t.alpha2 == doctest::Approx(1.08302480386).epsilon(1e-11));
    CHECK(t.alpha3 == doctest::Approx(1.81382388263).epsilon(1e-11));
}

TEST_CASE("outer roots grow with the mass ratio") {
    double prev2 = 1.0, prev3 = 1.0;
    for (double r : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
        const RootTriple t = find_alphas(r);
        CHECK(t.alpha2 > prev2);
        CHECK(t.alpha3 > prev3);
        prev2 = t.alpha2;
        prev3 = t.alpha3;
    }
    CHECK_THROWS_AS(find_alphas(0.0), DomainError);
    CHECK_THROWS_AS(find_alphas(-1.0), DomainError);
}

TEST_CASE("coercivity constant") {
    CHECK(coercivity_constant(pi / 2, 0.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(coercivity_constant(0.3, 0.3), DomainError);
    CHECK(coercivity_constant(pi, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(coercivity_constant(0.75 * pi, 0.25 * pi) == doctest::Approx(0.5));
}

TEST_CASE("angular decay exponent solves its quadratic") {
    for (double r : {0.5, 1.0, 3.0}) {
        const double a = find_alphas(r).alpha2;
        const double b = angular_decay_exponent(a, r);
        const double c = (2.0 / 9.0) * r / (a * std::pow(1.0 + a, 3));
        CHECK(b > 0.0);
        CHECK(b * (b + 1.0 / 3.0) == doctest::Approx(c).epsilon(1e-14));
    }
    CHECK(angular_decay_exponent(find_alphas(1.0).alpha2, 1.0) == doctest::Approx(0.05801).epsilon(1e-3));
    CHECK_THROWS_AS(angular_decay_exponent(0.0, 1.0), DomainError);
}
