#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include <omp.h>

#include "oracles.hpp"
#include "fixtures.hpp"
#include "roctb/action.hpp"
#include "roctb/errors.hpp"
#include "roctb/minimizer.hpp"

using namespace roctb;
using std::numbers::pi;

namespace {

/// Random admissible path: the automatic start between two random rays,
/// jittered.
DiscretePath random_path(std::mt19937_64& rng, int segments) {
    // Angles chosen so the polar interpolation never sweeps across the primary's ray.
    std::uniform_real_distribution<double> left(0.3 * pi, 0.8 * pi), right(-0.15 * pi, 0.3 * pi);
    ProblemConfig c = fixture::ray_problem(left(rng) / pi, right(rng) / pi, segments);
    c.init.jitter = 0.05;
    c.init.seed = rng();
    const TimeGrid g = build_grid(c.t_start, c.t_end, segments, 1.5, SingularEnd::Right);
    return initial_path(c, g);
}

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("constant path action matches adaptive quadrature of U") {
    const FieldParams p = fixture::apo_field();
    const TimeGrid g = build_grid(-1.0, -0.5, 4096, 1.5, SingularEnd::Right);
    const DiscretePath path(g, std::vector<cplx>(4097, cplx(0, 1)), FixedPoint{cplx(0, 1)}, FixedPoint{cplx(0, 1)});
    // Reference primary from the eccentric anomaly directly: a = 1/2, mu = 1,
    // |t| = sqrt(a^3)(u - sin u), r = a(1 - cos u).
    const double a = 0.5;
    const double n = std::sqrt(a * a * a);
    auto u_of = [&](double t) { return oracle::bisect([&](double u) { return n * (u - std::sin(u)) - std::abs(t); }, 0.0, pi); };
    const double u_lo = u_of(-0.5);
    const double u_hi = u_of(-1.0);
    // Change variables to u: dt = n (1 - cos u) du; U(i, t) = 1 + 1/sqrt(1 + r^2).
    auto integrand = [&](double u) {
        const double r = a * (1.0 - std::cos(u));
        return (1.0 + 1.0 / std::sqrt(1.0 + r * r)) * n * (1.0 - std::cos(u));
    };
    const double ref = oracle::simpson(integrand, u_lo, u_hi, 1e-13);
    CHECK(std::abs(discrete_action(path, p) - ref) < 1e-6);
    ActionFunctional::Options free_motion;
    free_motion.potential = false;
    CHECK(ActionFunctional(g, p, free_motion).value(path.samples()) == 0.0);
}

TEST_CASE("free-motion action of a straight line is |dz|^2 / 2L") {
    const FieldParams p = fixture::apo_field();
    const TimeGrid g = build_grid(-1.0, 0.0, 37, 1.7, SingularEnd::Right);
    std::vector<cplx> z(38);
    const cplx z0(1, 2), z1(-0.5, 0.25);
    for (std::size_t k = 0; k < 38; ++k) z[k] = z0 + (z1 - z0) * (g[k] + 1.0);
    ActionFunctional::Options o;
    o.potential = false;
    CHECK(ActionFunctional(g, p, o).value(z) == doctest::Approx(0.5 * std::norm(z1 - z0)).epsilon(1e-14));
}

TEST_CASE("analytic gradient matches central differences on random paths") {
    std::mt19937_64 rng(2024);
    const FieldParams p = fixture::apo_field();
    for (int trial = 0; trial < 10; ++trial) {
        DiscretePath path = random_path(rng, 64);
        const ActionFunctional f(path.grid(), p);
        const std::vector<double> g = f.free_gradient(path);
        const std::vector<double> x = path.free_coordinates();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double h = 1e-7;
            DiscretePath plus = path, minus = path;
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            plus.set_free_coordinates(xp);
            minus.set_free_coordinates(xm);
            const double fd = f.difference(minus.samples(), plus.samples()) / (2.0 * h);
            CHECK(std::abs(g[i] - fd) <= 1e-6 * std::abs(g[i]));
        }
    }
}

TEST_CASE("difference kernel agrees with value differences") {
    std::mt19937_64 rng(5);
    const FieldParams p = fixture::apo_field();
    DiscretePath a = random_path(rng, 100);
    DiscretePath b = random_path(rng, 100);
    const ActionFunctional f(a.grid(), p);
    CHECK(f.difference(a.samples(), b.samples()) ==
          doctest::Approx(f.value(b.samples()) - f.value(a.samples())).epsilon(1e-12));
    CHECK(f.difference(a.samples(), a.samples()) == 0.0);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    std::mt19937_64 rng(99);
    const FieldParams p = fixture::apo_field();
    const DiscretePath path = random_path(rng, 4096);
    const DiscretePath other = random_path(rng, 4096);
    ActionFunctional::Options so, po;
    so.exec = Exec::Serial;
    po.exec = Exec::Parallel;
    const int saved = omp_get_max_threads();
    for (int threads : {1, 3, 4}) {
        omp_set_num_threads(threads);
        const ActionFunctional s(path.grid(), p, so), q(path.grid(), p, po);
        CHECK(bitwise_equal(s.value(path.samples()), q.value(path.samples())));
        CHECK(bitwise_equal(s.difference(path.samples(), other.samples()), q.difference(path.samples(), other.samples())));
        const auto gs = s.node_gradient(path.samples());
        const auto gp = q.node_gradient(path.samples());
        const auto es = s.el_residual(path.samples());
        const auto ep = q.el_residual(path.samples());
        bool same = true;
        for (std::size_t k = 0; k < gs.size(); ++k) same = same && gs[k] == gp[k];
        for (std::size_t k = 0; k < es.size(); ++k) same = same && es[k] == ep[k];
        CHECK(same);
    }
    omp_set_num_threads(saved);
}

TEST_CASE("action is invariant under conjugation of path and rays") {
    std::mt19937_64 rng(17);
    const FieldParams p = fixture::apo_field();
    for (int trial = 0; trial < 5; ++trial) {
        const DiscretePath path = random_path(rng, 200);
        const DiscretePath c = path.conjugated();
        CHECK(discrete_action(path, p) == doctest::Approx(discrete_action(c, p)).epsilon(1e-14));
        const auto g = action_gradient(path, p);
        const auto gc = action_gradient(c, p);
        REQUIRE(g.size() == gc.size());
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(std::abs(g[i]) - std::abs(gc[i])) < 1e-12);
    }
}

TEST_CASE("EL residual vanishes for free motion on a line") {
    const FieldParams p = fixture::apo_field();
    const TimeGrid g = build_grid(-1.0, 0.0, 64, 1.5, SingularEnd::Right);
    std::vector<cplx> z(65);
    for (std::size_t k = 0; k < 65; ++k) z[k] = cplx(1, 1) + cplx(0.3, -0.2) * g[k];
    ActionFunctional::Options o;
    o.potential = false;
    // Rounding in the second difference scales like eps / dt_min^2.
    for (const cplx& r : ActionFunctional(g, p, o).el_residual(z)) CHECK(std::abs(r) < 1e-9);
}

TEST_CASE("singular paths raise SingularityError") {
    const FieldParams p = fixture::apo_field();
    const TimeGrid g = build_grid(-1.0, 0.0, 4, 1.5, SingularEnd::Right);
    const DiscretePath through_center(g, std::vector<cplx>(5, cplx(0, 0)), FixedPoint{cplx(0, 0)}, Origin{});
    CHECK_THROWS_AS(discrete_action(through_center, p), SingularityError);
}
