#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "roctb/errors.hpp"
#include "roctb/path.hpp"
#include "roctb/potential.hpp"

using namespace roctb;
using std::numbers::pi;

namespace {
FieldParams apo_field(double mu = 1.0, double m = 1.0) { return {mu, m, arc_from_apoapsis(mu, 1.0)}; }
}  // namespace

TEST_CASE("potential grows with the angle from the primary's opposite ray") {
    const FieldParams p = apo_field();
    for (double r : {0.2, 1.0, 3.0}) {
        for (double t : {-1.0, -0.3, -0.01}) {
            CHECK(potential_U(p, std::polar(r, 0.3), t) < potential_U(p, std::polar(r, 1.2), t));
            CHECK(angular_monotonicity_check(p, r, t, 181));
        }
    }
}

TEST_CASE("force is the gradient of the potential") {
    const FieldParams p(1.3, 0.7, arc_from_apoapsis(1.3, 1.0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const cplx z(u(rng), u(rng));
        const double t = -0.9 * std::abs(u(rng)) / 2.0 - 0.05;
        const double h = 1e-6;
        const double gx = (potential_U(p, z + h, t) - potential_U(p, z - h, t)) / (2 * h);
        const double gy = (potential_U(p, z + cplx(0, h), t) - potential_U(p, z - cplx(0, h), t)) / (2 * h);
        const cplx f = force(p, z, t);
        const double scale = std::abs(f) + 1.0;
        CHECK(std::abs(f.real() - gx) < 1e-6 * scale);
        CHECK(std::abs(f.imag() - gy) < 1e-6 * scale);
    }
}

TEST_CASE("singular evaluations throw") {
    const FieldParams p = apo_field();
    CHECK_THROWS_AS(potential_U(p, 0.0, -0.5), SingularityError);
    CHECK_THROWS_AS(force(p, p.primary(-0.5), -0.5), SingularityError);
}

TEST_CASE("graded grid hits its endpoints and spacing law") {
    const TimeGrid g = build_grid(-1.0, 0.0, 1000, 1.5, SingularEnd::Right);
    CHECK(g.segments() == 1000);
    CHECK(g.t_start() == -1.0);
    CHECK(g.t_end() == 0.0);
    CHECK(g.dt(999) == doctest::Approx(std::pow(1000.0, -1.5)).epsilon(1e-10));
    for (std::size_t k = 1; k < 1000; ++k) CHECK(g.dt(k) < g.dt(k - 1));

    const TimeGrid l = build_grid(0.0, 2.0, 64, 2.0, SingularEnd::Left);
    CHECK(l.dt(0) == doctest::Approx(2.0 / (64.0 * 64.0)).epsilon(1e-12));
    CHECK(l.dt(63) > l.dt(62));
}

TEST_CASE("reflected grid is symmetric about its midpoint") {
    GridSpec spec{0.0, 1.0, 50, 1.5, SingularEnd::Left, true};
    const TimeGrid g(spec);
    REQUIRE(g.segments() == 100);
    CHECK(g.t_end() == 2.0);
    for (std::size_t j = 0; j <= 50; ++j) CHECK(g[100 - j] == 2.0 - g[j]);
}

TEST_CASE("free coordinates round-trip and respect boundary kinds") {
    const TimeGrid g = build_grid(-1.0, 0.0, 8, 1.5, SingularEnd::Right);
    std::vector<cplx> z(9);
    for (std::size_t k = 0; k < 9; ++k) z[k] = cplx(1.0 + 0.1 * k, 0.2 * k);
    z[0] = std::polar(1.0, 0.7 * pi);
    DiscretePath path(g, z, Ray{0.75 * pi}, Origin{});
    CHECK(path.free_count() == 1 + 2 * 7);
    CHECK(path[8] == cplx(0.0, 0.0));
    CHECK(std::abs(std::arg(path[0]) - 0.75 * pi) < 1e-15);
    auto x = path.free_coordinates();
    x[0] = 2.5;
    path.set_free_coordinates(x);
    CHECK(path.left_radius() == 2.5);
    CHECK(std::abs(path[0] - std::polar(2.5, 0.75 * pi)) < 1e-15);

    DiscretePath fixed(g, z, FixedPoint{cplx(1, 1)}, Ray{0.0});
    CHECK(fixed.free_count() == 2 * 7 + 1);
    CHECK(fixed[0] == cplx(1, 1));
}

TEST_CASE("conjugated path negates ray angles") {
    const TimeGrid g = build_grid(-1.0, 0.0, 4, 1.5, SingularEnd::Right);
    std::vector<cplx> z{cplx(1, 1), cplx(1, 0.5), cplx(1, 0.2), cplx(1, 0.1), cplx(1, 0)};
    const DiscretePath p(g, z, Ray{0.25 * pi}, Ray{0.0});
    const DiscretePath c = p.conjugated();
    CHECK(std::get<Ray>(c.left()).angle == -0.25 * pi);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(c[k] == std::conj(p[k]));
}

TEST_CASE("format_double round-trips and CSV paths are exact") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(format_double(v)) == v);
    }
    const TimeGrid g = build_grid(-1.0, 0.0, 16, 1.5, SingularEnd::Right);
    std::vector<cplx> z(17);
    for (std::size_t k = 0; k < 17; ++k) z[k] = std::polar(1.0 + u(rng) / 1e3, u(rng));
    const DiscretePath p(g, z, FixedPoint{z[0]}, FixedPoint{z[16]});
    std::stringstream ss;
    write_path_csv(ss, p);
    const PathSamples back = read_path_csv(ss);
    REQUIRE(back.t.size() == 17);
    for (std::size_t k = 0; k < 17; ++k) {
        CHECK(back.t[k] == g[k]);
        CHECK(back.z[k] == p[k]);
    }
}
