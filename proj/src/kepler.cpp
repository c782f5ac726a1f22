#include "roctb/kepler.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "roctb/detail/rootfind.hpp"
#include "roctb/errors.hpp"

namespace roctb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAnomalyTol = 1e-13;

// u - sin u without cancellation for small u.
double u_minus_sin(double u) {
    if (std::abs(u) >= 1.0) return u - std::sin(u);
    const double u2 = u * u;
    double term = u * u2 / 6.0;
    double sum = term;
    for (int k = 1; k < 20; ++k) {
        term *= -u2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// sinh F - F, same idea.
double sinh_minus(double f) {
    if (std::abs(f) >= 1.0) return std::sinh(f) - f;
    const double f2 = f * f;
    double term = f * f2 / 6.0;
    double sum = term;
    for (int k = 1; k < 20; ++k) {
        term *= f2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Solves u - sin u = M for M in [0, pi]. The cube-root guess is exact to
// leading order at the collision, where the equation degenerates.
double solve_elliptic_anomaly(double M) {
    if (M == 0.0) return 0.0;
    const double guess = std::min(std::cbrt(6.0 * M), kPi);
    const auto f = [M](double u) { return u_minus_sin(u) - M; };
    const auto df = [](double u) {
        const double s = std::sin(0.5 * u);
        return 2.0 * s * s;
    };
    return detail::safeguarded_newton(f, df, 0.0, kPi, guess, kAnomalyTol).x;
}

double solve_hyperbolic_anomaly(double M) {
    if (M == 0.0) return 0.0;
    double hi = std::max(1.0, std::min(std::cbrt(6.0 * M), std::log(2.0 * M + 1.0) + 1.0));
    const auto f = [M](double F) { return sinh_minus(F) - M; };
    while (f(hi) < 0.0) hi *= 2.0;
    const auto df = [](double F) {
        const double s = std::sinh(0.5 * F);
        return 2.0 * s * s;
    };
    const double guess = std::min(std::cbrt(6.0 * M), hi);
    return detail::safeguarded_newton(f, df, 0.0, hi, guess, kAnomalyTol).x;
}

}  // namespace

RadialState kepler_radius(double mu, double energy, double t) {
    if (!(mu > 0.0)) throw DomainError("kepler_radius: mu must be positive");
    const double s = std::abs(t);
    const double sign = t < 0.0 ? -1.0 : 1.0;
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (s == 0.0) return {0.0, inf, -inf};

    double r = 0.0;
    double speed = 0.0;
    if (energy == 0.0) {
        r = std::cbrt(4.5 * mu) * std::pow(s, 2.0 / 3.0);
        speed = 2.0 * r / (3.0 * s);
    } else if (energy < 0.0) {
        const double a = mu / (-2.0 * energy);
        const double n = std::sqrt(mu / (a * a * a));
        const double t_apo = kPi / n;
        if (s >= 2.0 * t_apo) {
            throw DomainError("kepler_radius: |t| outside the collision-to-collision window");
        }
        const double M = n * s;
        // Beyond apoapsis use (2 pi - u) - sin(2 pi - u) = 2 pi - (u - sin u).
        const bool outbound = M <= kPi;
        const double u = solve_elliptic_anomaly(outbound ? M : 2.0 * kPi - M);
        const double half = std::sin(0.5 * u);
        r = 2.0 * a * half * half;
        speed = std::sqrt(mu / a) * std::cos(0.5 * u) / half;
        if (!outbound) speed = -speed;
    } else {
        const double a = mu / (2.0 * energy);
        const double n = std::sqrt(mu / (a * a * a));
        const double F = solve_hyperbolic_anomaly(n * s);
        const double half = std::sinh(0.5 * F);
        r = 2.0 * a * half * half;
        speed = std::sqrt(mu / a) * std::cosh(0.5 * F) / half;
    }
    return {r, sign * speed, -mu / (r * r)};
}

KeplerArc::KeplerArc(double mu, double energy) : mu_(mu), energy_(energy) {
    if (!(mu > 0.0)) throw DomainError("KeplerArc: mu must be positive");
    if (!std::isfinite(energy)) throw DomainError("KeplerArc: energy must be finite");
    if (energy < 0.0) {
        const double a = mu / (-2.0 * energy);
        t_apo_ = kPi * std::sqrt(a * a * a / mu);
    }
}

std::optional<double> KeplerArc::apoapsis_radius() const noexcept {
    if (energy_ >= 0.0) return std::nullopt;
    return -mu_ / energy_;
}

double KeplerArc::validity_half_window() const noexcept {
    return t_apo_ ? 2.0 * *t_apo_ : std::numeric_limits<double>::infinity();
}

KeplerArc arc_from_apoapsis(double mu, double R) {
    if (!(mu > 0.0) || !(R > 0.0)) throw DomainError("arc_from_apoapsis: mu and R must be positive");
    return KeplerArc(mu, -mu / R);
}

TimedArc arc_from_boundary(double mu, double R, double v) {
    if (!(mu > 0.0) || !(R > 0.0)) throw DomainError("arc_from_boundary: mu and R must be positive");
    const double energy = 0.5 * v * v - mu / R;
    KeplerArc arc(mu, energy);
    double T = 0.0;
    if (energy == 0.0) {
        if (v > 0.0) throw DomainError("arc_from_boundary: outgoing parabolic state never collides");
        T = std::sqrt(2.0 * R * R * R / (9.0 * mu));
    } else if (energy < 0.0) {
        const double a = mu / (-2.0 * energy);
        const double n = std::sqrt(mu / (a * a * a));
        const double u = 2.0 * std::asin(std::min(1.0, std::sqrt(R / (2.0 * a))));
        const double t_in = u_minus_sin(u) / n;
        // Moving outward at -T: apoapsis first, then the fall.
        T = v > 0.0 ? 2.0 * *arc.t_apoapsis() - t_in : t_in;
    } else {
        if (v > 0.0) throw DomainError("arc_from_boundary: outgoing hyperbolic state never collides");
        const double a = mu / (2.0 * energy);
        const double n = std::sqrt(mu / (a * a * a));
        const double F = 2.0 * std::asinh(std::sqrt(R / (2.0 * a)));
        T = sinh_minus(F) / n;
    }
    return {arc, T};
}

ExtendedOrbit::ExtendedOrbit(double mu, double T, double psi)
    : base_(mu, -mu / (2.0 * std::cbrt(mu * T * T / (kPi * kPi)))), T_(T), psi_(psi) {
    if (!(T > 0.0)) throw DomainError("ExtendedOrbit: T must be positive");
    if (!(psi > -kPi && psi < kPi)) throw DomainError("ExtendedOrbit: psi must lie in (-pi, pi)");
}

long ExtendedOrbit::interval(double t) const noexcept {
    return static_cast<long>(std::floor(t / (2.0 * T_)));
}

double ExtendedOrbit::ray_angle(long k) const noexcept {
    return kPi - static_cast<double>(k) * psi_;
}

cplx ExtendedOrbit::rotation(long k) const noexcept {
    return std::polar(1.0, -static_cast<double>(k) * psi_);
}

RadialState ExtendedOrbit::radial(double t) const {
    const long k = interval(t);
    double local = t - 2.0 * static_cast<double>(k) * T_;
    if (local < 0.0) local = 0.0;
    if (local > 2.0 * T_) local = 2.0 * T_;
    // The arc is symmetric about its apoapsis at local = T.
    if (local <= T_) return base_.radial(local);
    RadialState st = base_.radial(2.0 * T_ - local);
    st.rdot = -st.rdot;
    return st;
}

cplx ExtendedOrbit::position(double t) const {
    return -radial(t).r * rotation(interval(t));
}

cplx ExtendedOrbit::velocity(double t) const {
    return -radial(t).rdot * rotation(interval(t));
}

ExtendedOrbit extended_orbit(double mu, double T, double psi) { return ExtendedOrbit(mu, T, psi); }

}  // namespace roctb
