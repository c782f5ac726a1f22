#include "roctb/potential.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "roctb/errors.hpp"

namespace roctb {

cplx primary_position(const PrimaryOrbit& orbit, double t) {
    return std::visit([t](const auto& o) { return o.position(t); }, orbit);
}

cplx primary_velocity(const PrimaryOrbit& orbit, double t) {
    return std::visit([t](const auto& o) { return o.velocity(t); }, orbit);
}

RadialState primary_radial(const PrimaryOrbit& orbit, double t) {
    return std::visit([t](const auto& o) { return o.radial(t); }, orbit);
}

FieldParams::FieldParams(double mu_, double m_, PrimaryOrbit orbit_)
    : mu(mu_), m(m_), orbit(std::move(orbit_)) {
    if (!(mu > 0.0) || !(m > 0.0)) throw DomainError("FieldParams: masses must be positive");
}

double potential_at(double mu, double m, cplx z, cplx q, double t) {
    const double rc = std::abs(z);
    if (rc < kSingularDistance) throw SingularityError(Body::Center, t);
    const double rq = std::abs(z - q);
    if (rq < kSingularDistance) throw SingularityError(Body::Primary, t);
    return mu / rc + m / rq;
}

cplx force_at(double mu, double m, cplx z, cplx q, double t) {
    const double rc = std::abs(z);
    if (rc < kSingularDistance) throw SingularityError(Body::Center, t);
    const cplx d = z - q;
    const double rq = std::abs(d);
    if (rq < kSingularDistance) throw SingularityError(Body::Primary, t);
    return -(mu / (rc * rc * rc)) * z - (m / (rq * rq * rq)) * d;
}

double potential_U(const FieldParams& params, cplx z, double t) {
    return potential_at(params.mu, params.m, z, params.primary(t), t);
}

cplx force(const FieldParams& params, cplx z, double t) {
    return force_at(params.mu, params.m, z, params.primary(t), t);
}

bool angular_monotonicity_check(const FieldParams& params, double r, double t, int grid) {
    if (!(r > 0.0) || grid < 3) throw DomainError("angular_monotonicity_check: need r > 0 and grid >= 3");
    const double rho = std::abs(params.primary(t));
    // Polar form keeps the rho = 0 case exactly angle independent.
    const auto U = [&](double theta) {
        const double d2 = r * r + rho * rho + 2.0 * r * rho * std::cos(theta);
        return params.mu / r + params.m / std::sqrt(d2);
    };
    const bool strict = rho > 0.0;
    std::vector<double> values(static_cast<std::size_t>(grid));
    std::vector<double> angles(values.size());
    for (int j = 0; j < grid; ++j) {
        angles[j] = -std::numbers::pi + 2.0 * std::numbers::pi * j / (grid - 1);
        values[j] = U(angles[j]);
    }
    for (int j = 0; j + 1 < grid; ++j) {
        // Walking toward theta = 0 on the negative side, away from it on the positive side.
        const bool away = std::abs(angles[j + 1]) > std::abs(angles[j]);
        const double inner = away ? values[j] : values[j + 1];
        const double outer = away ? values[j + 1] : values[j];
        if (std::abs(angles[j + 1]) == std::abs(angles[j])) {
            if (values[j] != values[j + 1]) return false;
            continue;
        }
        if (strict ? !(outer > inner) : !(outer >= inner)) return false;
    }
    return true;
}

}  // namespace roctb
