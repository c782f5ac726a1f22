#pragma once

#include <variant>

#include "roctb/kepler.hpp"

namespace roctb {

using PrimaryOrbit = std::variant<KeplerArc, ExtendedOrbit>;

cplx primary_position(const PrimaryOrbit& orbit, double t);
cplx primary_velocity(const PrimaryOrbit& orbit, double t);
RadialState primary_radial(const PrimaryOrbit& orbit, double t);

/// Masses of the fixed center and the moving primary, and the primary's motion.
struct FieldParams {
    double mu;
    double m;
    PrimaryOrbit orbit;

    FieldParams(double mu, double m, PrimaryOrbit orbit);

    cplx primary(double t) const { return primary_position(orbit, t); }
};

/// Distances below this raise SingularityError.
inline constexpr double kSingularDistance = 1e-300;

/// U(z, t) = mu/|z| + m/|z - q|, with q already evaluated.
double potential_at(double mu, double m, cplx z, cplx q, double t = 0.0);
/// Gradient of U in z: -mu z/|z|^3 - m (z - q)/|z - q|^3.
cplx force_at(double mu, double m, cplx z, cplx q, double t = 0.0);

double potential_U(const FieldParams& params, cplx z, double t);
cplx force(const FieldParams& params, cplx z, double t);

/// Samples U(r e^{i theta}, t) on `grid` angles over [-pi, pi], measured from
/// the direction opposite the primary, and reports whether U is
/// nondecreasing in |theta| (strictly increasing when q(t) != 0).
bool angular_monotonicity_check(const FieldParams& params, double r, double t, int grid);

}  // namespace roctb
