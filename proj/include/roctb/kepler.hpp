#pragma once

// Rectilinear collision Kepler orbits for the primary q(t).
//
// The primary falls into the center along the negative real axis, collides
// at t = 0 and is ejected back along the same ray, so |q(t)| = |q(-t)|.
// Radii are stored as positive scalars; the direction e^{i pi} is applied
// only when a complex position is requested.

#include <complex>
#include <optional>

namespace roctb {

using cplx = std::complex<double>;

/// Radius and its first two time derivatives.
struct RadialState {
    double r;
    double rdot;
    double rddot;
};

/// Radius of the rectilinear orbit with gravitational parameter `mu` and
/// specific energy `energy` that collides at t = 0.
///
/// Elliptic (E < 0): r = a(1 - cos u), t = sqrt(a^3/mu)(u - sin u).
/// Parabolic (E = 0): r = (9 mu / 2)^{1/3} |t|^{2/3}.
/// Hyperbolic (E > 0): r = a(cosh F - 1), t = sqrt(a^3/mu)(sinh F - F).
///
/// Throws DomainError for mu <= 0 or, when E < 0, |t| >= one full
/// collision-to-collision period. Throws NumericalFailure if the anomaly
/// solve stalls. At t = 0 the returned speed is infinite.
RadialState kepler_radius(double mu, double energy, double t);

class KeplerArc {
public:
    KeplerArc(double mu, double energy);

    double mu() const noexcept { return mu_; }
    double energy() const noexcept { return energy_; }

    /// Collision-to-apoapsis time, present only for E < 0.
    std::optional<double> t_apoapsis() const noexcept { return t_apo_; }
    std::optional<double> apoapsis_radius() const noexcept;

    /// Largest |t| accepted by radial(); infinite for E >= 0.
    double validity_half_window() const noexcept;

    RadialState radial(double t) const { return kepler_radius(mu_, energy_, t); }
    double radius(double t) const { return radial(t).r; }

    cplx direction() const noexcept { return {-1.0, 0.0}; }
    cplx position(double t) const { return -radius(t); }
    cplx velocity(double t) const { return -radial(t).rdot; }

private:
    double mu_;
    double energy_;
    std::optional<double> t_apo_;
};

/// Elliptic arc whose apoapsis radius is R: E = -mu/R and
/// T = pi sqrt(R^3 / (8 mu)).
KeplerArc arc_from_apoapsis(double mu, double R);

struct TimedArc {
    KeplerArc arc;
    double time_to_collision;
};

/// Arc through radius R with radial velocity v (v < 0 means falling in),
/// shifted so the collision that follows sits at t = 0. The returned
/// time_to_collision is T with |q(-T)| = R.
TimedArc arc_from_boundary(double mu, double R, double v);

/// Gordon-type extended collision orbit: collisions at t = 2kT, and on
/// (2kT, 2(k+1)T) the primary moves on the ray of angle pi - k psi with
/// apoapsis (zero velocity) at t = (2k+1)T.
class ExtendedOrbit {
public:
    ExtendedOrbit(double mu, double T, double psi);

    const KeplerArc& base() const noexcept { return base_; }
    double psi() const noexcept { return psi_; }
    double half_period() const noexcept { return T_; }

    /// k with t in [2kT, 2(k+1)T).
    long interval(double t) const noexcept;
    double ray_angle(long k) const noexcept;
    /// e^{-i k psi}
    cplx rotation(long k) const noexcept;

    /// Radial state relative to the most recent collision.
    RadialState radial(double t) const;
    cplx position(double t) const;
    cplx velocity(double t) const;

private:
    KeplerArc base_;
    double T_;
    double psi_;
};

ExtendedOrbit extended_orbit(double mu, double T, double psi);

}  // namespace roctb
