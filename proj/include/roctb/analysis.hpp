#pragma once

// Post-hoc diagnostics on computed trajectories.
//
// Every time derivative here uses the stencils of the discrete
// Euler-Lagrange residual: the three-point nonuniform central difference for
// first derivatives (three-point one-sided at the ends) and the nonuniform
// second difference 2[(y+ - y)/dt+ - (y - y-)/dt-]/(dt+ + dt-).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roctb/path.hpp"
#include "roctb/potential.hpp"

namespace roctb {

std::vector<double> first_derivative(std::span<const double> t, std::span<const double> y);
std::vector<cplx> first_derivative(std::span<const double> t, std::span<const cplx> y);
/// Interior nodes only; entries 0 and N are NaN.
std::vector<double> second_derivative(std::span<const double> t, std::span<const double> y);

struct PowerLawFit {
    double exponent;
    double prefactor;
    double t_lo;
    double t_hi;
    double rms_log_residual;
    std::size_t samples;
};

/// Least-squares line through (log|t|, log r) for |t| in [t_lo, t_hi].
/// Throws DomainError with fewer than 8 samples or a nonpositive radius.
PowerLawFit fit_power_law(std::span<const double> times, std::span<const double> radii, double t_lo, double t_hi);

/// Window of distances |t - t_singular| from the singular endpoint.
struct Window {
    double lo;
    double hi;
};

/// [10 t_min, 100 t_min], t_min the smallest nonzero distance of a node from
/// the grid's singular endpoint.
Window innermost_decade(const TimeGrid& grid);

struct LimitEstimate {
    double value;   // mean over the window
    double spread;  // max - min over the window
    std::size_t samples;
};

struct RatioSeries {
    std::vector<double> times;
    std::vector<double> a;  // r / |q|
    std::vector<double> b;  // r' / |q|'
    std::vector<double> c;  // r'' / |q|''
    LimitEstimate a_limit;
    LimitEstimate b_limit;
    LimitEstimate c_limit;
};

/// Ratios of |z| and its derivatives to those of |q| at interior nodes where
/// they are defined. Requires an Origin endpoint at the primary's collision.
RatioSeries ratio_limits(const DiscretePath& path, const PrimaryOrbit& orbit, std::optional<Window> window = {});

enum class ThetaVerdict { ConstantZero, ConstantPi, MonotoneDecreasing, MonotoneIncreasing, Unimodal, Other };

std::string to_string(ThetaVerdict v);

struct ThetaProfile {
    std::vector<double> times;
    std::vector<double> theta;  // unwrapped, nonzero samples only
    ThetaVerdict verdict;
    double theta_min;
    double t_min;
    /// Mean of theta over the innermost decade at the singular end.
    LimitEstimate limit_mean;
    /// theta* from theta = theta* + C s^beta over the same window. With a
    /// known beta this is a linear fit; otherwise beta is read off the slope
    /// of log|s dtheta/ds| against log s.
    double limit_extrapolated;
    /// Measured slope of log|theta - theta*| against log s when beta is
    /// supplied (a consistency check on it); the fitted beta otherwise.
    double decay_exponent;
};

/// Throws DomainError("mesh too coarse") when adjacent samples differ by
/// more than pi/2 after unwrapping.
ThetaProfile theta_profile(const DiscretePath& path, std::optional<Window> window = {},
                           std::optional<double> exponent = {});

/// J = z x z' (= r^2 theta') at every node.
std::vector<double> angular_momentum(const DiscretePath& path);

struct VelocityArgument {
    std::vector<double> times;
    std::vector<double> theta_d;  // unwrapped; NaN where the velocity vanishes
    std::size_t gaps;
    /// Mean of |theta - theta_d| over the innermost decade.
    LimitEstimate gap_to_position;
};

VelocityArgument velocity_argument(const DiscretePath& path, std::optional<Window> window = {});

struct CollisionScan {
    double min_center;
    double t_center;
    double min_primary;
    double t_primary;
};

/// Minimum distances to the center and the primary over the nodes, refined
/// by a parabola through the arg-min and its neighbours.
CollisionScan collision_scan(const DiscretePath& path, const PrimaryOrbit& orbit);

/// |<z', e>| / |z'| at each Ray endpoint, NaN for other endpoint kinds. The
/// endpoint velocity comes from the three-point one-sided stencil.
struct Transversality {
    double left;
    double right;
};
Transversality transversality(const DiscretePath& path);

/// Wraps angles into a continuous branch starting from arg(z_0).
/// Throws DomainError if an adjacent jump exceeds max_jump.
std::vector<double> unwrap_angles(std::span<const double> raw, double max_jump);

}  // namespace roctb
