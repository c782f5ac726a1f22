#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "roctb/kepler.hpp"

namespace roctb {

enum class SingularEnd { Left, Right };

/// Everything needed to rebuild a grid bit-for-bit.
struct GridSpec {
    double t_start;
    double t_end;
    int segments;
    double gamma;
    SingularEnd singular_end;
    /// Append the nodes reflected about t_end, so the grid covers
    /// [t_start, 2 t_end - t_start] and is graded at both ends.
    bool reflected = false;
};

/// Time nodes t_0 < ... < t_N, graded toward one endpoint:
/// t_k = t_N - (t_N - t_0) ((N - k)/N)^gamma when the right end is singular,
/// t_k = t_0 + (t_N - t_0) (k/N)^gamma when the left end is.
class TimeGrid {
public:
    explicit TimeGrid(const GridSpec& spec);

    const GridSpec& spec() const noexcept { return spec_; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    std::size_t segments() const noexcept { return nodes_.size() - 1; }
    double t_start() const noexcept { return nodes_.front(); }
    double t_end() const noexcept { return nodes_.back(); }
    double gamma() const noexcept { return spec_.gamma; }
    SingularEnd singular_end() const noexcept { return spec_.singular_end; }
    double operator[](std::size_t k) const noexcept { return nodes_[k]; }
    double dt(std::size_t k) const noexcept { return nodes_[k + 1] - nodes_[k]; }

private:
    GridSpec spec_;
    std::vector<double> nodes_;
};

TimeGrid build_grid(double t_start, double t_end, int segments, double gamma, SingularEnd singular_end);

struct FixedPoint {
    cplx z;
};
/// Endpoint constrained to the ray e^{i angle} R+, radius free and >= 0.
struct Ray {
    double angle;
};
/// Endpoint pinned at the center; the three-body collision at t = 0.
struct Origin {};

using BoundaryCondition = std::variant<FixedPoint, Ray, Origin>;

std::string describe(const BoundaryCondition& bc);

/// A piecewise-linear path z(t) sampled on a TimeGrid.
///
/// Free coordinates are laid out as: the left ray radius (if the left end is
/// a Ray), then Re/Im of every interior sample, then the right ray radius.
class DiscretePath {
public:
    DiscretePath(TimeGrid grid, std::vector<cplx> samples, BoundaryCondition left, BoundaryCondition right);

    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<cplx>& samples() const noexcept { return samples_; }
    const BoundaryCondition& left() const noexcept { return left_; }
    const BoundaryCondition& right() const noexcept { return right_; }
    std::size_t size() const noexcept { return samples_.size(); }
    cplx operator[](std::size_t k) const noexcept { return samples_[k]; }

    std::size_t free_count() const noexcept;
    std::vector<double> free_coordinates() const;
    void set_free_coordinates(std::span<const double> x);

    /// Radius of a Ray endpoint; 0 for the other kinds.
    double left_radius() const noexcept;
    double right_radius() const noexcept;

    /// Copy with every sample conjugated and ray angles negated.
    DiscretePath conjugated() const;

private:
    void enforce_endpoints();

    TimeGrid grid_;
    std::vector<cplx> samples_;
    BoundaryCondition left_;
    BoundaryCondition right_;
};

/// Unit vector of a ray.
cplx ray_direction(double angle);

/// Writes "t,re_z,im_z" rows with 17 significant digits.
void write_path_csv(std::ostream& out, const DiscretePath& path);

struct PathSamples {
    std::vector<double> t;
    std::vector<cplx> z;
};
PathSamples read_path_csv(std::istream& in);

/// Shortest round-trip-exact decimal form.
std::string format_double(double v);

}  // namespace roctb
