#include "roctb/path.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "roctb/errors.hpp"

namespace roctb {

TimeGrid::TimeGrid(const GridSpec& spec) : spec_(spec) {
    if (!(spec.t_start < spec.t_end)) throw DomainError("TimeGrid: t_start must be below t_end");
    if (spec.segments < 2) throw DomainError("TimeGrid: need at least 2 segments");
    if (!(spec.gamma >= 1.0)) throw DomainError("TimeGrid: grading exponent must be >= 1");
    const auto N = static_cast<std::size_t>(spec.segments);
    const double L = spec.t_end - spec.t_start;
    nodes_.resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
        if (spec.singular_end == SingularEnd::Right) {
            const double frac = static_cast<double>(N - k) / static_cast<double>(N);
            nodes_[k] = spec.t_end - L * std::pow(frac, spec.gamma);
        } else {
            const double frac = static_cast<double>(k) / static_cast<double>(N);
            nodes_[k] = spec.t_start + L * std::pow(frac, spec.gamma);
        }
    }
    nodes_.front() = spec.t_start;
    nodes_.back() = spec.t_end;
    if (spec.reflected) {
        nodes_.resize(2 * N + 1);
        for (std::size_t j = 1; j <= N; ++j) nodes_[N + j] = 2.0 * spec.t_end - nodes_[N - j];
    }
    for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
        if (!(nodes_[k] < nodes_[k + 1])) throw DomainError("TimeGrid: grading collapsed two nodes");
    }
}

TimeGrid build_grid(double t_start, double t_end, int segments, double gamma, SingularEnd singular_end) {
    return TimeGrid(GridSpec{t_start, t_end, segments, gamma, singular_end});
}

std::string describe(const BoundaryCondition& bc) {
    struct V {
        std::string operator()(const FixedPoint& f) const {
            return "fixed(" + format_double(f.z.real()) + "," + format_double(f.z.imag()) + ")";
        }
        std::string operator()(const Ray& r) const { return "ray(" + format_double(r.angle) + ")"; }
        std::string operator()(const Origin&) const { return "origin"; }
    };
    return std::visit(V{}, bc);
}

cplx ray_direction(double angle) { return {std::cos(angle), std::sin(angle)}; }

namespace {

bool is_ray(const BoundaryCondition& bc) { return std::holds_alternative<Ray>(bc); }

cplx project(const BoundaryCondition& bc, cplx z) {
    if (const auto* f = std::get_if<FixedPoint>(&bc)) return f->z;
    if (std::holds_alternative<Origin>(bc)) return {0.0, 0.0};
    const cplx e = ray_direction(std::get<Ray>(bc).angle);
    const double rho = std::max(0.0, z.real() * e.real() + z.imag() * e.imag());
    return rho * e;
}

double radius_on(const BoundaryCondition& bc, cplx z) {
    if (!is_ray(bc)) return 0.0;
    const cplx e = ray_direction(std::get<Ray>(bc).angle);
    return std::max(0.0, z.real() * e.real() + z.imag() * e.imag());
}

}  // namespace

DiscretePath::DiscretePath(TimeGrid grid, std::vector<cplx> samples, BoundaryCondition left, BoundaryCondition right)
    : grid_(std::move(grid)), samples_(std::move(samples)), left_(left), right_(right) {
    if (samples_.size() != grid_.nodes().size()) throw DomainError("DiscretePath: sample count must match grid");
    if (std::holds_alternative<Origin>(left_) && grid_.t_start() != 0.0) {
        throw DomainError("DiscretePath: Origin endpoint is only legal at t = 0");
    }
    if (std::holds_alternative<Origin>(right_) && grid_.t_end() != 0.0) {
        throw DomainError("DiscretePath: Origin endpoint is only legal at t = 0");
    }
    enforce_endpoints();
}

void DiscretePath::enforce_endpoints() {
    samples_.front() = project(left_, samples_.front());
    samples_.back() = project(right_, samples_.back());
}

std::size_t DiscretePath::free_count() const noexcept {
    return 2 * (samples_.size() - 2) + (is_ray(left_) ? 1 : 0) + (is_ray(right_) ? 1 : 0);
}

std::vector<double> DiscretePath::free_coordinates() const {
    std::vector<double> x;
    x.reserve(free_count());
    if (is_ray(left_)) x.push_back(left_radius());
    for (std::size_t k = 1; k + 1 < samples_.size(); ++k) {
        x.push_back(samples_[k].real());
        x.push_back(samples_[k].imag());
    }
    if (is_ray(right_)) x.push_back(right_radius());
    return x;
}

void DiscretePath::set_free_coordinates(std::span<const double> x) {
    if (x.size() != free_count()) throw DomainError("set_free_coordinates: wrong length");
    std::size_t i = 0;
    if (is_ray(left_)) {
        samples_.front() = std::max(0.0, x[i++]) * ray_direction(std::get<Ray>(left_).angle);
    }
    for (std::size_t k = 1; k + 1 < samples_.size(); ++k) {
        samples_[k] = {x[i], x[i + 1]};
        i += 2;
    }
    if (is_ray(right_)) {
        samples_.back() = std::max(0.0, x[i++]) * ray_direction(std::get<Ray>(right_).angle);
    }
}

double DiscretePath::left_radius() const noexcept { return radius_on(left_, samples_.front()); }
double DiscretePath::right_radius() const noexcept { return radius_on(right_, samples_.back()); }

DiscretePath DiscretePath::conjugated() const {
    const auto flip = [](const BoundaryCondition& bc) -> BoundaryCondition {
        if (const auto* r = std::get_if<Ray>(&bc)) return Ray{-r->angle};
        if (const auto* f = std::get_if<FixedPoint>(&bc)) return FixedPoint{std::conj(f->z)};
        return bc;
    };
    std::vector<cplx> conj_samples(samples_.size());
    for (std::size_t k = 0; k < samples_.size(); ++k) conj_samples[k] = std::conj(samples_[k]);
    return DiscretePath(grid_, std::move(conj_samples), flip(left_), flip(right_));
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_path_csv(std::ostream& out, const DiscretePath& path) {
    out << "t,re_z,im_z\n";
    const auto& t = path.grid().nodes();
    for (std::size_t k = 0; k < path.size(); ++k) {
        out << format_double(t[k]) << ',' << format_double(path[k].real()) << ','
            << format_double(path[k].imag()) << '\n';
    }
}

PathSamples read_path_csv(std::istream& in) {
    PathSamples result;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("path csv: empty input");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        double vals[3];
        for (double& v : vals) {
            if (!std::getline(ss, cell, ',')) {
                throw ParseError("path csv: line " + std::to_string(lineno) + " has fewer than 3 columns");
            }
            const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (r.ec != std::errc()) {
                throw ParseError("path csv: line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        result.t.push_back(vals[0]);
        result.z.emplace_back(vals[1], vals[2]);
    }
    return result;
}

}  // namespace roctb
