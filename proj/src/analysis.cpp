#include "roctb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "roctb/errors.hpp"

namespace roctb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

template <class T>
std::vector<T> first_derivative_impl(std::span<const double> t, std::span<const T> y) {
    const std::size_t n = t.size();
    if (n < 3 || y.size() != n) throw DomainError("first_derivative: need at least 3 matching samples");
    std::vector<T> d(n);
    {
        const double h1 = t[1] - t[0];
        const double h2 = t[2] - t[1];
        d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] -
               h1 / (h2 * (h1 + h2)) * y[2];
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double h1 = t[k] - t[k - 1];
        const double h2 = t[k + 1] - t[k];
        d[k] = -h2 / (h1 * (h1 + h2)) * y[k - 1] + (h2 - h1) / (h1 * h2) * y[k] + h1 / (h2 * (h1 + h2)) * y[k + 1];
    }
    {
        const double h1 = t[n - 1] - t[n - 2];
        const double h2 = t[n - 2] - t[n - 3];
        d[n - 1] = (2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[n - 1] - (h1 + h2) / (h1 * h2) * y[n - 2] +
                   h1 / (h2 * (h1 + h2)) * y[n - 3];
    }
    return d;
}

double singular_time(const TimeGrid& grid) {
    return grid.singular_end() == SingularEnd::Right ? grid.t_end() : grid.t_start();
}

LimitEstimate window_stats(std::span<const double> times, std::span<const double> values, double t_sing,
                           const Window& w) {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t count = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double s = std::abs(times[k] - t_sing);
        if (s < w.lo || s > w.hi || !std::isfinite(values[k])) continue;
        sum += values[k];
        lo = std::min(lo, values[k]);
        hi = std::max(hi, values[k]);
        ++count;
    }
    if (count == 0) return {kNaN, kNaN, 0};
    return {sum / static_cast<double>(count), hi - lo, count};
}

struct Line {
    double slope;
    double intercept;
    double rms;
};

Line least_squares(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (intercept + slope * x[i]);
        ss += r * r;
    }
    return {slope, intercept, std::sqrt(ss / n)};
}

}  // namespace

std::vector<double> first_derivative(std::span<const double> t, std::span<const double> y) {
    return first_derivative_impl<double>(t, y);
}

std::vector<cplx> first_derivative(std::span<const double> t, std::span<const cplx> y) {
    return first_derivative_impl<cplx>(t, y);
}

std::vector<double> second_derivative(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    std::vector<double> d(n, kNaN);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double h1 = t[k] - t[k - 1];
        const double h2 = t[k + 1] - t[k];
        d[k] = 2.0 * ((y[k + 1] - y[k]) / h2 - (y[k] - y[k - 1]) / h1) / (h1 + h2);
    }
    return d;
}

PowerLawFit fit_power_law(std::span<const double> times, std::span<const double> radii, double t_lo, double t_hi) {
    if (times.size() != radii.size()) throw DomainError("fit_power_law: length mismatch");
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double s = std::abs(times[k]);
        if (s < t_lo || s > t_hi) continue;
        if (!(radii[k] > 0.0)) throw DomainError("fit_power_law: radius must be positive inside the window");
        lx.push_back(std::log(s));
        ly.push_back(std::log(radii[k]));
    }
    if (lx.size() < 8) throw DomainError("fit_power_law: fewer than 8 samples in the window");
    const Line line = least_squares(lx, ly);
    return {line.slope, std::exp(line.intercept), t_lo, t_hi, line.rms, lx.size()};
}

Window innermost_decade(const TimeGrid& grid) {
    const double ts = singular_time(grid);
    double t_min = std::numeric_limits<double>::infinity();
    for (double t : grid.nodes()) {
        const double s = std::abs(t - ts);
        if (s > 0.0) t_min = std::min(t_min, s);
    }
    return {10.0 * t_min, 100.0 * t_min};
}

RatioSeries ratio_limits(const DiscretePath& path, const PrimaryOrbit& orbit, std::optional<Window> window) {
    double t_sing = 0.0;
    if (std::holds_alternative<Origin>(path.right())) {
        t_sing = path.grid().t_end();
    } else if (std::holds_alternative<Origin>(path.left())) {
        t_sing = path.grid().t_start();
    } else {
        throw DomainError("ratio_limits: path has no Origin endpoint");
    }
    if (std::abs(primary_position(orbit, t_sing)) != 0.0) {
        throw DomainError("ratio_limits: primary does not collide at the Origin endpoint");
    }
    const auto& t = path.grid().nodes();
    std::vector<double> r(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) r[k] = std::abs(path[k]);
    const auto rdot = first_derivative(t, r);
    const auto rddot = second_derivative(t, r);

    RatioSeries out;
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        const RadialState q = primary_radial(orbit, t[k]);
        if (!(q.r > 0.0) || q.rdot == 0.0 || q.rddot == 0.0) continue;
        out.times.push_back(t[k]);
        out.a.push_back(r[k] / q.r);
        out.b.push_back(rdot[k] / q.rdot);
        out.c.push_back(rddot[k] / q.rddot);
    }
    const Window w = window.value_or(innermost_decade(path.grid()));
    out.a_limit = window_stats(out.times, out.a, t_sing, w);
    out.b_limit = window_stats(out.times, out.b, t_sing, w);
    out.c_limit = window_stats(out.times, out.c, t_sing, w);
    return out;
}

std::string to_string(ThetaVerdict v) {
    switch (v) {
        case ThetaVerdict::ConstantZero: return "constant_0";
        case ThetaVerdict::ConstantPi: return "constant_pi";
        case ThetaVerdict::MonotoneDecreasing: return "monotone_decreasing";
        case ThetaVerdict::MonotoneIncreasing: return "monotone_increasing";
        case ThetaVerdict::Unimodal: return "unimodal";
        case ThetaVerdict::Other: return "other";
    }
    return "other";
}

std::vector<double> unwrap_angles(std::span<const double> raw, double max_jump) {
    std::vector<double> out(raw.size());
    if (raw.empty()) return out;
    out[0] = raw[0];
    for (std::size_t k = 1; k < raw.size(); ++k) {
        double d = std::remainder(raw[k] - raw[k - 1], 2.0 * kPi);
        if (std::abs(d) > max_jump) {
            throw DomainError("mesh too coarse: angle jump of " + std::to_string(d) + " rad between samples");
        }
        out[k] = out[k - 1] + d;
    }
    return out;
}

ThetaProfile theta_profile(const DiscretePath& path, std::optional<Window> window, std::optional<double> exponent) {
    const auto& t = path.grid().nodes();
    ThetaProfile out{};
    std::vector<double> raw;
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (path[k] == cplx{0.0, 0.0}) continue;
        out.times.push_back(t[k]);
        raw.push_back(std::arg(path[k]));
    }
    if (out.times.size() < 3) throw DomainError("theta_profile: need at least 3 nonzero samples");
    out.theta = unwrap_angles(raw, 0.5 * kPi);

    const auto [mn, mx] = std::minmax_element(out.theta.begin(), out.theta.end());
    out.theta_min = *mn;
    out.t_min = out.times[static_cast<std::size_t>(mn - out.theta.begin())];

    constexpr double kConstTol = 1e-12;
    const bool all_zero = std::all_of(out.theta.begin(), out.theta.end(),
                                      [](double th) { return std::abs(th) <= kConstTol; });
    const bool all_pi = std::all_of(out.theta.begin(), out.theta.end(),
                                    [](double th) { return std::abs(std::abs(th) - kPi) <= kConstTol; });
    if (all_zero) {
        out.verdict = ThetaVerdict::ConstantZero;
    } else if (all_pi) {
        out.verdict = ThetaVerdict::ConstantPi;
    } else {
        int changes = 0;
        int first_sign = 0;
        int prev = 0;
        bool flat = false;
        for (std::size_t k = 0; k + 1 < out.theta.size(); ++k) {
            const double d = out.theta[k + 1] - out.theta[k];
            const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
            if (s == 0) {
                flat = true;
                continue;
            }
            if (first_sign == 0) first_sign = s;
            if (prev != 0 && s != prev) ++changes;
            prev = s;
        }
        if (flat) {
            out.verdict = ThetaVerdict::Other;
        } else if (changes == 0) {
            out.verdict = first_sign < 0 ? ThetaVerdict::MonotoneDecreasing : ThetaVerdict::MonotoneIncreasing;
        } else if (changes == 1 && first_sign < 0) {
            out.verdict = ThetaVerdict::Unimodal;
        } else {
            out.verdict = ThetaVerdict::Other;
        }
    }

    const double t_sing = singular_time(path.grid());
    const Window w = window.value_or(innermost_decade(path.grid()));
    out.limit_mean = window_stats(out.times, out.theta, t_sing, w);

    // theta - theta* = C s^beta.
    out.limit_extrapolated = kNaN;
    out.decay_exponent = kNaN;
    std::vector<double> ls;
    std::vector<double> th;
    std::vector<double> sw;
    const auto dtheta = first_derivative(out.times, out.theta);
    const double ds_dt = path.grid().singular_end() == SingularEnd::Right ? -1.0 : 1.0;
    for (std::size_t k = 0; k < out.times.size(); ++k) {
        const double s = std::abs(out.times[k] - t_sing);
        if (s < w.lo || s > w.hi) continue;
        ls.push_back(std::log(s));
        th.push_back(out.theta[k]);
        sw.push_back(s * dtheta[k] / ds_dt);
    }
    if (th.size() < 3) return out;
    if (exponent) {
        // Linear in (theta*, C) once beta is fixed.
        std::vector<double> basis(ls.size());
        for (std::size_t i = 0; i < ls.size(); ++i) basis[i] = std::exp(*exponent * ls[i]);
        out.limit_extrapolated = least_squares(basis, th).intercept;
        std::vector<double> lr;
        std::vector<double> lx;
        for (std::size_t i = 0; i < th.size(); ++i) {
            const double dev = std::abs(th[i] - out.limit_extrapolated);
            if (dev > 0.0) {
                lx.push_back(ls[i]);
                lr.push_back(std::log(dev));
            }
        }
        if (lx.size() >= 3) out.decay_exponent = least_squares(lx, lr).slope;
    } else {
        // s dtheta/ds = beta (theta - theta*), beta from the slope of log|s dtheta/ds|.
        std::vector<double> lx;
        std::vector<double> lw;
        for (std::size_t i = 0; i < sw.size(); ++i) {
            if (std::abs(sw[i]) > 0.0) {
                lx.push_back(ls[i]);
                lw.push_back(std::log(std::abs(sw[i])));
            }
        }
        if (lx.size() < 3) return out;
        const double beta = least_squares(lx, lw).slope;
        out.decay_exponent = beta;
        if (beta > 0.0) {
            double acc = 0.0;
            for (std::size_t i = 0; i < th.size(); ++i) acc += th[i] - sw[i] / beta;
            out.limit_extrapolated = acc / static_cast<double>(th.size());
        }
    }
    return out;
}

std::vector<double> angular_momentum(const DiscretePath& path) {
    const auto v = first_derivative(path.grid().nodes(), std::span<const cplx>(path.samples()));
    std::vector<double> J(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        J[k] = path[k].real() * v[k].imag() - path[k].imag() * v[k].real();
    }
    return J;
}

VelocityArgument velocity_argument(const DiscretePath& path, std::optional<Window> window) {
    const auto& t = path.grid().nodes();
    const auto v = first_derivative(t, std::span<const cplx>(path.samples()));
    VelocityArgument out{};
    out.times.assign(t.begin(), t.end());
    out.theta_d.assign(t.size(), kNaN);

    // Unwrap each run of nonzero velocities separately.
    std::vector<double> raw;
    std::vector<std::size_t> idx;
    const auto flush = [&]() {
        if (raw.empty()) return;
        const auto unwrapped = unwrap_angles(raw, kPi);
        for (std::size_t i = 0; i < idx.size(); ++i) out.theta_d[idx[i]] = unwrapped[i];
        raw.clear();
        idx.clear();
    };
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (v[k] == cplx{0.0, 0.0}) {
            ++out.gaps;
            flush();
            continue;
        }
        raw.push_back(std::arg(v[k]));
        idx.push_back(k);
    }
    flush();

    std::vector<double> gap(t.size(), kNaN);
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (path[k] == cplx{0.0, 0.0} || !std::isfinite(out.theta_d[k])) continue;
        gap[k] = std::abs(std::remainder(std::arg(path[k]) - out.theta_d[k], 2.0 * kPi));
    }
    const Window w = window.value_or(innermost_decade(path.grid()));
    out.gap_to_position = window_stats(t, gap, singular_time(path.grid()), w);
    return out;
}

namespace {

struct Minimum {
    double value;
    double time;
};

Minimum refined_minimum(std::span<const double> t, std::span<const double> d) {
    const auto it = std::min_element(d.begin(), d.end());
    const auto j = static_cast<std::size_t>(it - d.begin());
    Minimum best{d[j], t[j]};
    if (j == 0 || j + 1 >= d.size() || d[j] == 0.0) return best;
    const double h1 = t[j] - t[j - 1];
    const double h2 = t[j + 1] - t[j];
    const double A = ((d[j + 1] - d[j]) / h2 + (d[j - 1] - d[j]) / h1) / (h1 + h2);
    const double B = (d[j + 1] - d[j]) / h2 - A * h2;
    if (!(A > 0.0)) return best;
    const double u = std::clamp(-B / (2.0 * A), -h1, h2);
    const double value = d[j] + B * u + A * u * u;
    if (value < best.value) best = {std::max(0.0, value), t[j] + u};
    return best;
}

}  // namespace

CollisionScan collision_scan(const DiscretePath& path, const PrimaryOrbit& orbit) {
    const auto& t = path.grid().nodes();
    std::vector<double> dc(path.size());
    std::vector<double> dp(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        dc[k] = std::abs(path[k]);
        dp[k] = std::abs(path[k] - primary_position(orbit, t[k]));
    }
    const Minimum c = refined_minimum(t, dc);
    const Minimum p = refined_minimum(t, dp);
    return {c.value, c.time, p.value, p.time};
}

Transversality transversality(const DiscretePath& path) {
    const auto v = first_derivative(path.grid().nodes(), std::span<const cplx>(path.samples()));
    const auto ratio = [](const BoundaryCondition& bc, cplx vel) {
        const auto* ray = std::get_if<Ray>(&bc);
        if (ray == nullptr) return kNaN;
        const cplx e = ray_direction(ray->angle);
        const double speed = std::abs(vel);
        if (speed == 0.0) return kNaN;
        return std::abs(vel.real() * e.real() + vel.imag() * e.imag()) / speed;
    };
    return {ratio(path.left(), v.front()), ratio(path.right(), v.back())};
}

}  // namespace roctb
