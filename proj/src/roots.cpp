#include "roctb/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roctb/detail/rootfind.hpp"
#include "roctb/errors.hpp"

namespace roctb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWidthTol = 1e-14;
constexpr double kEdge = 1e-9;

using HFn = double (*)(double, double);

// Newton from a tight bisection bracket, then pick the closest double among
// a few neighbours; the residual floor is set by rounding in a^3.
double polish(HFn h, double theta, double ratio, double lo, double hi) {
    const auto f = [&](double a) { return h(a, ratio); };
    double x = detail::bisect(f, lo, hi, kWidthTol);
    for (int it = 0; it < 6; ++it) {
        const double d = dh_da(x, theta, ratio);
        if (d == 0.0) break;
        const double next = x - f(x) / d;
        if (!(next > lo && next < hi) || next == x) break;
        x = next;
    }
    double best = x;
    double best_res = std::abs(f(x));
    double up = x;
    double down = x;
    for (int k = 0; k < 4; ++k) {
        up = std::nextafter(up, hi);
        down = std::nextafter(down, lo);
        for (double c : {up, down}) {
            const double res = std::abs(f(c));
            if (res < best_res) {
                best_res = res;
                best = c;
            }
        }
    }
    return best;
}

double grow_upper(HFn h, double ratio) {
    double b = 2.0;
    while (h(b, ratio) <= 0.0) {
        b *= 2.0;
        if (!std::isfinite(b)) throw NumericalFailure("find_alphas: no upper bracket", h(b, ratio));
    }
    return b;
}

}  // namespace

double h_at_zero(double a, double ratio) {
    const double d = a + 1.0;
    return a * a * a - 1.0 - ratio * a * a / (d * d);
}

double h_at_pi(double a, double ratio) {
    const double diff = a - 1.0;
    if (diff == 0.0) throw SingularityError(Body::Primary, 0.0);
    const double sign = diff > 0.0 ? 1.0 : -1.0;
    return a * a * a - 1.0 - ratio * a * a * sign / (diff * diff);
}

double eval_h(double a, double theta, double ratio) {
    if (theta == kPi) return h_at_pi(a, ratio);
    if (theta == 0.0) return h_at_zero(a, ratio);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double d2 = (a + c) * (a + c) + s * s;
    if (d2 == 0.0) throw SingularityError(Body::Primary, 0.0);
    return a * a * a - 1.0 - ratio * a * a * (a + c) / (d2 * std::sqrt(d2));
}

double dh_da(double a, double theta, double ratio) {
    const double c = theta == kPi ? -1.0 : std::cos(theta);
    const double s = (theta == kPi || theta == 0.0) ? 0.0 : std::sin(theta);
    const double d2 = (a + c) * (a + c) + s * s;
    const double d3 = d2 * std::sqrt(d2);
    const double d5 = d3 * d2;
    return 3.0 * a * a - ratio * ((3.0 * a * a + 2.0 * a * c) / d3 - 3.0 * a * a * (a + c) * (a + c) / d5);
}

RootTriple find_alphas(double ratio) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw DomainError("find_alphas: mass ratio must be positive");

    const double b2 = grow_upper(h_at_zero, ratio);
    const double alpha2 = polish(h_at_zero, 0.0, ratio, 1.0, b2);

    // h(., pi) runs from -1 at 0 to +inf at 1-, and from -inf at 1+ to +inf.
    double eps = kEdge;
    while (h_at_pi(1.0 - eps, ratio) <= 0.0) {
        eps *= 0.1;
        if (eps < 1e-16) throw NumericalFailure("find_alphas: no bracket for alpha1", h_at_pi(1.0 - eps, ratio));
    }
    const double alpha1 = polish(h_at_pi, kPi, ratio, kEdge, 1.0 - eps);

    eps = kEdge;
    while (h_at_pi(1.0 + eps, ratio) >= 0.0) {
        eps *= 0.1;
        if (eps < 1e-16) throw NumericalFailure("find_alphas: no bracket for alpha3", h_at_pi(1.0 + eps, ratio));
    }
    const double b3 = grow_upper(h_at_pi, ratio);
    const double alpha3 = polish(h_at_pi, kPi, ratio, 1.0 + eps, b3);

    if (!(alpha1 < 1.0 && 1.0 < alpha2 && alpha2 < alpha3)) {
        throw NumericalFailure("find_alphas: root ordering violated", alpha3 - alpha2);
    }
    return {ratio, alpha1, alpha2, alpha3};
}

double coercivity_constant(double phi, double phi0) {
    if (phi == phi0) throw DomainError("coercivity_constant: phi and phi0 coincide");
    const double s = std::sin(0.5 * (phi - phi0));
    const double c = std::cos(0.5 * (phi - phi0));
    const double value = std::min(s * s, c * c);
    if (!(value > 0.0)) throw DomainError("coercivity_constant: rays are collinear");
    return value;
}

double angular_decay_exponent(double alpha, double mass_ratio) {
    if (!(alpha > 0.0) || !(mass_ratio > 0.0)) throw DomainError("angular_decay_exponent: needs alpha, m/mu > 0");
    const double c = (2.0 / 9.0) * mass_ratio / (alpha * std::pow(1.0 + alpha, 3));
    // Positive root of beta^2 + beta/3 - c, written without cancellation.
    return 2.0 * c / (1.0 / 3.0 + std::sqrt(1.0 / 9.0 + 4.0 * c));
}

}  // namespace roctb
