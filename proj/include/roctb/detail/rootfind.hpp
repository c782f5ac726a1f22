#pragma once

#include <cmath>
#include <limits>

#include "roctb/errors.hpp"

namespace roctb::detail {

struct RootResult {
    double x;
    int iterations;
};

/// Newton iteration kept inside [lo, hi]; a step leaving the bracket, or one
/// that fails to halve the bracket-relative error, is replaced by bisection.
/// Requires f(lo) <= 0 <= f(hi) or the reverse.
template <class F, class DF>
RootResult safeguarded_newton(F&& f, DF&& df, double lo, double hi, double x0,
                              double abs_tol, int max_iter = 100) {
    double flo = f(lo);
    const bool increasing = flo <= 0.0;
    double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
    double step_prev = hi - lo;
    for (int it = 1; it <= max_iter; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return {x, it};
        if ((fx < 0.0) == increasing) {
            lo = x;
        } else {
            hi = x;
        }
        const double d = df(x);
        double next = (d != 0.0) ? x - fx / d : lo - 1.0;
        if (!(next > lo && next < hi) || std::abs(next - x) > 0.5 * step_prev) {
            next = 0.5 * (lo + hi);
        }
        const double step = std::abs(next - x);
        step_prev = step;
        x = next;
        if (step <= abs_tol || step <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
            return {x, it};
        }
        if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
            return {x, it};
        }
    }
    throw NumericalFailure("safeguarded Newton did not converge", std::abs(f(x)));
}

/// Plain bisection until the bracket is narrower than width_tol.
template <class F>
double bisect(F&& f, double lo, double hi, double width_tol, int max_iter = 400) {
    double flo = f(lo);
    for (int it = 0; it < max_iter && hi - lo > width_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace roctb::detail
