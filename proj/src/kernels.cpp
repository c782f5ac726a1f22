#include "roctb/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "roctb/potential.hpp"

namespace roctb::kernels {

namespace {

using std::ptrdiff_t;

constexpr ptrdiff_t kNoFault = std::numeric_limits<ptrdiff_t>::max();

inline double norm2(cplx a) { return a.real() * a.real() + a.imag() * a.imag(); }
inline double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

// 0 = fine, 1 = center, 2 = primary.
inline int singular_kind(cplx p, cplx q) {
    if (std::abs(p) < kSingularDistance) return 1;
    if (std::abs(p - q) < kSingularDistance) return 2;
    return 0;
}

inline double segment_term(const SegmentField& f, std::span<const cplx> z, std::size_t k) {
    const cplx a = z[k + 1] - z[k];
    double term = 0.5 * norm2(a) / f.dt[k];
    if (f.potential) {
        const cplx mid = 0.5 * (z[k] + z[k + 1]);
        term += f.dt[k] * (f.mu / std::abs(mid) + f.m / std::abs(mid - f.q_mid[k]));
    }
    return term;
}

// 1/|b'| - 1/|b| from b and b' - b.
inline double inverse_distance_change(cplx b, cplx delta) {
    const cplx bn = b + delta;
    const double nb = std::abs(b);
    const double nbn = std::abs(bn);
    const double sq_change = dot(delta, b + bn);  // |b'|^2 - |b|^2
    return -sq_change / (nb * nbn * (nb + nbn));
}

inline double segment_difference(const SegmentField& f, std::span<const cplx> z_old, std::span<const cplx> z_new,
                                 std::size_t k) {
    const cplx d0 = z_new[k] - z_old[k];
    const cplx d1 = z_new[k + 1] - z_old[k + 1];
    const cplx a_old = z_old[k + 1] - z_old[k];
    const cplx a_new = z_new[k + 1] - z_new[k];
    double diff = 0.5 * dot(d1 - d0, a_old + a_new) / f.dt[k];
    if (f.potential) {
        const cplx mid = 0.5 * (z_old[k] + z_old[k + 1]);
        const cplx dmid = 0.5 * (d0 + d1);
        diff += f.dt[k] * (f.mu * inverse_distance_change(mid, dmid) +
                           f.m * inverse_distance_change(mid - f.q_mid[k], dmid));
    }
    return diff;
}

inline cplx segment_force(const SegmentField& f, std::span<const cplx> z, std::size_t k) {
    if (!f.potential) return {0.0, 0.0};
    const cplx mid = 0.5 * (z[k] + z[k + 1]);
    return force_at(f.mu, f.m, mid, f.q_mid[k], f.t_mid[k]);
}

Fault make_fault(ptrdiff_t idx, const SegmentField& f, std::span<const cplx> z, bool at_nodes) {
    if (idx == kNoFault) return {};
    const auto k = static_cast<std::size_t>(idx);
    const cplx p = at_nodes ? z[k] : 0.5 * (z[k] + z[k + 1]);
    const cplx q = at_nodes ? f.q_node[k] : f.q_mid[k];
    return Fault{idx, singular_kind(p, q) == 2};
}

ptrdiff_t scan_midpoints_serial(const SegmentField& f, std::span<const cplx> z) {
    if (!f.potential) return kNoFault;
    const std::size_t n = f.dt.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (singular_kind(0.5 * (z[k] + z[k + 1]), f.q_mid[k]) != 0) return static_cast<ptrdiff_t>(k);
    }
    return kNoFault;
}

ptrdiff_t scan_midpoints_parallel(const SegmentField& f, std::span<const cplx> z) {
    if (!f.potential) return kNoFault;
    const auto n = static_cast<ptrdiff_t>(f.dt.size());
    ptrdiff_t first = kNoFault;
#pragma omp parallel for schedule(static) reduction(min : first) if (n >= static_cast<ptrdiff_t>(kParallelThreshold))
    for (ptrdiff_t k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        if (singular_kind(0.5 * (z[uk] + z[uk + 1]), f.q_mid[uk]) != 0 && k < first) first = k;
    }
    return first;
}

ptrdiff_t scan_midpoints(const SegmentField& f, std::span<const cplx> z, Exec exec) {
    return exec == Exec::Serial ? scan_midpoints_serial(f, z) : scan_midpoints_parallel(f, z);
}

}  // namespace

double ordered_sum(std::span<const double> terms) {
    double sum = 0.0;
    double comp = 0.0;
    for (double v : terms) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

Fault segment_terms(const SegmentField& f, std::span<const cplx> z, std::span<double> terms, Exec exec) {
    if (const auto bad = scan_midpoints(f, z, exec); bad != kNoFault) return make_fault(bad, f, z, false);
    const std::size_t n = f.dt.size();
    if (exec == Exec::Serial) {
        for (std::size_t k = 0; k < n; ++k) terms[k] = segment_term(f, z, k);
    } else {
        const auto sn = static_cast<ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
        for (ptrdiff_t k = 0; k < sn; ++k) {
            terms[static_cast<std::size_t>(k)] = segment_term(f, z, static_cast<std::size_t>(k));
        }
    }
    return {};
}

Fault segment_differences(const SegmentField& f, std::span<const cplx> z_old, std::span<const cplx> z_new,
                          std::span<double> diffs, Exec exec) {
    if (const auto bad = scan_midpoints(f, z_new, exec); bad != kNoFault) return make_fault(bad, f, z_new, false);
    if (const auto bad = scan_midpoints(f, z_old, exec); bad != kNoFault) return make_fault(bad, f, z_old, false);
    const std::size_t n = f.dt.size();
    if (exec == Exec::Serial) {
        for (std::size_t k = 0; k < n; ++k) diffs[k] = segment_difference(f, z_old, z_new, k);
    } else {
        const auto sn = static_cast<ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
        for (ptrdiff_t k = 0; k < sn; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            diffs[uk] = segment_difference(f, z_old, z_new, uk);
        }
    }
    return {};
}

Fault node_gradient(const SegmentField& f, std::span<const cplx> z, std::span<cplx> seg_vel,
                    std::span<cplx> seg_force, std::span<cplx> grad, Exec exec) {
    if (const auto bad = scan_midpoints(f, z, exec); bad != kNoFault) return make_fault(bad, f, z, false);
    const std::size_t n = f.dt.size();
    // seg_force holds dt/2 * F(mid), the share of the potential term each endpoint receives.
    if (exec == Exec::Serial) {
        for (std::size_t k = 0; k <= n; ++k) grad[k] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const cplx v = (z[k + 1] - z[k]) / f.dt[k];
            const cplx h = 0.5 * f.dt[k] * segment_force(f, z, k);
            seg_vel[k] = v;
            seg_force[k] = h;
            grad[k] += h - v;
            grad[k + 1] += v + h;
        }
        return {};
    }
    const auto sn = static_cast<ptrdiff_t>(n);
#pragma omp parallel if (n >= kParallelThreshold)
    {
#pragma omp for schedule(static)
        for (ptrdiff_t k = 0; k < sn; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            seg_vel[uk] = (z[uk + 1] - z[uk]) / f.dt[uk];
            seg_force[uk] = 0.5 * f.dt[uk] * segment_force(f, z, uk);
        }
#pragma omp for schedule(static)
        for (ptrdiff_t k = 0; k <= sn; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            // Same grouping as the serial scatter: (v_{k-1} + h_{k-1}) + (h_k - v_k).
            cplx g = 0.0;
            if (uk > 0) g = seg_vel[uk - 1] + seg_force[uk - 1];
            if (uk < n) g += seg_force[uk] - seg_vel[uk];
            grad[uk] = g;
        }
    }
    return {};
}

Fault el_residual(const SegmentField& f, std::span<const cplx> z, std::span<cplx> out, Exec exec) {
    const std::size_t n = f.dt.size();
    if (f.potential) {
        for (std::size_t k = 1; k < n; ++k) {
            if (singular_kind(z[k], f.q_node[k]) != 0) return make_fault(static_cast<ptrdiff_t>(k), f, z, true);
        }
    }
    const auto residual = [&](std::size_t k) {
        const cplx v_prev = (z[k] - z[k - 1]) / f.dt[k - 1];
        const cplx v_next = (z[k + 1] - z[k]) / f.dt[k];
        const cplx accel = 2.0 * (v_next - v_prev) / (f.dt[k] + f.dt[k - 1]);
        const cplx F = f.potential ? force_at(f.mu, f.m, z[k], f.q_node[k], f.t[k]) : cplx{0.0, 0.0};
        return accel - F;
    };
    if (exec == Exec::Serial) {
        for (std::size_t k = 1; k < n; ++k) out[k - 1] = residual(k);
    } else {
        const auto sn = static_cast<ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
        for (ptrdiff_t k = 1; k < sn; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            out[uk - 1] = residual(uk);
        }
    }
    return {};
}

}  // namespace roctb::kernels
