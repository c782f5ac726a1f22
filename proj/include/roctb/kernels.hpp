#pragma once

// Segment-level kernels for the discrete action.
//
// Each kernel has an OpenMP implementation and a plain serial reference.
// Both evaluate identical per-segment expressions and combine them in index
// order, so their results agree bit for bit regardless of the thread count.

#include <span>

#include "roctb/kepler.hpp"

namespace roctb::kernels {

enum class Exec { Serial, Parallel };

/// Below this many segments the OpenMP path runs on one thread.
inline constexpr std::size_t kParallelThreshold = 512;

/// Time data for N segments; the primary is pre-sampled at midpoints and nodes.
struct SegmentField {
    std::span<const double> t;       // N + 1 nodes
    std::span<const double> dt;      // N
    std::span<const double> t_mid;   // N
    std::span<const cplx> q_mid;     // N
    std::span<const cplx> q_node;    // N + 1
    double mu;
    double m;
    bool potential = true;
};

/// Index and body of the first singular evaluation, if any.
struct Fault {
    std::ptrdiff_t index = -1;
    bool primary = false;
    explicit operator bool() const noexcept { return index >= 0; }
};

/// Per-segment action terms 1/2 |dz|^2/dt + dt U(mid) written to `terms`.
Fault segment_terms(const SegmentField& f, std::span<const cplx> z, std::span<double> terms, Exec exec);

/// Sum of `terms` in index order (Neumaier compensated).
double ordered_sum(std::span<const double> terms);

/// Per-segment change of the action between z_old and z_new, evaluated from
/// differences so it stays accurate when the change is far below the
/// action's rounding level.
Fault segment_differences(const SegmentField& f, std::span<const cplx> z_old, std::span<const cplx> z_new,
                          std::span<double> diffs, Exec exec);

/// Gradient of the action with respect to every node, as complex numbers
/// d/dx + i d/dy. `seg_vel` and `seg_force` are N-long scratch buffers.
Fault node_gradient(const SegmentField& f, std::span<const cplx> z, std::span<cplx> seg_vel,
                    std::span<cplx> seg_force, std::span<cplx> grad, Exec exec);

/// Nonuniform second difference minus the force, at interior nodes 1..N-1
/// (written to out[0..N-2]).
Fault el_residual(const SegmentField& f, std::span<const cplx> z, std::span<cplx> out, Exec exec);

}  // namespace roctb::kernels
