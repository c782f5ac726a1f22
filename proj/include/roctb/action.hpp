#pragma once

#include <span>
#include <vector>

#include "roctb/kernels.hpp"
#include "roctb/path.hpp"
#include "roctb/potential.hpp"

namespace roctb {

using kernels::Exec;

/// Discrete action on a fixed grid:
///   sum_k 1/2 |z_{k+1} - z_k|^2 / dt_k + dt_k U((z_k + z_{k+1})/2, (t_k + t_{k+1})/2).
///
/// The primary is sampled once at construction, so repeated evaluations
/// during a solve cost O(N) with no Kepler solves. Singular evaluations throw
/// SingularityError.
class ActionFunctional {
public:
    struct Options {
        Exec exec = Exec::Parallel;
        /// false drops U entirely (free motion); used to test the stencils.
        bool potential = true;
    };

    ActionFunctional(const TimeGrid& grid, const FieldParams& params, Options options);
    ActionFunctional(const TimeGrid& grid, const FieldParams& params)
        : ActionFunctional(grid, params, Options{}) {}

    const TimeGrid& grid() const noexcept { return grid_; }
    const FieldParams& params() const noexcept { return params_; }
    std::span<const cplx> primary_at_nodes() const noexcept { return q_node_; }
    std::span<const cplx> primary_at_midpoints() const noexcept { return q_mid_; }

    double value(std::span<const cplx> z) const;
    /// value(z_new) - value(z_old), computed from sample differences.
    double difference(std::span<const cplx> z_old, std::span<const cplx> z_new) const;
    /// d/dRe z_k + i d/dIm z_k for all N + 1 nodes.
    std::vector<cplx> node_gradient(std::span<const cplx> z) const;
    /// Gradient restricted to the free coordinates of `path`.
    std::vector<double> free_gradient(const DiscretePath& path) const;
    /// Second difference minus force at interior nodes.
    std::vector<cplx> el_residual(std::span<const cplx> z) const;

private:
    kernels::SegmentField field() const;
    void raise(const kernels::Fault& fault, bool at_nodes) const;

    TimeGrid grid_;
    FieldParams params_;
    Options options_;
    std::vector<double> dt_;
    std::vector<double> t_mid_;
    std::vector<cplx> q_mid_;
    std::vector<cplx> q_node_;
    // Scratch space; an ActionFunctional belongs to a single solve.
    mutable std::vector<double> terms_;
    mutable std::vector<cplx> seg_vel_;
    mutable std::vector<cplx> seg_force_;
};

/// Maps the node gradient onto the free-coordinate layout of `path`.
std::vector<double> restrict_gradient(const DiscretePath& path, std::span<const cplx> node_grad);

double discrete_action(const DiscretePath& path, const FieldParams& params);
std::vector<double> action_gradient(const DiscretePath& path, const FieldParams& params);
std::vector<cplx> el_residual(const DiscretePath& path, const FieldParams& params);

}  // namespace roctb
