#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roctb/action.hpp"
#include "roctb/analysis.hpp"
#include "roctb/path.hpp"
#include "roctb/potential.hpp"

namespace roctb {

struct MeshConfig {
    int segments = 256;
    double gamma = 1.5;
    SingularEnd singular_end = SingularEnd::Right;
    /// Segment counts visited by refine_and_polish after the first solve.
    std::vector<int> refinements;
};

struct SolverConfig {
    /// Sup-norm of the projected gradient that counts as converged.
    double grad_tol = 1e-10;
    int max_iterations = 20000;
    int memory = 12;
    double armijo = 1e-4;
    int max_backtracks = 60;
    Exec exec = Exec::Parallel;
};

/// Which collinear class the automatic initial path starts in when both
/// endpoints sit on the primary's ray.
enum class Branch {
    Auto,
    /// z(t) in (q(t), 0): between the primary and the center.
    Inner,
    /// z(t) in (-inf, q(t)): beyond the primary.
    Outer,
};

enum class InitKind { Auto, Provided, MirrorOf };

struct InitConfig {
    InitKind kind = InitKind::Auto;
    Branch branch = Branch::Auto;
    /// Samples for Provided / MirrorOf, linearly interpolated onto the grid.
    std::optional<PathSamples> samples;
    /// Optional deterministic perturbation of interior samples.
    double jitter = 0.0;
    std::uint64_t seed = 0;
};

struct ProblemConfig {
    FieldParams params;
    double t_start;
    double t_end;
    BoundaryCondition left;
    BoundaryCondition right;
    MeshConfig mesh;
    SolverConfig solver;
    InitConfig init;
};

struct LevelSummary {
    int segments;
    int iterations;
    bool converged;
    double action;
    double grad_norm;
    double el_residual_max;
};

struct SolveReport {
    DiscretePath path;
    double action;
    double grad_norm;
    double el_residual_max;
    double min_dist_center;
    double min_dist_primary;
    std::vector<double> theta_series;
    std::vector<double> a_series;
    std::vector<double> J_series;
    std::vector<double> el_residual_series;
    Transversality transversality;
    int iterations;
    bool converged;
    /// Action change of every accepted step; all strictly negative.
    std::vector<double> decreases;
    std::vector<LevelSummary> levels;
    std::vector<std::string> flags;
};

/// The straight-line-in-polar starting path described by `config.init`.
DiscretePath initial_path(const ProblemConfig& config, const TimeGrid& grid);

/// Minimizes from `start` on its own grid. Never throws on non-convergence.
SolveReport minimize_from(const ProblemConfig& config, DiscretePath start);

/// Builds the first mesh level, initializes, and minimizes.
SolveReport minimize(const ProblemConfig& config);

/// Interpolates onto each refinement level in turn and minimizes again.
SolveReport refine_and_polish(const SolveReport& report, const ProblemConfig& config);

/// Linear interpolation of (t, z) samples at the given times.
std::vector<cplx> interpolate_samples(const PathSamples& src, std::span<const double> times);

/// Fills every diagnostic field of a report from its path.
void fill_diagnostics(SolveReport& report, const FieldParams& params, Exec exec);

}  // namespace roctb
