#include "roctb/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roctb/errors.hpp"

namespace roctb {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

// Endpoint velocities of the three-point one-sided stencil on a node range.
cplx velocity_end(std::span<const double> t, std::span<const cplx> z, bool at_start) {
    const auto v = first_derivative(t, z);
    return at_start ? v.front() : v.back();
}

}  // namespace

cplx PeriodicSolution::sample(long k, std::size_t j) const {
    return segment[j] * std::polar(1.0, -static_cast<double>(k) * psi);
}

cplx PeriodicSolution::at(double t) const {
    if (!(t >= 0.0)) throw DomainError("PeriodicSolution::at: t must be >= 0");
    const double period = 2.0 * T;
    const auto k = static_cast<long>(std::floor(t / period));
    const double local = std::clamp(t - static_cast<double>(k) * period, 0.0, period);
    const auto& nodes = segment.grid().nodes();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), local);
    const std::size_t j = it == nodes.end() ? nodes.size() - 1 : static_cast<std::size_t>(it - nodes.begin());
    if (j == 0) return sample(k, 0);
    const double w = (local - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
    return ((1.0 - w) * segment[j - 1] + w * segment[j]) * std::polar(1.0, -static_cast<double>(k) * psi);
}

PrimaryOrbit PeriodicSolution::orbit() const { return extended_orbit(mu, T, psi); }

std::optional<int> closure_count(double psi) {
    if (psi == 0.0) return 1;
    const double turns = psi / (2.0 * kPi);
    for (int k = 1; k <= kMaxClosure; ++k) {
        const double x = static_cast<double>(k) * turns;
        if (std::abs(x - std::round(x)) <= 1e-12 * static_cast<double>(k)) return k;
    }
    return std::nullopt;
}

PeriodicSolution build_periodic(double mu, double m, double T, double psi, const MeshConfig& mesh,
                                const SolverConfig& solver, int cycles) {
    if (!(T > 0.0)) throw DomainError("build_periodic: T must be positive");
    if (cycles < 0) throw DomainError("build_periodic: cycles must be >= 0");
    ProblemConfig config{FieldParams(mu, m, extended_orbit(mu, T, psi)),
                         0.0,
                         T,
                         Ray{0.5 * psi},
                         Ray{0.0},
                         mesh,
                         solver,
                         {}};
    config.mesh.singular_end = SingularEnd::Left;
    SolveReport half = refine_and_polish(minimize(config), config);

    const TimeGrid& hg = half.path.grid();
    GridSpec spec = hg.spec();
    spec.reflected = true;
    TimeGrid grid(spec);
    const std::size_t N = hg.segments();
    std::vector<cplx> z(2 * N + 1);
    for (std::size_t k = 0; k <= N; ++k) z[k] = half.path[k];
    for (std::size_t j = 1; j <= N; ++j) z[N + j] = std::conj(half.path[N - j]);
    DiscretePath segment(std::move(grid), std::move(z), Ray{0.5 * psi}, Ray{-0.5 * psi});

    const auto closure = closure_count(psi);
    const int count = cycles > 0 ? cycles : closure.value_or(1);
    PeriodicSolution sol{mu, m, psi, T, std::move(segment), count, closure, std::move(half), {}};
    if (!sol.half.converged) sol.flags.push_back("segment solve did not converge");
    for (const auto& f : sol.half.flags) sol.flags.push_back("segment: " + f);

    const ClosureCheck check = closure_check(sol);
    if (!(check.smoothness_error <= 10.0 * sol.half.el_residual_max)) {
        sol.flags.push_back("velocity jump at a junction exceeds 10x the segment EL residual");
    }
    return sol;
}

ClosureCheck closure_check(const PeriodicSolution& sol) {
    ClosureCheck out{};
    const auto& t = sol.segment.grid().nodes();
    const auto& z = sol.segment.samples();
    const std::size_t N = sol.half.path.grid().segments();
    const std::span<const double> ts(t);
    const std::span<const cplx> zs(z);

    const cplx v_start = velocity_end(ts.subspan(0, N + 1), zs.subspan(0, N + 1), true);
    const cplx v_T_minus = velocity_end(ts.subspan(0, N + 1), zs.subspan(0, N + 1), false);
    const cplx v_T_plus = velocity_end(ts.subspan(N), zs.subspan(N), true);
    const cplx v_end = velocity_end(ts.subspan(N), zs.subspan(N), false);

    out.jump_at_T = std::abs(v_T_plus - v_T_minus);
    // Copy k+1 starts with the rotated start velocity where copy k ends.
    out.jump_at_junction = std::abs(v_start * std::polar(1.0, -sol.psi) - v_end);
    out.smoothness_error = std::max(out.jump_at_T, out.jump_at_junction);
    out.orthogonality_start = std::abs(dot(v_start, ray_direction(0.5 * sol.psi))) / std::abs(v_start);
    out.orthogonality_T = std::abs(v_T_minus.real()) / std::abs(v_T_minus);
    out.closure_error = std::numeric_limits<double>::quiet_NaN();
    if (sol.closure) out.closure_error = std::abs(sol.sample(*sol.closure, 0) - sol.segment[0]);
    return out;
}

}  // namespace roctb
