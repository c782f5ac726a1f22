#pragma once

// Periodic and quasi-periodic orbits built from one boundary-angle minimizer.
//
// The primary follows ExtendedOrbit(mu, T, psi): it collides with the center
// at t = 2kT and turns the ray angle by -psi each time. A minimizer on [0, T]
// from the ray psi/2 to the positive real axis is mirrored to [T, 2T] by
// z(2T - t) = conj z(t), and copies rotated by e^{-ik psi} fill
// [2kT, 2(k+1)T].

#include <optional>
#include <string>
#include <vector>

#include "roctb/minimizer.hpp"

namespace roctb {

struct PeriodicSolution {
    double mu;
    double m;
    double psi;
    double T;
    /// The mirrored minimizer on [0, 2T].
    DiscretePath segment;
    /// Number of [0, 2T] copies emitted.
    int cycles;
    /// Smallest k with k psi in 2 pi Z; absent when psi/pi is not a
    /// rational with a small denominator.
    std::optional<int> closure;
    /// The minimization on [0, T].
    SolveReport half;
    std::vector<std::string> flags;

    /// Copy k of segment node j: segment[j] e^{-ik psi}.
    cplx sample(long k, std::size_t j) const;
    /// z(t) for t >= 0, linear between segment nodes.
    cplx at(double t) const;
    PrimaryOrbit orbit() const;
};

/// Denominator search bound for closure_count.
inline constexpr int kMaxClosure = 1000;

/// Smallest k in [1, kMaxClosure] with k psi in 2 pi Z, matched to 1e-12.
std::optional<int> closure_count(double psi);

/// cycles = 0 picks the closure count, or 1 when there is none.
PeriodicSolution build_periodic(double mu, double m, double T, double psi, const MeshConfig& mesh,
                                const SolverConfig& solver = {}, int cycles = 0);

struct ClosureCheck {
    /// |z(2kT) - z(0)| at k = closure; NaN without closure.
    double closure_error;
    /// |z'(T+) - z'(T-)| from one-sided three-point stencils.
    double jump_at_T;
    /// |z'(2kT+) - z'(2kT-)|, identical for every k >= 1.
    double jump_at_junction;
    /// max of the two jumps.
    double smoothness_error;
    /// |<z'(0+), e^{i psi/2}>| / |z'(0+)|.
    double orthogonality_start;
    /// |<z'(T-), 1>| / |z'(T-)|.
    double orthogonality_T;
};

ClosureCheck closure_check(const PeriodicSolution& sol);

}  // namespace roctb
