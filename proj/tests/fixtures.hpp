#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "roctb/minimizer.hpp"

namespace fixture {

using namespace roctb;

inline FieldParams apo_field(double mu = 1.0, double m = 1.0, double R = 1.0) {
    return {mu, m, arc_from_apoapsis(mu, R)};
}

/// Ray-to-ray problem on [-T, 0] for the apoapsis arc, angles in units of pi.
inline ProblemConfig ray_problem(double phi, double phi0, int segments, std::vector<int> refinements = {}) {
    const FieldParams p = apo_field();
    const double T = *std::get<KeplerArc>(p.orbit).t_apoapsis();
    ProblemConfig c{p, -T, 0.0, Ray{phi * std::numbers::pi}, Ray{phi0 * std::numbers::pi}, MeshConfig{}, SolverConfig{},
                    InitConfig{}};
    c.mesh.segments = segments;
    c.mesh.refinements = std::move(refinements);
    return c;
}

/// Forced collision at t = 0 on [-1, 0] with the zero-energy primary.
inline ProblemConfig sundman_problem(double phi, int segments, std::vector<int> refinements = {}) {
    ProblemConfig c{FieldParams{1.0, 1.0, KeplerArc(1.0, 0.0)}, -1.0, 0.0, Ray{phi * std::numbers::pi}, Origin{},
                    MeshConfig{}, SolverConfig{}, InitConfig{}};
    c.mesh.segments = segments;
    c.mesh.refinements = std::move(refinements);
    return c;
}

}  // namespace fixture
