#pragma once

// Report documents (JSON) and trajectory CSVs.
//
// Every CSV starts with the header
//   t,re_z,im_z,r,theta,q_abs,a_ratio,J,el_residual
// and prints doubles in shortest round-trip form, so identical runs give
// identical bytes.

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "roctb/minimizer.hpp"
#include "roctb/periodic.hpp"
#include "roctb/roots.hpp"
#include "roctb/runfile.hpp"

namespace roctb {

inline constexpr const char* kTrajectoryHeader = "t,re_z,im_z,r,theta,q_abs,a_ratio,J,el_residual";

void write_trajectory_csv(std::ostream& out, const SolveReport& report, const FieldParams& params);

/// Copies 0..cycles-1 of the mirrored segment, junction nodes written once.
void write_periodic_csv(std::ostream& out, const PeriodicSolution& sol);

/// The primary itself (z = q) on `samples` + 1 uniform times in [t0, t1];
/// el_residual is |r'' + mu/r^2| with r'' from the nonuniform stencil.
void write_kepler_csv(std::ostream& out, const KeplerArc& arc, double t0, double t1, int samples);

nlohmann::json to_json(const BoundaryCondition& bc);
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const RootTriple& roots);
nlohmann::json to_json(const ClosureCheck& check);

struct SundmanSummary {
    RootTriple roots;
    RatioSeries ratios;
    PowerLawFit fit;
    ThetaProfile theta;
    /// Linearized decay exponent used for the theta extrapolation.
    double reference_exponent;
};

/// Ratio limits, power-law fit and theta extrapolation near the collision.
SundmanSummary sundman_summary(const SolveReport& report, const FieldParams& params, std::optional<Window> window);

nlohmann::json to_json(const SundmanSummary& summary);

/// Problem echo plus every diagnostic of the report.
nlohmann::json solve_document(const std::string& command, const runfile::SolveRun& run, const SolveReport& report);

nlohmann::json periodic_document(const runfile::PeriodicRun& run, const PeriodicSolution& sol,
                                 const ClosureCheck& check);

}  // namespace roctb
