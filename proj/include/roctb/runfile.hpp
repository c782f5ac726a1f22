#pragma once

// JSON run files. Angles are given in units of pi: 0.75 means 3 pi / 4.
//
// A solve run file:
//   {
//     "name": "fig1",
//     "mu": 1, "m": 1,
//     "primary": {"apoapsis": 1} | {"energy": 0} | {"boundary": {"R": 1, "v": -0.5}},
//     "interval": [-1.1107, 0],           // defaults to [-T, 0] when T is known
//     "left":  {"ray": 0.75} | {"fixed": [x, y]} | "origin",
//     "right": {"ray": 0.25} | ...,
//     "mesh":   {"segments": 256, "gamma": 1.5, "singular_end": "right", "refinements": [1024, 4096]},
//     "solver": {"grad_tol": 1e-10, "max_iterations": 20000, "memory": 12,
//                "armijo": 1e-4, "max_backtracks": 60, "exec": "parallel"},
//     "init":   {"kind": "auto" | "provided" | "mirror", "branch": "auto" | "inner" | "outer",
//                "path": "start.csv", "jitter": 0, "seed": 0},
//     "fit":    {"window": [lo, hi]}     // sundman only; default: innermost decade
//   }
//
// A sweep run file holds a "base" solve document and a "grid" mapping JSON
// pointers into it to lists of values; cells are the Cartesian product in
// key order.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "roctb/analysis.hpp"
#include "roctb/minimizer.hpp"

namespace roctb::runfile {

using json = nlohmann::json;

/// Reads and parses a file. Syntax errors report line and column.
json load(const std::filesystem::path& file);

/// "0.75", "-0.8pi", "-4/5" or "-4/5pi" (the suffix is optional) -> radians.
double parse_angle(const std::string& text);

struct SolveRun {
    std::string name;
    ProblemConfig problem;
    std::optional<Window> fit_window;
};

/// `sundman` forces the right end to Origin at t = 0 and defaults the
/// primary to the zero-energy arc and the left end to the ray at 0.
SolveRun parse_solve(const json& doc, const std::filesystem::path& base_dir, bool sundman);

struct PeriodicRun {
    std::string name;
    double mu;
    double m;
    double T;
    double psi;
    MeshConfig mesh;
    SolverConfig solver;
    int cycles;
};

PeriodicRun parse_periodic(const json& doc);

struct SweepCell {
    std::size_t index;
    /// pointer -> value for this cell.
    json assignment;
    json document;
};

struct SweepRun {
    std::string name;
    bool sundman;
    std::vector<SweepCell> cells;
};

SweepRun parse_sweep(const json& doc);

}  // namespace roctb::runfile
