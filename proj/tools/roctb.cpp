// roctb: command-line driver for the restricted one-center-two-body toolkit.
//
// Exit status: 0 success, 1 a solve did not converge (reports are still
// written), 2 malformed input, 3 numerical or domain failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "roctb/errors.hpp"
#include "roctb/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace roctb;

namespace {

constexpr int kExitNotConverged = 1;
constexpr int kExitParse = 2;
constexpr int kExitNumerical = 3;

void write_text(const fs::path& file, const std::string& text) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
}

void write_json(const fs::path& file, const json& doc) { write_text(file, doc.dump(2) + "\n"); }

struct SolveOutcome {
    json document;
    std::string csv;
    bool converged;
};

SolveOutcome run_solve(const runfile::SolveRun& run, bool sundman) {
    SolveReport report = refine_and_polish(minimize(run.problem), run.problem);
    json doc = solve_document(sundman ? "sundman" : "solve", run, report);
    if (sundman) {
        try {
            doc["sundman"] = to_json(sundman_summary(report, run.problem.params, run.fit_window));
        } catch (const DomainError& e) {
            doc["sundman"] = {{"error", e.what()}};
        }
    }
    std::ostringstream csv;
    write_trajectory_csv(csv, report, run.problem.params);
    return {std::move(doc), csv.str(), report.converged};
}

int cmd_solve(const fs::path& file, const fs::path& out_dir, bool sundman) {
    const json doc = runfile::load(file);
    const runfile::SolveRun run = runfile::parse_solve(doc, file.parent_path(), sundman);
    SolveOutcome outcome = run_solve(run, sundman);
    outcome.document["trajectory"] = run.name + ".csv";
    write_text(out_dir / (run.name + ".csv"), outcome.csv);
    write_json(out_dir / (run.name + ".json"), outcome.document);
    std::cout << (out_dir / (run.name + ".json")).string() << '\n';
    return outcome.converged ? 0 : kExitNotConverged;
}

int cmd_roots(double ratio) {
    std::cout << to_json(find_alphas(ratio)).dump(2) << '\n';
    return 0;
}

struct KeplerArgs {
    double mu = 1.0;
    std::optional<double> energy;
    std::optional<double> apoapsis;
    std::optional<double> t0;
    std::optional<double> t1;
    int samples = 1000;
    std::string name = "kepler";
};

int cmd_kepler(const KeplerArgs& a, const fs::path& out_dir) {
    if (a.energy.has_value() == a.apoapsis.has_value()) throw DomainError("kepler: give exactly one of --energy, --apoapsis");
    const KeplerArc arc = a.apoapsis ? arc_from_apoapsis(a.mu, *a.apoapsis) : KeplerArc(a.mu, *a.energy);
    const double half = arc.t_apoapsis().value_or(1.0);
    std::ostringstream csv;
    write_kepler_csv(csv, arc, a.t0.value_or(-half), a.t1.value_or(half), a.samples);
    write_text(out_dir / (a.name + ".csv"), csv.str());
    std::cout << (out_dir / (a.name + ".csv")).string() << '\n';
    return 0;
}

struct PeriodicArgs {
    std::optional<std::string> file;
    std::optional<std::string> psi;
    std::optional<double> mu;
    std::optional<double> m;
    std::optional<double> T;
    std::optional<int> segments;
    std::optional<int> cycles;
    std::vector<int> refinements;
    std::optional<std::string> name;
};

int cmd_periodic(const PeriodicArgs& a, const fs::path& out_dir) {
    json doc = a.file ? runfile::load(*a.file) : json::object();
    if (a.psi) doc["psi"] = *a.psi;
    if (a.mu) doc["mu"] = *a.mu;
    if (a.m) doc["m"] = *a.m;
    if (a.T) doc["T"] = *a.T;
    if (a.cycles) doc["cycles"] = *a.cycles;
    if (a.name) doc["name"] = *a.name;
    if (!doc.contains("mesh")) doc["mesh"] = {{"segments", 256}, {"refinements", {1024, 4096}}};
    if (a.segments) doc["mesh"]["segments"] = *a.segments;
    if (!a.refinements.empty()) doc["mesh"]["refinements"] = a.refinements;
    const runfile::PeriodicRun run = runfile::parse_periodic(doc);
    const PeriodicSolution sol = build_periodic(run.mu, run.m, run.T, run.psi, run.mesh, run.solver, run.cycles);
    const ClosureCheck check = closure_check(sol);
    json report = periodic_document(run, sol, check);
    report["trajectory"] = run.name + ".csv";
    std::ostringstream csv;
    write_periodic_csv(csv, sol);
    write_text(out_dir / (run.name + ".csv"), csv.str());
    write_json(out_dir / (run.name + ".json"), report);
    std::cout << (out_dir / (run.name + ".json")).string() << '\n';
    return sol.half.converged ? 0 : kExitNotConverged;
}

int cmd_sweep(const fs::path& file, const fs::path& out_dir, int workers) {
    const runfile::SweepRun sweep = runfile::parse_sweep(runfile::load(file));
    // Parse every cell up front so a bad grid fails before any work starts.
    std::vector<runfile::SolveRun> runs;
    for (const auto& cell : sweep.cells) {
        try {
            runs.push_back(runfile::parse_solve(cell.document, file.parent_path(), sweep.sundman));
        } catch (const ParseError& e) {
            throw ParseError("cell " + std::to_string(cell.index) + " " + cell.assignment.dump() + ": " + e.what());
        }
    }
    const fs::path dir = out_dir / sweep.name;
    fs::create_directories(dir);
    const auto n = static_cast<std::ptrdiff_t>(runs.size());
    std::vector<json> entries(runs.size());
    omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        char stem[32];
        std::snprintf(stem, sizeof stem, "cell_%04zu", ui);
        json entry = {{"index", ui}, {"assignment", sweep.cells[ui].assignment}};
        try {
            SolveOutcome outcome = run_solve(runs[ui], sweep.sundman);
            outcome.document["trajectory"] = std::string(stem) + ".csv";
            outcome.document["assignment"] = sweep.cells[ui].assignment;
            write_text(dir / (std::string(stem) + ".csv"), outcome.csv);
            write_json(dir / (std::string(stem) + ".json"), outcome.document);
            entry["report"] = std::string(stem) + ".json";
            entry["converged"] = outcome.converged;
            entry["action"] = outcome.document["result"]["action"];
        } catch (const std::exception& e) {
            entry["converged"] = false;
            entry["error"] = e.what();
        }
        entries[ui] = std::move(entry);
    }
    bool all = true;
    for (const auto& e : entries) all = all && e["converged"].get<bool>();
    write_json(dir / "index.json", {{"name", sweep.name},
                                     {"command", sweep.sundman ? "sundman" : "solve"},
                                     {"cells", entries},
                                     {"all_converged", all}});
    std::cout << (dir / "index.json").string() << '\n';
    return all ? 0 : kExitNotConverged;
}

int default_workers() {
    if (const char* env = std::getenv("ROCTB_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w > 0) return w;
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring ROCTB_WORKERS=" << env << '\n';
    }
    return omp_get_max_threads();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Action minimization for the restricted one-center-two-body problem"};
    app.require_subcommand(1);
    std::string out_dir = ".";
    int workers = default_workers();
    app.add_option("-o,--out", out_dir, "Output directory");
    app.add_option("-j,--workers", workers, "Worker threads (default: $ROCTB_WORKERS or all cores)")
        ->check(CLI::PositiveNumber);

    double ratio = 1.0;
    auto* roots = app.add_subcommand("roots", "Print alpha1 < 1 < alpha2 < alpha3 and their residuals");
    roots->add_option("--mass-ratio", ratio, "m / mu")->required();

    KeplerArgs ka;
    auto* kepler = app.add_subcommand("kepler", "Sample a rectilinear collision Kepler arc to CSV");
    kepler->add_option("--mu", ka.mu, "Center mass");
    kepler->add_option("--energy", ka.energy, "Orbital energy");
    kepler->add_option("--apoapsis", ka.apoapsis, "Apoapsis radius (sets energy -mu/R)");
    kepler->add_option("--t0", ka.t0, "First sample time (default -T)");
    kepler->add_option("--t1", ka.t1, "Last sample time (default T)");
    kepler->add_option("--samples", ka.samples, "Number of intervals");
    kepler->add_option("--name", ka.name, "Output file stem");

    std::string solve_file;
    auto* solve = app.add_subcommand("solve", "Minimize the action for a run file");
    solve->add_option("runfile", solve_file, "JSON run file")->required()->check(CLI::ExistingFile);

    std::string sundman_file;
    auto* sundman = app.add_subcommand("sundman", "Forced-collision solve with ratio and exponent fits");
    sundman->add_option("runfile", sundman_file, "JSON run file")->required()->check(CLI::ExistingFile);

    PeriodicArgs pa;
    auto* periodic = app.add_subcommand("periodic", "Build a (quasi-)periodic orbit from a boundary minimizer");
    periodic->add_option("runfile", pa.file, "JSON run file")->check(CLI::ExistingFile);
    periodic->add_option("--psi", pa.psi, "Reflection angle in units of pi, e.g. -0.8pi");
    periodic->add_option("--mu", pa.mu, "Center mass");
    periodic->add_option("--m", pa.m, "Primary mass");
    periodic->add_option("--T", pa.T, "Half-period of the primary");
    periodic->add_option("--segments", pa.segments, "Segments on [0, T] at the first level");
    periodic->add_option("--refine", pa.refinements, "Segment counts of later levels");
    periodic->add_option("--cycles", pa.cycles, "Copies of [0, 2T] to emit (0: closure count)");
    periodic->add_option("--name", pa.name, "Output file stem");

    std::string sweep_file;
    auto* sweep = app.add_subcommand("sweep", "Run solve over a parameter grid");
    sweep->add_option("runfile", sweep_file, "JSON sweep file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    }
    omp_set_num_threads(workers);

    try {
        const fs::path out(out_dir);
        if (*roots) return cmd_roots(ratio);
        if (*kepler) return cmd_kepler(ka, out);
        if (*solve) return cmd_solve(solve_file, out, false);
        if (*sundman) return cmd_solve(sundman_file, out, true);
        if (*periodic) return cmd_periodic(pa, out);
        if (*sweep) return cmd_sweep(sweep_file, out, workers);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
