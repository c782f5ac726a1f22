// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance and runtime bound is a named constant below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <json.hpp>

#include "oracles.hpp"
#include "roctb/action.hpp"
#include "roctb/analysis.hpp"
#include "roctb/errors.hpp"
#include "roctb/periodic.hpp"
#include "roctb/report.hpp"
#include "roctb/roots.hpp"
#include "roctb/runfile.hpp"

using namespace roctb;
using nlohmann::json;
using std::numbers::pi;

namespace {

// 1. roots
constexpr double kRootResidual = 1e-12;
constexpr double kRootOracle = 1e-10;
constexpr int kScanPoints = 100000;
constexpr double kRootSeconds = 1.0;
// 2. gradient
constexpr int kGradientPaths = 50;
constexpr int kGradientSegments = 64;
constexpr double kFdStep = 1e-7;
constexpr double kGradientRel = 1e-6;
constexpr double kGradientSeconds = 10.0;
// 3. homothetic certification
constexpr double kHomotheticFactor = 2.0;
constexpr double kHomotheticFloor = 0.1;
constexpr double kResidualWindow = 1e-2;  // |t| >= this, on [-1, 0]
constexpr double kPerturb = 1.15;
constexpr double kHomotheticSeconds = 30.0;
// 4. forced collision, phi = 0
constexpr double kExponentRel = 1e-2;
constexpr double kRatioRel = 2e-2;
constexpr double kSundmanSeconds = 120.0;
// 5. limit angle
constexpr double kLimitAngle = 5e-2;
constexpr double kDichotomySeconds = 300.0;
// 6. boundary angles
constexpr double kMinDistance = 1e-3;  // times R = 1
constexpr double kTransversality = 1e-3;
constexpr double kBoundarySeconds = 180.0;
// 7. two-body law
constexpr double kKeplerExponent = 1e-3;
constexpr double kKeplerSeconds = 1.0;
// 8. periodic
constexpr double kClosureError = 1e-12;
constexpr double kJumpFactor = 10.0;
constexpr double kOrthogonality = 1e-3;
constexpr double kPeriodicSeconds = 120.0;
// 9. determinism
constexpr double kDeterminismSeconds = 180.0;

const std::vector<int> kLadder{1024, 4096};
constexpr int kBaseSegments = 256;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome root_correctness() {
    bool ok = true;
    std::string detail;
    for (double r : {0.5, 1.0, 2.0}) {
        const RootTriple t = find_alphas(r);
        const double res = std::max({std::abs(h_at_pi(t.alpha1, r)), std::abs(h_at_zero(t.alpha2, r)),
                                     std::abs(h_at_pi(t.alpha3, r))});
        const auto in = oracle::scan_roots([r](double a) { return oracle::h_direct(a, pi, r); }, 1e-3, 0.999, kScanPoints);
        const auto z = oracle::scan_roots([r](double a) { return oracle::h_direct(a, 0.0, r); }, 1.0, 5.0, kScanPoints);
        const auto out = oracle::scan_roots([r](double a) { return oracle::h_direct(a, pi, r); }, 1.001, 5.0, kScanPoints);
        double err = INFINITY;
        if (in.size() == 1 && z.size() == 1 && out.size() == 1) {
            err = std::max({std::abs(t.alpha1 - in[0]), std::abs(t.alpha2 - z[0]), std::abs(t.alpha3 - out[0])});
        }
        const bool ordered = t.alpha1 < 1.0 && 1.0 < t.alpha2 && t.alpha2 < t.alpha3;
        ok = ok && ordered && res < kRootResidual && err < kRootOracle;
        detail += fmt("m/mu=%g: |h|max=%.1e oracle=%.1e; ", r, res, err);
    }
    return {ok, detail};
}

Outcome gradient_exactness() {
    std::mt19937_64 rng(20240601);
    // Ray angles keep the polar starting path off the primary's ray.
    std::uniform_real_distribution<double> left(0.3 * pi, 0.8 * pi), right(-0.15 * pi, 0.3 * pi);
    const KeplerArc arc = arc_from_apoapsis(1.0, 1.0);
    const FieldParams params(1.0, 1.0, arc);
    double worst = 0.0;
    std::size_t components = 0;
    for (int trial = 0; trial < kGradientPaths; ++trial) {
        ProblemConfig c{params, -*arc.t_apoapsis(), 0.0, Ray{left(rng)}, Ray{right(rng)}, MeshConfig{}, SolverConfig{},
                        InitConfig{}};
        c.init.jitter = 0.05;
        c.init.seed = rng();
        const TimeGrid g = build_grid(c.t_start, c.t_end, kGradientSegments, 1.5, SingularEnd::Right);
        const DiscretePath path = initial_path(c, g);
        const ActionFunctional f(g, params);
        const std::vector<double> grad = f.free_gradient(path);
        const std::vector<double> x = path.free_coordinates();
        for (std::size_t i = 0; i < x.size(); ++i) {
            DiscretePath plus = path, minus = path;
            auto xp = x, xm = x;
            xp[i] += kFdStep;
            xm[i] -= kFdStep;
            plus.set_free_coordinates(xp);
            minus.set_free_coordinates(xm);
            const double fd = f.difference(minus.samples(), plus.samples()) / (2.0 * kFdStep);
            worst = std::max(worst, std::abs(grad[i] - fd) / std::abs(grad[i]));
            ++components;
        }
    }
    return {worst < kGradientRel, fmt("%zu components, max rel err %.2e", components, worst)};
}

/// max |EL residual| r^2 / mu over nodes with |t| >= kResidualWindow.
double scaled_residual(double alpha, bool at_pi, int segments) {
    const KeplerArc arc(1.0, 0.0);
    const FieldParams params(1.0, 1.0, arc);
    const TimeGrid g = build_grid(-1.0, 0.0, segments, 1.5, SingularEnd::Right);
    std::vector<cplx> z(g.nodes().size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double r = alpha * arc.radius(g[k]);
        z[k] = at_pi ? cplx(-r, 0.0) : cplx(r, 0.0);
    }
    const DiscretePath path(g, z, FixedPoint{z.front()}, Origin{});
    const std::vector<cplx> res = el_residual(path, params);
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < z.size(); ++k) {
        if (std::abs(g[k]) < kResidualWindow) continue;
        worst = std::max(worst, std::abs(res[k - 1]) * std::norm(z[k]) / params.mu);
    }
    return worst;
}

Outcome homothetic_certification() {
    const RootTriple al = find_alphas(1.0);
    struct Case {
        const char* name;
        double alpha;
        bool at_pi;
    };
    const Case cases[] = {{"a2", al.alpha2, false}, {"a1", al.alpha1, true}, {"a3", al.alpha3, true}};
    const int levels[] = {256, 1024, 4096};
    bool ok = true;
    std::string detail;
    for (const Case& c : cases) {
        double exact[3];
        double off[3];
        for (int i = 0; i < 3; ++i) {
            exact[i] = scaled_residual(c.alpha, c.at_pi, levels[i]);
            off[i] = scaled_residual(kPerturb * c.alpha, c.at_pi, levels[i]);
        }
        const bool shrinks = exact[0] >= kHomotheticFactor * exact[1] && exact[1] >= kHomotheticFactor * exact[2];
        const bool floored = off[0] >= kHomotheticFloor && off[1] >= kHomotheticFloor && off[2] >= kHomotheticFloor;
        ok = ok && shrinks && floored;
        detail += fmt("%s %.1e>%.1e>%.1e, x%.2f stays %.3f; ", c.name, exact[0], exact[1], exact[2], kPerturb, off[2]);
    }
    return {ok, detail};
}

struct SundmanRun {
    SolveReport report;
    SundmanSummary summary;
};

SundmanRun sundman(double phi_over_pi) {
    const json doc{{"left", {{"ray", phi_over_pi}}}, {"mesh", {{"segments", kBaseSegments}, {"refinements", kLadder}}}};
    const runfile::SolveRun run = runfile::parse_solve(doc, ".", true);
    SolveReport r = refine_and_polish(minimize(run.problem), run.problem);
    SundmanSummary s = sundman_summary(r, run.problem.params, run.fit_window);
    return {std::move(r), std::move(s)};
}

Outcome forced_collision() {
    const SundmanRun run = sundman(0.0);
    const double alpha2 = run.summary.roots.alpha2;
    const double exp_err = std::abs(run.summary.fit.exponent / (2.0 / 3.0) - 1.0);
    const double a_err = std::abs(run.summary.ratios.a_limit.value / alpha2 - 1.0);
    const bool ok = run.report.converged && run.report.path.size() == 4097 && exp_err < kExponentRel && a_err < kRatioRel;
    return {ok, fmt("N=%zu exponent %.4f (%.2f%%), a-limit %.4f vs alpha2 %.4f (%.2f%%)", run.report.path.size() - 1,
                    run.summary.fit.exponent, 100 * exp_err, run.summary.ratios.a_limit.value, alpha2, 100 * a_err)};
}

Outcome limit_angle() {
    bool ok = true;
    std::string detail;
    for (double phi : {1.0 / 6.0, 1.0 / 3.0, 0.5}) {
        const SundmanRun run = sundman(phi);
        const ThetaProfile& th = run.summary.theta;
        const bool pass = run.report.converged && th.verdict == ThetaVerdict::MonotoneDecreasing &&
                          std::abs(th.limit_extrapolated) < kLimitAngle;
        ok = ok && pass;
        detail += fmt("phi=%.3fpi %s limit %.4f; ", phi, to_string(th.verdict).c_str(), th.limit_extrapolated);
    }
    return {ok, detail};
}

json boundary_doc(double phi, double phi0) {
    return {{"name", "boundary"},
            {"mu", 1},
            {"m", 1},
            {"primary", {{"apoapsis", 1}}},
            {"left", {{"ray", phi}}},
            {"right", {{"ray", phi0}}},
            {"mesh", {{"segments", kBaseSegments}, {"refinements", kLadder}}}};
}

SolveReport boundary_solve(const json& doc) {
    const runfile::SolveRun run = runfile::parse_solve(doc, ".", false);
    return refine_and_polish(minimize(run.problem), run.problem);
}

Outcome boundary_angles() {
    bool ok = true;
    std::string detail;
    for (auto [phi, phi0] : {std::pair{0.75, 0.25}, {0.5, 0.0}, {1.0 / 6.0, 0.5}}) {
        const SolveReport r = boundary_solve(boundary_doc(phi, phi0));
        const ThetaVerdict v = theta_profile(r.path).verdict;
        const bool monotone = v == ThetaVerdict::MonotoneDecreasing || v == ThetaVerdict::MonotoneIncreasing;
        // A single minimum may sit at either end, so a monotone profile also qualifies.
        const bool shape = std::min(phi, phi0) == 0.0 ? monotone : (monotone || v == ThetaVerdict::Unimodal);
        const bool pass = r.converged && r.min_dist_center > kMinDistance && r.min_dist_primary > kMinDistance &&
                          shape && r.transversality.left < kTransversality && r.transversality.right < kTransversality;
        ok = ok && pass;
        detail += fmt("(%.3gpi,%.3gpi) %s d=%.2f/%.2f tr=%.0e/%.0e; ", phi, phi0, to_string(v).c_str(), r.min_dist_center,
                      r.min_dist_primary, r.transversality.left, r.transversality.right);
    }
    return {ok, detail};
}

Outcome two_body_law() {
    std::vector<double> t;
    for (int i = 0; i < 200; ++i) t.push_back(-std::pow(10.0, -3.0 - 2.0 * i / 199.0));
    bool ok = true;
    std::string detail;
    for (double e : {-1.0, 0.0, 1.0}) {
        const KeplerArc arc(1.0, e);
        std::vector<double> r;
        for (double ti : t) r.push_back(arc.radius(ti));
        const double b = fit_power_law(t, r, 1e-5, 1e-3).exponent;
        ok = ok && std::abs(b - 2.0 / 3.0) < kKeplerExponent;
        detail += fmt("E=%g: %.6f; ", e, b);
    }
    return {ok, detail};
}

Outcome periodic_construction() {
    const runfile::PeriodicRun run = runfile::parse_periodic(
        json{{"psi", "-4/5pi"}, {"mesh", {{"segments", kBaseSegments}, {"refinements", kLadder}}}});
    const PeriodicSolution sol = build_periodic(run.mu, run.m, run.T, run.psi, run.mesh, run.solver, run.cycles);
    const ClosureCheck c = closure_check(sol);
    const double scale = sol.half.el_residual_max;
    const bool ok = sol.half.converged && sol.closure == 5 && c.closure_error < kClosureError &&
                    c.jump_at_T < kJumpFactor * scale && c.jump_at_junction < kJumpFactor * scale &&
                    c.orthogonality_start < kOrthogonality && c.orthogonality_T < kOrthogonality;
    return {ok, fmt("k=%d closure err %.1e, jumps %.1e/%.1e vs EL scale %.1e, orthogonality %.0e/%.0e",
                    sol.closure.value_or(-1), c.closure_error, c.jump_at_T, c.jump_at_junction, scale,
                    c.orthogonality_start, c.orthogonality_T)};
}

std::string boundary_csv(int threads) {
    const int saved = omp_get_max_threads();
    omp_set_num_threads(threads);
    const json doc = boundary_doc(0.75, 0.25);
    const runfile::SolveRun run = runfile::parse_solve(doc, ".", false);
    const SolveReport r = refine_and_polish(minimize(run.problem), run.problem);
    std::ostringstream out;
    write_trajectory_csv(out, r, run.problem.params);
    omp_set_num_threads(saved);
    return out.str();
}

Outcome determinism() {
    const std::string a = boundary_csv(omp_get_max_threads());
    const std::string b = boundary_csv(omp_get_max_threads());
    const std::string c = boundary_csv(4);
    const bool ok = a == b && a == c && !a.empty();
    return {ok, fmt("%zu bytes; repeat %s, 4 threads %s", a.size(), a == b ? "identical" : "DIFFERS",
                    a == c ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "root correctness", kRootSeconds, root_correctness},
        {2, "gradient exactness", kGradientSeconds, gradient_exactness},
        {3, "homothetic certification", kHomotheticSeconds, homothetic_certification},
        {4, "forced-collision asymptotics", kSundmanSeconds, forced_collision},
        {5, "limit-angle dichotomy", kDichotomySeconds, limit_angle},
        {6, "boundary-angle solutions", kBoundarySeconds, boundary_angles},
        {7, "two-body 2/3 law", kKeplerSeconds, two_body_law},
        {8, "periodic construction", kPeriodicSeconds, periodic_construction},
        {9, "determinism", kDeterminismSeconds, determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = dt < c.seconds;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) o.detail.pop_back();
        std::printf("%s %d %s: %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), dt,
                    c.seconds, in_time ? "" : ", TOO SLOW");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
