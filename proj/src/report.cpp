#include "roctb/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "roctb/errors.hpp"

namespace roctb {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

void write_row(std::ostream& out, double t, cplx z, double theta, double q_abs, double a_ratio, double J,
               double el) {
    out << format_double(t) << ',' << format_double(z.real()) << ',' << format_double(z.imag()) << ','
        << format_double(std::abs(z)) << ',' << format_double(theta) << ',' << format_double(q_abs) << ','
        << format_double(a_ratio) << ',' << format_double(J) << ',' << format_double(el) << '\n';
}

json limit_json(const LimitEstimate& e) {
    return {{"value", e.value}, {"spread", e.spread}, {"samples", e.samples}};
}

json theta_json(const ThetaProfile& p) {
    return {{"verdict", to_string(p.verdict)},
            {"theta_min", p.theta_min},
            {"t_min", p.t_min},
            {"limit_mean", limit_json(p.limit_mean)},
            {"limit_extrapolated", p.limit_extrapolated},
            {"decay_exponent", p.decay_exponent}};
}

bool has_origin(const BoundaryCondition& bc) { return std::holds_alternative<Origin>(bc); }

}  // namespace

void write_trajectory_csv(std::ostream& out, const SolveReport& report, const FieldParams& params) {
    out << kTrajectoryHeader << '\n';
    const DiscretePath& path = report.path;
    const auto& t = path.grid().nodes();
    for (std::size_t k = 0; k < path.size(); ++k) {
        write_row(out, t[k], path[k], report.theta_series[k], std::abs(params.primary(t[k])), report.a_series[k],
                  report.J_series[k], report.el_residual_series[k]);
    }
}

void write_periodic_csv(std::ostream& out, const PeriodicSolution& sol) {
    out << kTrajectoryHeader << '\n';
    const auto& t = sol.segment.grid().nodes();
    const std::size_t n = t.size();
    const std::size_t half = sol.half.path.size() - 1;
    const PrimaryOrbit orbit = sol.orbit();
    const std::vector<double> J = angular_momentum(sol.segment);
    // Node j and its mirror 2N - j share |res|; both ends of the half solve are NaN.
    std::vector<double> el(n, kNaN);
    for (std::size_t j = 0; j <= half; ++j) {
        el[j] = sol.half.el_residual_series[j];
        el[n - 1 - j] = sol.half.el_residual_series[j];
    }
    double theta_prev = kNaN;
    for (long k = 0; k < sol.cycles; ++k) {
        const double shift = 2.0 * sol.T * static_cast<double>(k);
        for (std::size_t j = (k == 0 ? 0 : 1); j < n; ++j) {
            const double time = shift + t[j];
            const cplx z = sol.sample(k, j);
            double theta = std::arg(z);
            if (!std::isnan(theta_prev)) theta = theta_prev + std::remainder(theta - theta_prev, 2.0 * kPi);
            theta_prev = theta;
            const double q_abs = std::abs(primary_position(orbit, time));
            write_row(out, time, z, theta, q_abs, q_abs > 0.0 ? std::abs(z) / q_abs : kNaN, J[j], el[j]);
        }
    }
}

void write_kepler_csv(std::ostream& out, const KeplerArc& arc, double t0, double t1, int samples) {
    if (samples < 2) throw DomainError("write_kepler_csv: need at least 2 samples");
    if (!(t0 < t1)) throw DomainError("write_kepler_csv: t0 must be below t1");
    const auto n = static_cast<std::size_t>(samples) + 1;
    std::vector<double> t(n);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = i + 1 == n ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples);
        r[i] = arc.radius(t[i]);
    }
    const auto rdd = second_derivative(t, r);
    out << kTrajectoryHeader << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        const cplx q = arc.position(t[i]);
        const double theta = r[i] > 0.0 ? std::arg(q) : kNaN;
        const double el = r[i] > 0.0 && !std::isnan(rdd[i]) ? std::abs(rdd[i] + arc.mu() / (r[i] * r[i])) : kNaN;
        write_row(out, t[i], q, theta, r[i], 1.0, 0.0, el);
    }
}

json to_json(const BoundaryCondition& bc) {
    struct V {
        json operator()(const FixedPoint& f) const { return {{"fixed", {f.z.real(), f.z.imag()}}}; }
        json operator()(const Ray& r) const { return {{"ray", r.angle / kPi}}; }
        json operator()(const Origin&) const { return "origin"; }
    };
    return std::visit(V{}, bc);
}

json to_json(const SolveReport& report) {
    json levels = json::array();
    for (const auto& l : report.levels) {
        levels.push_back({{"segments", l.segments},
                          {"iterations", l.iterations},
                          {"converged", l.converged},
                          {"action", l.action},
                          {"grad_norm", l.grad_norm},
                          {"el_residual_max", l.el_residual_max}});
    }
    const bool all_negative =
        std::all_of(report.decreases.begin(), report.decreases.end(), [](double d) { return d < 0.0; });
    const double largest =
        report.decreases.empty() ? kNaN : *std::max_element(report.decreases.begin(), report.decreases.end());
    return {{"converged", report.converged},
            {"iterations", report.iterations},
            {"action", report.action},
            {"grad_norm", report.grad_norm},
            {"el_residual_max", report.el_residual_max},
            {"min_dist_center", report.min_dist_center},
            {"min_dist_primary", report.min_dist_primary},
            {"transversality", {{"left", report.transversality.left}, {"right", report.transversality.right}}},
            {"accepted_steps", {{"count", report.decreases.size()},
                                {"all_strict_decrease", all_negative},
                                {"largest_change", largest}}},
            {"levels", levels},
            {"flags", report.flags}};
}

json to_json(const RootTriple& roots) {
    const double r = roots.mass_ratio;
    return {{"mass_ratio", r},
            {"alpha1", roots.alpha1},
            {"alpha2", roots.alpha2},
            {"alpha3", roots.alpha3},
            {"residuals",
             {{"alpha1", h_at_pi(roots.alpha1, r)},
              {"alpha2", h_at_zero(roots.alpha2, r)},
              {"alpha3", h_at_pi(roots.alpha3, r)}}}};
}

json to_json(const ClosureCheck& check) {
    return {{"closure_error", check.closure_error},
            {"jump_at_T", check.jump_at_T},
            {"jump_at_junction", check.jump_at_junction},
            {"smoothness_error", check.smoothness_error},
            {"orthogonality_start", check.orthogonality_start},
            {"orthogonality_T", check.orthogonality_T}};
}

SundmanSummary sundman_summary(const SolveReport& report, const FieldParams& params, std::optional<Window> window) {
    const DiscretePath& path = report.path;
    const Window w = window.value_or(innermost_decade(path.grid()));
    const RootTriple roots = find_alphas(params.m / params.mu);
    const double beta = angular_decay_exponent(roots.alpha2, params.m / params.mu);
    std::vector<double> radii(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) radii[k] = std::abs(path[k]);
    const auto& t = path.grid().nodes();
    const double t_sing = path.grid().singular_end() == SingularEnd::Right ? path.grid().t_end() : path.grid().t_start();
    std::vector<double> s(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) s[k] = t[k] - t_sing;
    return {roots, ratio_limits(path, params.orbit, w), fit_power_law(s, radii, w.lo, w.hi),
            theta_profile(path, w, beta), beta};
}

json to_json(const SundmanSummary& s) {
    return {{"roots", to_json(s.roots)},
            {"window", {s.fit.t_lo, s.fit.t_hi}},
            {"ratio_limits",
             {{"a", limit_json(s.ratios.a_limit)}, {"b", limit_json(s.ratios.b_limit)}, {"c", limit_json(s.ratios.c_limit)}}},
            {"power_law",
             {{"exponent", s.fit.exponent},
              {"prefactor", s.fit.prefactor},
              {"rms_log_residual", s.fit.rms_log_residual},
              {"samples", s.fit.samples}}},
            {"theta", theta_json(s.theta)},
            {"reference_exponent", s.reference_exponent}};
}

json solve_document(const std::string& command, const runfile::SolveRun& run, const SolveReport& report) {
    const ProblemConfig& p = run.problem;
    const KeplerArc& arc = std::get<KeplerArc>(p.params.orbit);
    json refinements = p.mesh.refinements;
    json doc = {
        {"command", command},
        {"name", run.name},
        {"problem",
         {{"mu", p.params.mu},
          {"m", p.params.m},
          {"primary_energy", arc.energy()},
          {"interval", {p.t_start, p.t_end}},
          {"left", to_json(p.left)},
          {"right", to_json(p.right)},
          {"mesh",
           {{"segments", p.mesh.segments},
            {"gamma", p.mesh.gamma},
            {"singular_end", p.mesh.singular_end == SingularEnd::Left ? "left" : "right"},
            {"refinements", refinements}}},
          {"solver",
           {{"grad_tol", p.solver.grad_tol},
            {"max_iterations", p.solver.max_iterations},
            {"memory", p.solver.memory},
            {"armijo", p.solver.armijo},
            {"max_backtracks", p.solver.max_backtracks}}}}},
        {"result", to_json(report)},
    };
    try {
        doc["theta"] = theta_json(theta_profile(report.path));
    } catch (const DomainError& e) {
        doc["theta"] = {{"error", e.what()}};
    }
    if (!has_origin(p.left) && !has_origin(p.right)) {
        doc["collision_free"] = report.min_dist_center > 0.0 && report.min_dist_primary > 0.0;
    }
    return doc;
}

json periodic_document(const runfile::PeriodicRun& run, const PeriodicSolution& sol, const ClosureCheck& check) {
    json closure = sol.closure ? json(*sol.closure) : json(nullptr);
    return {{"command", "periodic"},
            {"name", run.name},
            {"problem", {{"mu", run.mu}, {"m", run.m}, {"T", run.T}, {"psi", run.psi / kPi}}},
            {"closure", closure},
            {"cycles", sol.cycles},
            {"period", 2.0 * run.T * sol.cycles},
            {"check", to_json(check)},
            {"el_residual_scale", sol.half.el_residual_max},
            {"segment", to_json(sol.half)},
            {"flags", sol.flags}};
}

}  // namespace roctb
