#include "roctb/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <random>

#include "roctb/errors.hpp"

namespace roctb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool is_ray(const BoundaryCondition& bc) { return std::holds_alternative<Ray>(bc); }

// rho e - z, exact, for a Ray endpoint stored as z = fl(rho e).
cplx ray_rounding(const BoundaryCondition& bc, cplx z, double rho) {
    const auto* ray = std::get_if<Ray>(&bc);
    if (ray == nullptr) return {0.0, 0.0};
    const cplx e = ray_direction(ray->angle);
    return {std::fma(rho, e.real(), -z.real()), std::fma(rho, e.imag(), -z.imag())};
}

// Action change from moving the ray endpoints off the exact rays by their
// rounding residuals, to first order. Without it the perpendicular endpoint
// force turns ulp-level storage error into a noise floor on every
// difference, far above the decreases near convergence.
double rounding_correction(const DiscretePath& from, const DiscretePath& to, std::span<const double> x_from,
                           std::span<const double> x_to, std::span<const cplx> node_grad) {
    const auto term = [&](const BoundaryCondition& bc, std::size_t k, std::size_t slot) {
        if (!is_ray(bc)) return 0.0;
        const double rho_from = std::max(0.0, x_from[slot]);
        const double rho_to = std::max(0.0, x_to[slot]);
        const cplx dr = ray_rounding(bc, to[k], rho_to) - ray_rounding(bc, from[k], rho_from);
        return node_grad[k].real() * dr.real() + node_grad[k].imag() * dr.imag();
    };
    return term(from.left(), 0, 0) + term(from.right(), from.size() - 1, x_from.size() - 1);
}

// Inverse of the kinetic-energy Hessian (plus a small lumped mass term so
// that parallel rays stay invertible), restricted to the free coordinates.
// Interior nodes give a tridiagonal matrix shared by x and y; each ray
// radius couples only to its neighbouring node and is eliminated through a
// Schur complement of size at most 2.
class KineticPreconditioner {
public:
    KineticPreconditioner(const TimeGrid& grid, const BoundaryCondition& left, const BoundaryCondition& right)
        : left_ray_(is_ray(left)), right_ray_(is_ray(right)) {
        const std::size_t N = grid.segments();
        n_ = N - 1;
        const double L = grid.t_end() - grid.t_start();
        const double sigma = 1.0 / (L * L);
        std::vector<double> w(N);
        for (std::size_t k = 0; k < N; ++k) w[k] = 1.0 / grid.dt(k);
        w0_ = w.front();
        wN_ = w.back();

        diag_.resize(n_);
        off_.resize(n_ > 0 ? n_ - 1 : 0);
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t node = i + 1;
            const double mass = 0.5 * (grid.dt(node - 1) + grid.dt(node));
            diag_[i] = w[node - 1] + w[node] + sigma * mass;
            if (i + 1 < n_) off_[i] = -w[node];
        }
        factor();

        if (left_ray_) e_left_ = ray_direction(std::get<Ray>(left).angle);
        if (right_ray_) e_right_ = ray_direction(std::get<Ray>(right).angle);
        const double dl = w0_ + sigma * 0.5 * grid.dt(0);
        const double dr = wN_ + sigma * 0.5 * grid.dt(N - 1);

        u_left_.assign(n_, 0.0);
        u_right_.assign(n_, 0.0);
        if (left_ray_) {
            u_left_[0] = 1.0;
            solve(u_left_);
        }
        if (right_ray_) {
            u_right_[n_ - 1] = 1.0;
            solve(u_right_);
        }
        const double cross = e_left_.real() * e_right_.real() + e_left_.imag() * e_right_.imag();
        s_ll_ = dl - w0_ * w0_ * u_left_[0];
        s_rr_ = dr - wN_ * wN_ * u_right_[n_ - 1];
        s_lr_ = (left_ray_ && right_ray_) ? -w0_ * wN_ * u_right_[0] * cross : 0.0;
    }

    /// p = P^{-1} g in the free-coordinate layout.
    void apply(std::span<const double> g, std::span<double> p) const {
        std::size_t off = left_ray_ ? 1 : 0;
        std::vector<double> gx(n_);
        std::vector<double> gy(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            gx[i] = g[off + 2 * i];
            gy[i] = g[off + 2 * i + 1];
        }
        solve(gx);
        solve(gy);
        double pl = 0.0;
        double pr = 0.0;
        const double rl = left_ray_ ? g[0] + w0_ * (e_left_.real() * gx[0] + e_left_.imag() * gy[0]) : 0.0;
        const double rr = right_ray_ ? g[g.size() - 1] + wN_ * (e_right_.real() * gx[n_ - 1] +
                                                                  e_right_.imag() * gy[n_ - 1])
                                     : 0.0;
        if (left_ray_ && right_ray_) {
            const double det = s_ll_ * s_rr_ - s_lr_ * s_lr_;
            pl = (rl * s_rr_ - s_lr_ * rr) / det;
            pr = (s_ll_ * rr - s_lr_ * rl) / det;
        } else if (left_ray_) {
            pl = rl / s_ll_;
        } else if (right_ray_) {
            pr = rr / s_rr_;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            double x = gx[i];
            double y = gy[i];
            if (left_ray_) {
                x += w0_ * pl * u_left_[i] * e_left_.real();
                y += w0_ * pl * u_left_[i] * e_left_.imag();
            }
            if (right_ray_) {
                x += wN_ * pr * u_right_[i] * e_right_.real();
                y += wN_ * pr * u_right_[i] * e_right_.imag();
            }
            p[off + 2 * i] = x;
            p[off + 2 * i + 1] = y;
        }
        if (left_ray_) p[0] = pl;
        if (right_ray_) p[p.size() - 1] = pr;
    }

private:
    void factor() {
        cprime_.resize(n_);
        denom_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const double sub = i > 0 ? off_[i - 1] : 0.0;
            denom_[i] = diag_[i] - (i > 0 ? sub * cprime_[i - 1] : 0.0);
            cprime_[i] = i + 1 < n_ ? off_[i] / denom_[i] : 0.0;
        }
    }

    void solve(std::vector<double>& b) const {
        for (std::size_t i = 0; i < n_; ++i) {
            const double sub = i > 0 ? off_[i - 1] : 0.0;
            b[i] = (b[i] - (i > 0 ? sub * b[i - 1] : 0.0)) / denom_[i];
        }
        for (std::size_t i = n_; i-- > 1;) b[i - 1] -= cprime_[i - 1] * b[i];
    }

    bool left_ray_;
    bool right_ray_;
    std::size_t n_ = 0;
    double w0_ = 0.0;
    double wN_ = 0.0;
    std::vector<double> diag_;
    std::vector<double> off_;
    std::vector<double> cprime_;
    std::vector<double> denom_;
    cplx e_left_{1.0, 0.0};
    cplx e_right_{1.0, 0.0};
    std::vector<double> u_left_;
    std::vector<double> u_right_;
    double s_ll_ = 1.0;
    double s_rr_ = 1.0;
    double s_lr_ = 0.0;
};

// Indices of ray radii inside the free vector, for the nonnegativity bound.
std::vector<std::size_t> radius_slots(const DiscretePath& path) {
    std::vector<std::size_t> slots;
    if (is_ray(path.left())) slots.push_back(0);
    if (is_ray(path.right())) slots.push_back(path.free_count() - 1);
    return slots;
}

double projected_sup_norm(std::span<const double> x, std::span<const double> g,
                          const std::vector<std::size_t>& radii) {
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sup = std::max(sup, std::abs(g[i]));
    for (std::size_t i : radii) {
        if (x[i] <= 0.0 && g[i] > 0.0) {
            // Bound active: recompute without this component.
            sup = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                const bool active = std::find(radii.begin(), radii.end(), j) != radii.end() && x[j] <= 0.0 &&
                                    g[j] > 0.0;
                if (!active) sup = std::max(sup, std::abs(g[j]));
            }
            break;
        }
    }
    return sup;
}

double angle_of(const BoundaryCondition& bc, const BoundaryCondition& other) {
    if (const auto* r = std::get_if<Ray>(&bc)) return r->angle;
    if (const auto* f = std::get_if<FixedPoint>(&bc)) return std::arg(f->z);
    if (!std::holds_alternative<Origin>(other)) return angle_of(other, bc);
    return 0.0;
}

std::string outside_regime_flag(const ProblemConfig& config) {
    // The angle at the primary's collision instant must lie in [0, pi/2]
    // (up to conjugation) for collision-freeness to be proven.
    const auto check = [&](const BoundaryCondition& bc, double t) -> std::string {
        const auto* r = std::get_if<Ray>(&bc);
        if (r == nullptr || std::abs(config.params.primary(t)) != 0.0) return {};
        const double a = std::abs(std::remainder(r->angle, 2.0 * std::numbers::pi));
        if (a > 0.5 * std::numbers::pi) return "collision-time ray angle outside [0, pi/2]: outside the proven regime";
        return {};
    };
    auto flag = check(config.left, config.t_start);
    if (flag.empty()) flag = check(config.right, config.t_end);
    return flag;
}

}  // namespace

std::vector<cplx> interpolate_samples(const PathSamples& src, std::span<const double> times) {
    if (src.t.size() < 2 || src.t.size() != src.z.size()) throw DomainError("interpolate_samples: need >= 2 samples");
    std::vector<cplx> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t <= src.t.front()) {
            out[i] = src.z.front();
            continue;
        }
        if (t >= src.t.back()) {
            out[i] = src.z.back();
            continue;
        }
        const auto it = std::upper_bound(src.t.begin(), src.t.end(), t);
        const auto j = static_cast<std::size_t>(it - src.t.begin());
        const double w = (t - src.t[j - 1]) / (src.t[j] - src.t[j - 1]);
        out[i] = (1.0 - w) * src.z[j - 1] + w * src.z[j];
    }
    return out;
}

DiscretePath initial_path(const ProblemConfig& config, const TimeGrid& grid) {
    const auto& t = grid.nodes();
    std::vector<cplx> z(t.size());
    const InitConfig& init = config.init;

    if (init.kind != InitKind::Auto) {
        if (!init.samples) throw DomainError("initial_path: provided/mirror init needs samples");
        z = interpolate_samples(*init.samples, t);
        if (init.kind == InitKind::MirrorOf) {
            for (auto& v : z) v = std::conj(v);
        }
    } else if (init.branch != Branch::Auto) {
        const double scale = init.branch == Branch::Inner ? 0.5 : 2.0;
        for (std::size_t k = 0; k < t.size(); ++k) z[k] = scale * config.params.primary(t[k]);
    } else {
        double r_ref = std::max(std::abs(config.params.primary(t.front())), std::abs(config.params.primary(t.back())));
        if (!(r_ref > 0.0)) r_ref = 1.0;
        const auto end_radius = [&](const BoundaryCondition& bc) {
            if (const auto* f = std::get_if<FixedPoint>(&bc)) return std::abs(f->z);
            if (std::holds_alternative<Origin>(bc)) return 0.0;
            return r_ref;
        };
        const double r0 = end_radius(config.left);
        const double r1 = end_radius(config.right);
        const double a0 = angle_of(config.left, config.right);
        const double a1 = angle_of(config.right, config.left);
        const double sweep = std::remainder(a1 - a0, 2.0 * std::numbers::pi);
        const double span = t.back() - t.front();
        for (std::size_t k = 0; k < t.size(); ++k) {
            const double s = (t[k] - t.front()) / span;
            z[k] = std::polar((1.0 - s) * r0 + s * r1, a0 + s * sweep);
        }
    }

    if (init.jitter > 0.0) {
        std::mt19937_64 rng(init.seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        double scale = 0.0;
        for (const auto& v : z) scale = std::max(scale, std::abs(v));
        for (std::size_t k = 1; k + 1 < z.size(); ++k) {
            const double dx = unit(rng);
            const double dy = unit(rng);
            z[k] += init.jitter * scale * cplx{dx, dy};
        }
    }
    return DiscretePath(grid, std::move(z), config.left, config.right);
}

SolveReport minimize_from(const ProblemConfig& config, DiscretePath path) {
    const SolverConfig& sc = config.solver;
    ActionFunctional functional(path.grid(), config.params, {sc.exec, true});
    KineticPreconditioner precond(path.grid(), path.left(), path.right());
    const auto radii = radius_slots(path);

    SolveReport report{path, kNaN, kNaN, kNaN, kNaN, kNaN, {}, {}, {}, {}, {kNaN, kNaN}, 0, false, {}, {}, {}};

    std::vector<double> x = path.free_coordinates();
    const std::size_t n = x.size();
    std::vector<double> g;
    std::vector<cplx> node_grad;
    double f = 0.0;
    try {
        f = functional.value(path.samples());
        node_grad = functional.node_gradient(path.samples());
        g = restrict_gradient(path, node_grad);
    } catch (const SingularityError& e) {
        report.flags.push_back(std::string("initial path is singular: ") + e.what());
        fill_diagnostics(report, config.params, sc.exec);
        return report;
    }

    struct Pair {
        std::vector<double> s;
        std::vector<double> y;
        double rho;
    };
    std::deque<Pair> memory;
    std::vector<double> p(n);
    std::vector<double> q(n);
    std::vector<double> r(n);
    std::vector<double> x_new(n);
    std::vector<double> alpha(static_cast<std::size_t>(std::max(sc.memory, 1)));
    DiscretePath trial = path;

    int iter = 0;
    int stalls = 0;
    double gnorm = projected_sup_norm(x, g, radii);
    while (iter < sc.max_iterations) {
        if (gnorm < sc.grad_tol) {
            report.converged = true;
            break;
        }
        // Two-loop recursion with H0 = gamma P^{-1}.
        q = g;
        for (std::size_t i = memory.size(); i-- > 0;) {
            alpha[i] = memory[i].rho * dot(memory[i].s, q);
            for (std::size_t j = 0; j < n; ++j) q[j] -= alpha[i] * memory[i].y[j];
        }
        precond.apply(q, r);
        if (!memory.empty()) {
            const auto& last = memory.back();
            std::vector<double> py(n);
            precond.apply(last.y, py);
            const double scale = (1.0 / last.rho) / dot(last.y, py);
            for (double& v : r) v *= scale;
        }
        for (std::size_t i = 0; i < memory.size(); ++i) {
            const double beta = memory[i].rho * dot(memory[i].y, r);
            for (std::size_t j = 0; j < n; ++j) r[j] += memory[i].s[j] * (alpha[i] - beta);
        }
        for (std::size_t j = 0; j < n; ++j) p[j] = -r[j];
        double slope = dot(g, p);
        if (!(slope < 0.0)) {
            memory.clear();
            precond.apply(g, r);
            for (std::size_t j = 0; j < n; ++j) p[j] = -r[j];
            slope = dot(g, p);
        }

        double step = 1.0;
        bool accepted = false;
        double df = 0.0;
        for (int bt = 0; bt < sc.max_backtracks; ++bt, step *= 0.5) {
            for (std::size_t j = 0; j < n; ++j) x_new[j] = x[j] + step * p[j];
            for (std::size_t i : radii) x_new[i] = std::max(0.0, x_new[i]);
            trial.set_free_coordinates(x_new);
            try {
                df = functional.difference(path.samples(), trial.samples()) +
                     rounding_correction(path, trial, x, x_new, node_grad);
            } catch (const SingularityError&) {
                continue;
            }
            double model = 0.0;
            for (std::size_t j = 0; j < n; ++j) model += g[j] * (x_new[j] - x[j]);
            if (df < 0.0 && df <= sc.armijo * model) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!memory.empty() && stalls == 0) {
                memory.clear();
                ++stalls;
                continue;
            }
            report.flags.push_back("line search stalled before reaching the gradient tolerance");
            break;
        }
        stalls = 0;

        std::vector<double> g_new;
        try {
            node_grad = functional.node_gradient(trial.samples());
            g_new = restrict_gradient(trial, node_grad);
        } catch (const SingularityError& e) {
            report.flags.push_back(std::string("gradient singular after accepted step: ") + e.what());
            break;
        }
        Pair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            pair.s[j] = x_new[j] - x[j];
            pair.y[j] = g_new[j] - g[j];
        }
        const double sy = dot(pair.s, pair.y);
        if (step < 1e-3) {
            // A long backtrack means the stored curvature no longer describes
            // the functional; restart from the preconditioner alone.
            memory.clear();
        } else if (sy > 1e-300) {
            pair.rho = 1.0 / sy;
            memory.push_back(std::move(pair));
            if (memory.size() > static_cast<std::size_t>(sc.memory)) memory.pop_front();
        }
        report.decreases.push_back(df);
        f += df;
        x = x_new;
        g = std::move(g_new);
        path = trial;
        ++iter;
        gnorm = projected_sup_norm(x, g, radii);
    }
    if (!report.converged && gnorm < sc.grad_tol) report.converged = true;
    if (!report.converged && iter >= sc.max_iterations) report.flags.push_back("iteration cap reached");

    report.path = path;
    report.iterations = iter;
    report.grad_norm = gnorm;
    fill_diagnostics(report, config.params, sc.exec);
    report.levels.push_back({static_cast<int>(path.grid().segments()), iter, report.converged, report.action,
                             report.grad_norm, report.el_residual_max});
    if (auto flag = outside_regime_flag(config); !flag.empty()) report.flags.push_back(flag);
    return report;
}

SolveReport minimize(const ProblemConfig& config) {
    const MeshConfig& mesh = config.mesh;
    const TimeGrid grid = build_grid(config.t_start, config.t_end, mesh.segments, mesh.gamma, mesh.singular_end);
    return minimize_from(config, initial_path(config, grid));
}

SolveReport refine_and_polish(const SolveReport& report, const ProblemConfig& config) {
    SolveReport current = report;
    int total_iterations = report.iterations;
    for (int segments : config.mesh.refinements) {
        const TimeGrid grid =
            build_grid(config.t_start, config.t_end, segments, config.mesh.gamma, config.mesh.singular_end);
        const PathSamples coarse{current.path.grid().nodes(), current.path.samples()};
        DiscretePath start(grid, interpolate_samples(coarse, grid.nodes()), config.left, config.right);
        SolveReport next = minimize_from(config, std::move(start));
        total_iterations += next.iterations;
        std::vector<LevelSummary> levels = current.levels;
        levels.insert(levels.end(), next.levels.begin(), next.levels.end());
        std::vector<double> decreases = current.decreases;
        decreases.insert(decreases.end(), next.decreases.begin(), next.decreases.end());
        next.levels = std::move(levels);
        next.decreases = std::move(decreases);
        current = std::move(next);
    }
    current.iterations = total_iterations;
    return current;
}

void fill_diagnostics(SolveReport& report, const FieldParams& params, Exec exec) {
    const DiscretePath& path = report.path;
    const auto& t = path.grid().nodes();
    const std::size_t n = path.size();
    ActionFunctional functional(path.grid(), params, {exec, true});

    try {
        report.action = functional.value(path.samples());
    } catch (const SingularityError&) {
        report.action = std::numeric_limits<double>::infinity();
    }

    report.el_residual_series.assign(n, kNaN);
    report.el_residual_max = kNaN;
    try {
        const auto res = functional.el_residual(path.samples());
        double mx = 0.0;
        for (std::size_t k = 0; k < res.size(); ++k) {
            report.el_residual_series[k + 1] = std::abs(res[k]);
            mx = std::max(mx, std::abs(res[k]));
        }
        report.el_residual_max = mx;
    } catch (const SingularityError&) {
        report.flags.push_back("EL residual undefined: a node sits on a body");
    }

    const auto q = functional.primary_at_nodes();
    report.a_series.assign(n, kNaN);
    for (std::size_t k = 0; k < n; ++k) {
        const double qa = std::abs(q[k]);
        if (qa > 0.0) report.a_series[k] = std::abs(path[k]) / qa;
    }

    report.theta_series.assign(n, kNaN);
    std::vector<double> raw;
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < n; ++k) {
        if (path[k] == cplx{0.0, 0.0}) continue;
        raw.push_back(std::arg(path[k]));
        idx.push_back(k);
    }
    try {
        const auto th = unwrap_angles(raw, std::numbers::pi);
        for (std::size_t i = 0; i < idx.size(); ++i) report.theta_series[idx[i]] = th[i];
    } catch (const DomainError&) {
        report.flags.push_back("theta series could not be unwrapped");
    }

    report.J_series = angular_momentum(path);
    const CollisionScan scan = collision_scan(path, params.orbit);
    report.min_dist_center = scan.min_center;
    report.min_dist_primary = scan.min_primary;
    report.transversality = transversality(path);
    (void)t;
}

}  // namespace roctb
