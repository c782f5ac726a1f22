#include "roctb/runfile.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "roctb/errors.hpp"

namespace roctb::runfile {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError((where.empty() ? std::string("/") : where) + ": " + what);
}

std::string join(const std::string& where, const std::string& key) { return where + "/" + key; }

const json* find(const json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
    const json* v = find(obj, key);
    return v ? number(*v, join(where, key)) : fallback;
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<int>();
}

int integer_or(const json& obj, const std::string& key, const std::string& where, int fallback) {
    const json* v = find(obj, key);
    return v ? integer(*v, join(where, key)) : fallback;
}

std::string string_or(const json& obj, const std::string& key, const std::string& where, std::string fallback) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) fail(join(where, key), "expected a string");
    return v->get<std::string>();
}

// Numbers are multiples of pi; strings go through parse_angle.
double angle(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>() * kPi;
    if (v.is_string()) {
        try {
            return parse_angle(v.get<std::string>());
        } catch (const ParseError& e) {
            fail(where, e.what());
        }
    }
    fail(where, "expected an angle in units of pi");
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) fail(join(where, key), "unknown key");
    }
}

BoundaryCondition boundary(const json& v, const std::string& where) {
    if (v.is_string()) {
        if (v.get<std::string>() == "origin") return Origin{};
        fail(where, "expected \"origin\", {\"ray\": angle} or {\"fixed\": [x, y]}");
    }
    check_keys(v, where, {"ray", "fixed"});
    if (const json* r = find(v, "ray")) return Ray{angle(*r, join(where, "ray"))};
    if (const json* f = find(v, "fixed")) {
        if (!f->is_array() || f->size() != 2) fail(join(where, "fixed"), "expected [x, y]");
        return FixedPoint{{number((*f)[0], join(where, "fixed/0")), number((*f)[1], join(where, "fixed/1"))}};
    }
    fail(where, "expected \"origin\", {\"ray\": angle} or {\"fixed\": [x, y]}");
}

struct Primary {
    KeplerArc arc;
    std::optional<double> time_to_collision;
};

Primary primary(const json& v, double mu, const std::string& where) {
    check_keys(v, where, {"apoapsis", "energy", "boundary"});
    if (v.size() != 1) fail(where, "expected exactly one of apoapsis, energy, boundary");
    try {
        if (const json* a = find(v, "apoapsis")) {
            const KeplerArc arc = arc_from_apoapsis(mu, number(*a, join(where, "apoapsis")));
            return {arc, arc.t_apoapsis()};
        }
        if (const json* e = find(v, "energy")) return {KeplerArc(mu, number(*e, join(where, "energy"))), {}};
        const json& b = v.at("boundary");
        check_keys(b, join(where, "boundary"), {"R", "v"});
        if (!b.contains("R") || !b.contains("v")) fail(join(where, "boundary"), "needs R and v");
        const TimedArc ta = arc_from_boundary(mu, number(b["R"], join(where, "boundary/R")),
                                              number(b["v"], join(where, "boundary/v")));
        return {ta.arc, ta.time_to_collision};
    } catch (const DomainError& e) {
        fail(where, e.what());
    }
}

MeshConfig mesh(const json& v, const std::string& where, MeshConfig out) {
    check_keys(v, where, {"segments", "gamma", "singular_end", "refinements"});
    out.segments = integer_or(v, "segments", where, out.segments);
    out.gamma = number_or(v, "gamma", where, out.gamma);
    const std::string end = string_or(v, "singular_end", where, out.singular_end == SingularEnd::Left ? "left" : "right");
    if (end == "left") {
        out.singular_end = SingularEnd::Left;
    } else if (end == "right") {
        out.singular_end = SingularEnd::Right;
    } else {
        fail(join(where, "singular_end"), "expected \"left\" or \"right\"");
    }
    if (const json* r = find(v, "refinements")) {
        if (!r->is_array()) fail(join(where, "refinements"), "expected a list of segment counts");
        out.refinements.clear();
        for (std::size_t i = 0; i < r->size(); ++i) {
            out.refinements.push_back(integer((*r)[i], join(where, "refinements/" + std::to_string(i))));
        }
    }
    if (out.segments < 2) fail(join(where, "segments"), "must be >= 2");
    if (!(out.gamma >= 1.0)) fail(join(where, "gamma"), "must be >= 1");
    return out;
}

SolverConfig solver(const json& v, const std::string& where) {
    check_keys(v, where, {"grad_tol", "max_iterations", "memory", "armijo", "max_backtracks", "exec"});
    SolverConfig out;
    out.grad_tol = number_or(v, "grad_tol", where, out.grad_tol);
    out.max_iterations = integer_or(v, "max_iterations", where, out.max_iterations);
    out.memory = integer_or(v, "memory", where, out.memory);
    out.armijo = number_or(v, "armijo", where, out.armijo);
    out.max_backtracks = integer_or(v, "max_backtracks", where, out.max_backtracks);
    const std::string exec = string_or(v, "exec", where, "parallel");
    if (exec == "serial") {
        out.exec = Exec::Serial;
    } else if (exec != "parallel") {
        fail(join(where, "exec"), "expected \"serial\" or \"parallel\"");
    }
    if (!(out.grad_tol > 0.0)) fail(join(where, "grad_tol"), "must be positive");
    if (out.max_iterations < 0) fail(join(where, "max_iterations"), "must be >= 0");
    if (out.memory < 1) fail(join(where, "memory"), "must be >= 1");
    return out;
}

InitConfig init(const json& v, const std::string& where, const std::filesystem::path& base_dir) {
    check_keys(v, where, {"kind", "branch", "path", "jitter", "seed"});
    InitConfig out;
    const std::string kind = string_or(v, "kind", where, "auto");
    if (kind == "provided") {
        out.kind = InitKind::Provided;
    } else if (kind == "mirror") {
        out.kind = InitKind::MirrorOf;
    } else if (kind != "auto") {
        fail(join(where, "kind"), "expected auto, provided or mirror");
    }
    const std::string branch = string_or(v, "branch", where, "auto");
    if (branch == "inner") {
        out.branch = Branch::Inner;
    } else if (branch == "outer") {
        out.branch = Branch::Outer;
    } else if (branch != "auto") {
        fail(join(where, "branch"), "expected auto, inner or outer");
    }
    out.jitter = number_or(v, "jitter", where, 0.0);
    if (const json* s = find(v, "seed")) {
        if (!s->is_number_unsigned()) fail(join(where, "seed"), "expected a nonnegative integer");
        out.seed = s->get<std::uint64_t>();
    }
    if (out.kind != InitKind::Auto) {
        const std::string file = string_or(v, "path", where, "");
        if (file.empty()) fail(join(where, "path"), "provided and mirror inits need a path CSV");
        std::ifstream in(base_dir / file);
        if (!in) fail(join(where, "path"), "cannot open " + (base_dir / file).string());
        try {
            out.samples = read_path_csv(in);
        } catch (const ParseError& e) {
            fail(join(where, "path"), e.what());
        }
    }
    return out;
}

}  // namespace

json load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError(file.string() + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line:column.
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(file.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

double parse_angle(const std::string& text) {
    std::string s = text;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) s.resize(s.size() - 2);
    const auto slash = s.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument("trailing characters");
            return v * kPi;
        }
        const std::string num = s.substr(0, slash);
        const std::string den = s.substr(slash + 1);
        const double p = std::stod(num, &used);
        if (used != num.size()) throw std::invalid_argument("trailing characters");
        const double q = std::stod(den, &used);
        if (used != den.size() || q == 0.0) throw std::invalid_argument("bad denominator");
        return p / q * kPi;
    } catch (const std::exception&) {
        throw ParseError("cannot read angle \"" + text + "\" (expected e.g. 0.75, -0.8pi or -4/5)");
    }
}

SolveRun parse_solve(const json& doc, const std::filesystem::path& base_dir, bool sundman) {
    check_keys(doc, "", {"name", "mu", "m", "primary", "interval", "left", "right", "mesh", "solver", "init", "fit"});
    const double mu = number_or(doc, "mu", "", 1.0);
    const double m = number_or(doc, "m", "", 1.0);
    if (!(mu > 0.0)) fail("/mu", "must be positive");
    if (!(m > 0.0)) fail("/m", "must be positive");

    Primary prim{KeplerArc(mu, 0.0), {}};
    if (const json* p = find(doc, "primary")) {
        prim = primary(*p, mu, "/primary");
    } else if (!sundman) {
        fail("/primary", "missing");
    }

    double t_start = 0.0;
    double t_end = 0.0;
    if (const json* iv = find(doc, "interval")) {
        if (!iv->is_array() || iv->size() != 2) fail("/interval", "expected [t_start, t_end]");
        t_start = number((*iv)[0], "/interval/0");
        t_end = number((*iv)[1], "/interval/1");
    } else if (prim.time_to_collision) {
        t_start = -*prim.time_to_collision;
    } else if (sundman) {
        t_start = -1.0;
    } else {
        fail("/interval", "missing, and the primary has no natural time window");
    }
    if (!(t_start < t_end)) fail("/interval", "t_start must be below t_end");

    const json* left = find(doc, "left");
    const json* right = find(doc, "right");
    BoundaryCondition lbc = Ray{0.0};
    BoundaryCondition rbc = Origin{};
    if (left) {
        lbc = boundary(*left, "/left");
    } else if (!sundman) {
        fail("/left", "missing");
    }
    if (sundman) {
        if (right && !(right->is_string() && right->get<std::string>() == "origin")) {
            fail("/right", "sundman runs end at the origin");
        }
        if (t_end != 0.0) fail("/interval/1", "sundman runs end at t = 0");
    } else if (right) {
        rbc = boundary(*right, "/right");
    } else {
        fail("/right", "missing");
    }

    MeshConfig mc;
    if (const json* v = find(doc, "mesh")) mc = mesh(*v, "/mesh", mc);
    SolverConfig sc;
    if (const json* v = find(doc, "solver")) sc = solver(*v, "/solver");
    InitConfig ic;
    if (const json* v = find(doc, "init")) ic = init(*v, "/init", base_dir);

    std::optional<Window> fit;
    if (const json* f = find(doc, "fit")) {
        check_keys(*f, "/fit", {"window"});
        if (const json* w = find(*f, "window")) {
            if (!w->is_array() || w->size() != 2) fail("/fit/window", "expected [lo, hi]");
            fit = Window{number((*w)[0], "/fit/window/0"), number((*w)[1], "/fit/window/1")};
            if (!(0.0 < fit->lo && fit->lo < fit->hi)) fail("/fit/window", "need 0 < lo < hi");
        }
    }

    try {
        FieldParams params(mu, m, prim.arc);
        const double half = prim.arc.validity_half_window();
        if (std::max(std::abs(t_start), std::abs(t_end)) >= half) {
            fail("/interval", "extends past the primary's next collision");
        }
        return {string_or(doc, "name", "", sundman ? "sundman" : "solve"),
                ProblemConfig{std::move(params), t_start, t_end, lbc, rbc, mc, sc, ic}, fit};
    } catch (const DomainError& e) {
        fail("", e.what());
    }
}

PeriodicRun parse_periodic(const json& doc) {
    check_keys(doc, "", {"name", "mu", "m", "T", "psi", "mesh", "solver", "cycles"});
    PeriodicRun out{string_or(doc, "name", "", "periodic"),
                    number_or(doc, "mu", "", 1.0),
                    number_or(doc, "m", "", 1.0),
                    number_or(doc, "T", "", 1.0),
                    0.0,
                    {},
                    {},
                    integer_or(doc, "cycles", "", 0)};
    const json* psi = find(doc, "psi");
    if (psi == nullptr) fail("/psi", "missing");
    out.psi = angle(*psi, "/psi");
    if (!(std::abs(out.psi) < kPi)) fail("/psi", "must lie in (-1, 1) pi");
    if (!(out.mu > 0.0)) fail("/mu", "must be positive");
    if (!(out.m > 0.0)) fail("/m", "must be positive");
    if (!(out.T > 0.0)) fail("/T", "must be positive");
    if (out.cycles < 0) fail("/cycles", "must be >= 0");
    MeshConfig mc;
    mc.singular_end = SingularEnd::Left;
    if (const json* v = find(doc, "mesh")) mc = mesh(*v, "/mesh", mc);
    out.mesh = mc;
    if (const json* v = find(doc, "solver")) out.solver = solver(*v, "/solver");
    return out;
}

SweepRun parse_sweep(const json& doc) {
    check_keys(doc, "", {"name", "command", "base", "grid"});
    SweepRun out;
    out.name = string_or(doc, "name", "", "sweep");
    const std::string command = string_or(doc, "command", "", "solve");
    if (command != "solve" && command != "sundman") fail("/command", "expected solve or sundman");
    out.sundman = command == "sundman";
    const json* base = find(doc, "base");
    if (base == nullptr || !base->is_object()) fail("/base", "missing solve document");
    const json* grid = find(doc, "grid");
    if (grid == nullptr || !grid->is_object() || grid->empty()) fail("/grid", "expected pointer -> list of values");

    std::vector<std::pair<json::json_pointer, json>> axes;
    for (const auto& [key, values] : grid->items()) {
        const std::string where = "/grid/" + key;
        if (!values.is_array() || values.empty()) fail(where, "expected a nonempty list");
        try {
            axes.emplace_back(json::json_pointer(key), values);
        } catch (const json::exception& e) {
            fail(where, std::string("bad JSON pointer: ") + e.what());
        }
    }
    std::size_t total = 1;
    for (const auto& [_, values] : axes) total *= values.size();
    for (std::size_t index = 0; index < total; ++index) {
        SweepCell cell{index, json::object(), *base};
        std::size_t rest = index;
        // Last axis varies fastest.
        for (std::size_t a = axes.size(); a-- > 0;) {
            const auto& [ptr, values] = axes[a];
            const json& value = values[rest % values.size()];
            rest /= values.size();
            cell.assignment[ptr.to_string()] = value;
            cell.document[ptr] = value;
        }
        out.cells.push_back(std::move(cell));
    }
    return out;
}

}  // namespace roctb::runfile
