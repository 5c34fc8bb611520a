#include "mfg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "mfg/field_io.hpp"
#include "mfg/validation.hpp"

namespace mfg {

std::string to_string(Mode m)
{
    switch (m) {
    case Mode::solve: return "solve";
    case Mode::sweep: return "sweep";
    case Mode::validate: return "validate";
    case Mode::particles: return "particles";
    case Mode::pohozaev: return "pohozaev";
    }
    return "unknown";
}

std::optional<Mode> parse_mode(std::string_view s)
{
    for (Mode m : {Mode::solve, Mode::sweep, Mode::validate, Mode::particles, Mode::pohozaev})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(const std::string& key, const std::string& msg) { throw ConfigError(key + ": " + msg); }

double to_double(const std::string& key, std::string_view v)
{
    v = trim(v);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
        fail(key, "expected a finite number, got '" + std::string(v) + "'");
    return x;
}

long long to_integer(const std::string& key, std::string_view v)
{
    v = trim(v);
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail(key, "expected an integer, got '" + std::string(v) + "'");
    return x;
}

std::vector<double> to_list(const std::string& key, std::string_view v)
{
    std::vector<double> out;
    while (true) {
        const auto comma = v.find(',');
        out.push_back(to_double(key, v.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

double positive(const std::string& key, std::string_view v)
{
    const double x = to_double(key, v);
    if (!(x > 0.0)) fail(key, "must be > 0, got " + std::string(trim(v)));
    return x;
}

int at_least(const std::string& key, std::string_view v, long long lo)
{
    const long long x = to_integer(key, v);
    if (x < lo || x > 1'000'000'000) fail(key, "must be an integer in [" + std::to_string(lo) + ", 1e9], got " + std::to_string(x));
    return static_cast<int>(x);
}

struct Potential {
    double amplitude = 0.0;
    int modes = 1;
    std::string file;
};

Potential parse_potential(std::string_view v)
{
    const std::string key = "potential";
    if (v == "zero") return {};
    if (v.starts_with("cosine:")) {
        const auto parts = to_list(key, v.substr(7));
        if (parts.size() != 2) fail(key, "cosine form is cosine:A,MODES");
        if (!(parts[0] >= 0.0)) fail(key, "cosine amplitude A must be >= 0 so that V >= 0");
        if (!(parts[1] >= 1.0) || parts[1] != std::floor(parts[1]) || parts[1] > 1e6)
            fail(key, "cosine MODES must be an integer >= 1");
        return {parts[0], static_cast<int>(parts[1]), ""};
    }
    if (v.starts_with("file:") && v.size() > 5) return {0.0, 1, std::string(v.substr(5))};
    fail(key, "must be zero, cosine:A,MODES or file:PATH; got '" + std::string(v) + "'");
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"mode",
         [](RunConfig& c, std::string_view v) {
             const auto m = parse_mode(v);
             if (!m) fail("mode", "must be one of solve, sweep, validate, particles, pohozaev; got '" + std::string(v) + "'");
             c.mode = *m;
         }},
        {"output_dir",
         [](RunConfig& c, std::string_view v) {
             if (v.empty()) fail("output_dir", "must be nonempty");
             c.output_dir = v;
         }},
        {"run_id",
         [](RunConfig& c, std::string_view v) {
             if (v.empty()) fail("run_id", "must be nonempty");
             c.run_id = v;
         }},
        {"dim",
         [](RunConfig& c, std::string_view v) {
             const auto d = to_integer("dim", v);
             if (d != 1 && d != 2) fail("dim", "must be 1 or 2, got " + std::to_string(d));
             c.dim = static_cast<int>(d);
         }},
        {"n", [](RunConfig& c, std::string_view v) { c.n = at_least("n", v, 8); }},
        {"gamma",
         [](RunConfig& c, std::string_view v) {
             c.gamma = to_double("gamma", v);
             if (!(c.gamma > 1.0)) fail("gamma", "must satisfy gamma > 1, got " + std::string(v));
         }},
        {"c_h", [](RunConfig& c, std::string_view v) { c.c_h = positive("c_h", v); }},
        {"alpha", [](RunConfig& c, std::string_view v) { c.alpha = positive("alpha", v); }},
        {"c_f", [](RunConfig& c, std::string_view v) { c.c_f = positive("c_f", v); }},
        {"sign",
         [](RunConfig& c, std::string_view v) {
             if (v == "focusing")
                 c.sign = CouplingSign::focusing;
             else if (v == "defocusing")
                 c.sign = CouplingSign::defocusing;
             else
                 fail("sign", "must be focusing or defocusing, got '" + std::string(v) + "'");
         }},
        {"potential",
         [](RunConfig& c, std::string_view v) {
             parse_potential(v);
             c.potential = v;
         }},
        {"mollifier_k", [](RunConfig& c, std::string_view v) { c.mollifier_k = at_least("mollifier_k", v, 2); }},
        {"theta",
         [](RunConfig& c, std::string_view v) {
             c.theta = to_double("theta", v);
             if (!(c.theta > 0.0 && c.theta <= 1.0)) fail("theta", "must lie in (0, 1], got " + std::string(v));
         }},
        {"outer_tol", [](RunConfig& c, std::string_view v) { c.outer_tol = positive("outer_tol", v); }},
        {"outer_max_iters", [](RunConfig& c, std::string_view v) { c.outer_max_iters = at_least("outer_max_iters", v, 1); }},
        {"hjb_tol", [](RunConfig& c, std::string_view v) { c.hjb_tol = positive("hjb_tol", v); }},
        {"hjb_dt", [](RunConfig& c, std::string_view v) { c.hjb_dt = positive("hjb_dt", v); }},
        {"hjb_max_steps", [](RunConfig& c, std::string_view v) { c.hjb_max_steps = at_least("hjb_max_steps", v, 1); }},
        {"fp_tol", [](RunConfig& c, std::string_view v) { c.fp_tol = positive("fp_tol", v); }},
        {"fp_max_iters", [](RunConfig& c, std::string_view v) { c.fp_max_iters = at_least("fp_max_iters", v, 1); }},
        {"initial_density",
         [](RunConfig& c, std::string_view v) {
             try {
                 c.initial_density = InitialDensity::parse(std::string(v));
             } catch (const InvalidArgument& e) {
                 fail("initial_density", e.what());
             }
         }},
        {"sweep_alphas",
         [](RunConfig& c, std::string_view v) {
             c.sweep_alphas = to_list("sweep_alphas", v);
             for (double a : c.sweep_alphas)
                 if (!(a > 0.0)) fail("sweep_alphas", "every alpha must be > 0");
             if (!std::is_sorted(c.sweep_alphas.begin(), c.sweep_alphas.end()))
                 fail("sweep_alphas", "must be sorted ascending");
         }},
        {"sweep_refine",
         [](RunConfig& c, std::string_view v) {
             if (v == "true" || v == "1")
                 c.sweep_refine = true;
             else if (v == "false" || v == "0")
                 c.sweep_refine = false;
             else
                 fail("sweep_refine", "must be true or false");
         }},
        {"input_dir",
         [](RunConfig& c, std::string_view v) {
             if (v.empty()) fail("input_dir", "must be nonempty");
             c.input_dir = v;
         }},
        {"pohozaev_radius", [](RunConfig& c, std::string_view v) { c.pohozaev_radius = positive("pohozaev_radius", v); }},
        {"pohozaev_center",
         [](RunConfig& c, std::string_view v) {
             const auto xs = to_list("pohozaev_center", v);
             if (xs.empty() || xs.size() > 2) fail("pohozaev_center", "expected x or x,y");
             for (double x : xs)
                 if (!(x >= 0.0 && x < 1.0)) fail("pohozaev_center", "coordinates must lie in [0, 1)");
             c.pohozaev_center = {xs[0], xs.size() == 2 ? xs[1] : 0.5};
         }},
        {"nls_tol", [](RunConfig& c, std::string_view v) { c.nls_tol = positive("nls_tol", v); }},
        {"audit_beta", [](RunConfig& c, std::string_view v) { c.audit_beta = to_double("audit_beta", v); }},
        {"particles_count",
         [](RunConfig& c, std::string_view v) {
             const auto x = to_integer("particles_count", v);
             if (x < 10'000) fail("particles_count", "must be >= 10000, got " + std::to_string(x));
             c.particles_count = static_cast<std::uint64_t>(x);
         }},
        {"particles_horizon", [](RunConfig& c, std::string_view v) { c.particles_horizon = positive("particles_horizon", v); }},
        {"particles_dt", [](RunConfig& c, std::string_view v) { c.particles_dt = positive("particles_dt", v); }},
        {"seed",
         [](RunConfig& c, std::string_view v) {
             v = trim(v);
             std::uint64_t x = 0;
             const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
             if (ec != std::errc() || ptr != v.data() + v.size()) fail("seed", "expected a nonnegative 64-bit integer");
             c.seed = x;
         }},
    };
    return table;
}

ScalarField load_potential_table(const std::string& path, const TorusGrid& grid)
{
    ScalarField v = read_field_csv(path);
    if (!(v.grid() == grid))
        fail("potential", "file " + path + " holds a dim " + std::to_string(v.grid().dim()) + ", n " +
                              std::to_string(v.grid().n()) + " field; the run grid is dim " + std::to_string(grid.dim()) +
                              ", n " + std::to_string(grid.n()));
    if (!(v.min() >= 0.0)) fail("potential", "file " + path + " has negative values; V >= 0 is required");
    return v;
}

}  // namespace

MFGProblem RunConfig::problem() const
{
    const TorusGrid grid(dim, n);
    const Potential pot = parse_potential(potential);
    PotentialProfile profile{pot.amplitude, pot.modes, std::nullopt};
    if (!pot.file.empty()) profile.table = load_potential_table(pot.file, grid);
    MFGProblem p{grid, HamiltonianSpec{gamma, c_h}, CouplingSpec{alpha, c_f, sign}, std::move(profile), Mollifier{mollifier_k}};
    p.theta = theta;
    p.tol = outer_tol;
    p.max_outer_iters = outer_max_iters;
    p.hjb = HJBOptions{hjb_dt, hjb_tol, hjb_max_steps};
    p.fp = FPOptions{fp_tol, fp_max_iters};
    p.initial = initial_density;
    return p;
}

void validate_config(RunConfig& c)
{
    std::optional<TorusGrid> grid;
    try {
        grid.emplace(c.dim, c.n);
    } catch (const InvalidArgument& e) {
        fail("n", e.what());
    }
    try {
        kernel_weights(Mollifier{c.mollifier_k}, *grid);
    } catch (const InvalidArgument& e) {
        fail("mollifier_k", e.what());
    }
    if (c.hjb_dt != 0.0 && 1.0 + c.hjb_dt * 4.0 * c.dim * c.n * c.n > 1e12)
        fail("hjb_dt", "too large for the implicit solve; need 1 + dt 4N/h^2 <= 1e12");
    if (c.mode == Mode::sweep && c.sweep_alphas.empty()) fail("sweep_alphas", "required in sweep mode");
    if (c.mode == Mode::pohozaev || c.mode == Mode::validate) {
        if (!(c.pohozaev_radius <= 0.45 && c.pohozaev_radius > 2.0 * grid->h()))
            fail("pohozaev_radius", "must lie in (2h, 0.45] = (" + std::to_string(2.0 * grid->h()) + ", 0.45]");
    }
    if (c.mode == Mode::particles) {
        if (!(c.particles_dt <= grid->h())) fail("particles_dt", "must lie in (0, h] = (0, " + std::to_string(grid->h()) + "]");
        if (!(c.particles_horizon > c.particles_dt)) fail("particles_horizon", "must exceed particles_dt");
    }
    if (c.audit_beta) {
        const double lim = beta_limit(c.gamma, c.dim);
        if (!(*c.audit_beta > 1.0 && *c.audit_beta < lim))
            fail("audit_beta", "must satisfy 1 < beta < 1 + gamma'/(N - gamma') = " + std::to_string(lim));
    }
    const Potential pot = parse_potential(c.potential);
    if (!pot.file.empty()) {
        try {
            load_potential_table(pot.file, *grid);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail("potential", e.what());
        }
    }
    c.notes.clear();
    const auto ce = critical_exponents(c.gamma, c.dim);
    std::vector<double> alphas = c.mode == Mode::sweep ? c.sweep_alphas : std::vector<double>{c.alpha};
    for (double a : alphas)
        if (a == ce.alpha2)
            c.notes.push_back("UNKNOWN-REGIME: alpha = " + std::to_string(a) + " equals the energy-critical exponent alpha2");
}

RunConfig parse_config(std::string_view text, std::optional<Mode> mode_hint)
{
    RunConfig c;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value, got '" + std::string(line) + "'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(key + ": unknown key");
        if (!seen.insert(key).second) throw ConfigError(key + ": given more than once");
        it->second(c, value);
    }
    if (!seen.contains("mode")) {
        if (!mode_hint) throw ConfigError("mode: missing; must be one of solve, sweep, validate, particles, pohozaev");
        c.mode = *mode_hint;
    } else if (mode_hint && *mode_hint != c.mode) {
        throw ConfigError("mode: config says " + to_string(c.mode) + " but the subcommand is " + to_string(*mode_hint));
    }
    if (!seen.contains("c_h")) c.c_h = default_c_h(c.gamma);
    if (!seen.contains("mollifier_k")) c.mollifier_k = std::max(2, c.n / 8);
    validate_config(c);
    return c;
}

}  // namespace mfg
