#include "mfg/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "mfg/field_io.hpp"
#include "mfg/validation.hpp"

namespace mfg {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string sha256_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string() + " for hashing");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256 init failed");
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

namespace {

std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sign_name(CouplingSign s) { return s == CouplingSign::focusing ? "focusing" : "defocusing"; }

json config_json(const RunConfig& c)
{
    json j;
    j["mode"] = to_string(c.mode);
    j["output_dir"] = c.output_dir;
    j["run_id"] = c.run_id;
    j["dim"] = c.dim;
    j["n"] = c.n;
    j["gamma"] = c.gamma;
    j["c_h"] = c.c_h;
    j["alpha"] = c.alpha;
    j["c_f"] = c.c_f;
    j["sign"] = sign_name(c.sign);
    j["potential"] = c.potential;
    j["mollifier_k"] = c.mollifier_k;
    j["theta"] = c.theta;
    j["outer_tol"] = c.outer_tol;
    j["outer_max_iters"] = c.outer_max_iters;
    j["hjb_tol"] = c.hjb_tol;
    j["hjb_dt"] = c.hjb_dt == 0.0 ? 0.5 / c.n : c.hjb_dt;
    j["hjb_max_steps"] = c.hjb_max_steps;
    j["fp_tol"] = c.fp_tol;
    j["fp_max_iters"] = c.fp_max_iters;
    j["initial_density"] = c.initial_density.describe();
    j["sweep_alphas"] = c.sweep_alphas;
    j["sweep_refine"] = c.sweep_refine;
    j["input_dir"] = c.input_dir;
    j["pohozaev_radius"] = c.pohozaev_radius;
    j["pohozaev_center"] = c.pohozaev_center;
    j["nls_tol"] = c.nls_tol;
    j["audit_beta"] = c.audit_beta ? json(*c.audit_beta) : json(nullptr);
    j["particles_count"] = c.particles_count;
    j["particles_horizon"] = c.particles_horizon;
    j["particles_dt"] = c.particles_dt;
    j["seed"] = c.seed;
    return j;
}

json solution_json(const MFGSolution& s)
{
    return {{"lambda", s.lambda},
            {"converged", s.converged},
            {"status", to_string(s.status)},
            {"message", s.message},
            {"outer_iters", s.outer_iters},
            {"hjb_res", s.hjb_res},
            {"fp_res", s.fp_res},
            {"coupling_res", s.coupling_res},
            {"max_m", s.m.max()},
            {"min_m", s.m.min()},
            {"warnings", s.warnings},
            {"l1_history", s.history}};
}

void write_text_atomic(const fs::path& path, const std::string& text)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

    void field(const std::string& name, const ScalarField& f)
    {
        write_field_csv(dir_ / name, f);
        names_.push_back(name);
    }

    void report(const std::string& name, const json& j)
    {
        write_text_atomic(dir_ / name, j.dump(2) + "\n");
        names_.push_back(name);
    }

    json inventory() const
    {
        json inv = json::array();
        for (const auto& n : names_)
            inv.push_back({{"file", n}, {"sha256", sha256_file(dir_ / n)}, {"bytes", fs::file_size(dir_ / n)}});
        return inv;
    }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

/// Rebuilds a solution from a solve run's directory; the saved parameters must match the config.
MFGSolution load_solution(const RunConfig& c, const MFGProblem& p)
{
    const fs::path dir(c.input_dir);
    std::ifstream in(dir / "manifest.json");
    if (!in) throw InvalidArgument("input_dir: no manifest.json in " + dir.string());
    const json man = json::parse(in);
    const json& saved = man.at("config");
    if (saved.at("mode") != "solve") throw InvalidArgument("input_dir: manifest is not from a solve run");
    for (const char* key : {"dim", "n", "gamma", "alpha", "c_f", "sign", "potential", "mollifier_k"}) {
        if (saved.at(key) != config_json(c).at(key))
            throw InvalidArgument(std::string("input_dir: saved run has a different ") + key);
    }
    const json& res = man.at("results");
    MFGSolution s{read_field_csv(dir / "u.csv"), res.at("lambda").get<double>(), read_field_csv(dir / "m.csv")};
    if (!(s.u.grid() == p.grid) || !(s.m.grid() == p.grid)) throw InvalidArgument("input_dir: field grid mismatch");
    s.converged = res.at("converged").get<bool>();
    s.status = s.converged ? SolveStatus::converged : SolveStatus::max_iterations;
    s.outer_iters = res.at("outer_iters").get<int>();
    s.hjb_res = res.at("hjb_res").get<double>();
    s.fp_res = res.at("fp_res").get<double>();
    s.coupling_res = res.at("coupling_res").get<double>();
    s.hamiltonian = p.hamiltonian;
    s.coupling = p.coupling;
    s.mollifier = p.mollifier;
    return s;
}

MFGSolution obtain_solution(const RunConfig& c, const MFGProblem& p, std::ostream& log)
{
    if (!c.input_dir.empty()) {
        log << "loading saved run from " << c.input_dir << "\n";
        return load_solution(c, p);
    }
    log << "solving fixed point on n = " << c.n << " (dim " << c.dim << ")\n";
    return solve_fixed_point(p);
}

json pohozaev_json(const PohozaevReport& r)
{
    return {{"radius", r.radius},         {"center", r.center},     {"interior_lhs", r.interior_lhs},
            {"boundary_rhs", r.boundary_rhs}, {"residual", r.residual}, {"largest_term", r.largest_term}};
}

int do_solve([[maybe_unused]] const RunConfig& c, const MFGProblem& p, Outputs& out, json& results, std::ostream& log)
{
    const MFGSolution s = solve_fixed_point(p);
    log << "status " << to_string(s.status) << ", lambda " << s.lambda << ", outer iterations " << s.outer_iters << "\n";
    out.field("u.csv", s.u);
    out.field("m.csv", s.m);
    results = solution_json(s);
    return s.converged ? exit_ok : exit_not_converged;
}

int do_sweep(const RunConfig& c, const MFGProblem& p, Outputs& out, json& results, std::ostream& log)
{
    const SweepReport rep = sweep_alpha(p, c.sweep_alphas, c.sweep_refine);
    json rows = json::array();
    for (const auto& r : rep.rows) {
        json row{{"alpha", r.alpha},         {"converged", r.converged},   {"status", to_string(r.status)},
                 {"lambda", r.lambda},       {"max_m", r.max_m},           {"energy", r.energy},
                 {"mass_power", r.mass_power}, {"outer_iters", r.outer_iters}, {"concentrating", r.concentrating},
                 {"unknown_regime", r.unknown_regime}, {"message", r.message}};
        row["max_m_refined"] = r.max_m_refined ? json(*r.max_m_refined) : json(nullptr);
        row["status_refined"] = r.status_refined ? json(to_string(*r.status_refined)) : json(nullptr);
        rows.push_back(row);
        log << "alpha " << r.alpha << ": " << to_string(r.status) << ", max m " << r.max_m
            << (r.concentrating ? ", CONCENTRATING" : "") << (r.unknown_regime ? ", UNKNOWN-REGIME" : "") << "\n";
    }
    const json report{{"dim", rep.dim}, {"n", rep.n}, {"refine", rep.refine}, {"alpha1", rep.alpha1},
                      {"alpha2", std::isfinite(rep.alpha2) ? json(rep.alpha2) : json("inf")}, {"rows", rows}};
    out.report("sweep.json", report);
    results = report;
    return exit_ok;
}

int do_validate(const RunConfig& c, const MFGProblem& p, Outputs& out, json& results, std::ostream& log)
{
    const MFGSolution s = obtain_solution(c, p, log);
    json rep;
    rep["solution"] = solution_json(s);
    const EnergyReport e = energy_report(s, c.audit_beta ? std::vector<double>{*c.audit_beta} : std::vector<double>{});
    json norms = json::object();
    for (const auto& [b, v] : e.lbeta_norms) norms[format_exact(b)] = v;
    rep["energy"] = {{"grad_energy", e.grad_energy}, {"drift_energy", e.drift_energy}, {"mass_power", e.mass_power},
                     {"lambda", e.lambda},           {"lbeta_norms", norms},
                     {"energy_functional", energy_functional(s.m, s.u, s.coupling, s.hamiltonian)}};
    rep["pohozaev"] = pohozaev_json(pohozaev_residual(s, p.potential, c.pohozaev_radius, c.pohozaev_center));
    if (c.gamma == 2.0 && c.sign == CouplingSign::focusing) {
        const CrossValidation cv = cross_validate_quadratic(s, p.potential, c.nls_tol);
        const ScalarField phi = hopf_cole_forward(s);
        rep["hopf_cole"] = {{"m_mismatch", cv.m_mismatch},
                            {"lambda_mismatch", cv.lambda_mismatch},
                            {"lambda_nls", cv.ground_state.lambda_nls},
                            {"nls_residual_of_ground_state", cv.ground_state.residual},
                            {"nls_residual_of_forward_transform", nls_residual(phi, s.lambda, s.coupling, p.potential.sample(p.grid))}};
        log << "hopf-cole: m mismatch " << cv.m_mismatch << ", lambda mismatch " << cv.lambda_mismatch << "\n";
    } else {
        rep["hopf_cole"] = nullptr;
    }
    if (c.audit_beta) {
        const InequalityAudit a = audit_energy_inequality({s}, *c.audit_beta);
        rep["audit"] = {{"beta", a.beta}, {"delta_fit", a.delta_fit}, {"c_fit", a.c_fit}, {"pass", a.pass}, {"degenerate", a.degenerate}};
    }
    out.report("validation.json", rep);
    results = rep;
    return s.converged ? exit_ok : exit_not_converged;
}

int do_pohozaev(const RunConfig& c, const MFGProblem& p, Outputs& out, json& results, std::ostream& log)
{
    const MFGSolution s = obtain_solution(c, p, log);
    const PohozaevReport r = pohozaev_residual(s, p.potential, c.pohozaev_radius, c.pohozaev_center);
    log << "pohozaev residual " << r.residual << " (largest interior term " << r.largest_term << ")\n";
    results = {{"solution", solution_json(s)}, {"pohozaev", pohozaev_json(r)}};
    out.report("pohozaev.json", results);
    return s.converged ? exit_ok : exit_not_converged;
}

int do_particles(const RunConfig& c, const MFGProblem& p, Outputs& out, json& results, std::ostream& log)
{
    const MFGSolution s = obtain_solution(c, p, log);
    const ParticleReport r =
        simulate_particles(s.u, s.hamiltonian, s.m, {c.particles_count, c.particles_horizon, c.particles_dt, c.seed});
    log << "particles: L1 distance " << r.l1 << " over " << r.samples << " samples\n";
    out.field("histogram.csv", r.density);
    results = {{"solution", solution_json(s)},
               {"l1", r.l1},
               {"samples", r.samples},
               {"noise_floor", std::sqrt(static_cast<double>(p.grid.size()) / static_cast<double>(c.particles_count))}};
    out.report("particles.json", results);
    return s.converged ? exit_ok : exit_not_converged;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log)
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    Outputs out(dir);
    json results = nullptr;
    json failure = nullptr;
    int status = exit_ok;
    for (const auto& note : config.notes) log << note << "\n";
    try {
        const MFGProblem p = config.problem();
        switch (config.mode) {
        case Mode::solve: status = do_solve(config, p, out, results, log); break;
        case Mode::sweep: status = do_sweep(config, p, out, results, log); break;
        case Mode::validate: status = do_validate(config, p, out, results, log); break;
        case Mode::pohozaev: status = do_pohozaev(config, p, out, results, log); break;
        case Mode::particles: status = do_particles(config, p, out, results, log); break;
        }
    } catch (const std::exception& e) {
        status = exit_usage;
        failure = e.what();
        log << "error: " << e.what() << "\n";
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest{{"artifact_version", artifact_version},
                  {"run_id", config.run_id},
                  {"config", config_json(config)},
                  {"notes", config.notes},
                  {"exit_status", status},
                  {"failure", failure},
                  {"results", results},
                  {"files", out.inventory()},
                  {"timing", {{"started_at", started}, {"finished_at", utc_now()}, {"wall_seconds", wall}}}};
    write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    return status;
}

}  // namespace mfg
