#include "mfg/mfg_solver.hpp"
#include "mfg/field_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mfg {

ScalarField PotentialProfile::sample(const TorusGrid& grid) const
{
    if (table) {
        if (table->grid() == grid) return *table;
        const ScalarField& t = *table;
        return ScalarField::sample(grid, [&t](double x, double y) { return interpolate(t, x, y); });
    }
    const double a = amplitude;
    const double w = 2.0 * std::numbers::pi * freq;
    const int dim = grid.dim();
    return ScalarField::sample(grid, [=](double x, double y) {
        double s = 1.0 - std::cos(w * x);
        if (dim == 2) s += 1.0 - std::cos(w * y);
        return 0.5 * a * s;
    });
}

double PotentialProfile::bound(int dim) const { return table ? table->max() : amplitude * dim; }

ScalarField InitialDensity::build(const TorusGrid& grid) const
{
    const double two_pi = 2.0 * std::numbers::pi;
    ScalarField m(grid, 1.0);
    switch (kind) {
    case Kind::uniform:
        return m;
    case Kind::cosine:
        m = ScalarField::sample(grid, [&](double x, double y) {
            return 1.0 + eps * std::cos(two_pi * x) * (grid.dim() == 2 ? std::cos(two_pi * y) : 1.0);
        });
        break;
    case Kind::bump:
        m = ScalarField::sample(grid, [&](double x, double y) {
            double r2 = (x - 0.5) * (x - 0.5);
            if (grid.dim() == 2) r2 += (y - 0.5) * (y - 0.5);
            return 1.0 + (peak - 1.0) * std::exp(-r2 / (width * width));
        });
        break;
    }
    m *= 1.0 / integrate(m);
    return m;
}

namespace {

double parse_number(std::string_view s, const std::string& what)
{
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw InvalidArgument(what + ": cannot parse number '" + std::string(s) + "'");
    return v;
}

}  // namespace

InitialDensity InitialDensity::parse(const std::string& text)
{
    InitialDensity d;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "uniform" && colon == std::string::npos) return d;
    if (head == "cosine") {
        d.kind = Kind::cosine;
        d.eps = parse_number(tail, "initial_density cosine");
        if (!(std::abs(d.eps) < 1.0)) throw InvalidArgument("initial_density cosine:EPS needs |EPS| < 1");
        return d;
    }
    if (head == "bump") {
        d.kind = Kind::bump;
        const auto comma = tail.find(',');
        if (comma == std::string::npos) throw InvalidArgument("initial_density bump needs PEAK,WIDTH");
        d.peak = parse_number(std::string_view(tail).substr(0, comma), "initial_density bump");
        d.width = parse_number(std::string_view(tail).substr(comma + 1), "initial_density bump");
        if (!(d.peak > 0.0) || !(d.width > 0.0)) throw InvalidArgument("initial_density bump needs PEAK > 0 and WIDTH > 0");
        return d;
    }
    throw InvalidArgument("initial_density must be uniform, cosine:EPS or bump:PEAK,WIDTH; got '" + text + "'");
}

std::string InitialDensity::describe() const
{
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
    case Kind::uniform: os << "uniform"; break;
    case Kind::cosine: os << "cosine:" << eps; break;
    case Kind::bump: os << "bump:" << peak << ',' << width; break;
    }
    return os.str();
}

void MFGProblem::validate() const
{
    hamiltonian.validate();
    coupling.validate();
    if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in (0, 1], got " + std::to_string(theta));
    if (!(tol > 0.0)) throw InvalidArgument("outer_tol must be > 0");
    if (max_outer_iters < 1) throw InvalidArgument("outer_max_iters must be >= 1");
    if (!(potential.amplitude >= 0.0) || !std::isfinite(potential.amplitude))
        throw InvalidArgument("potential amplitude must be >= 0 (V >= 0)");
    if (potential.freq < 1) throw InvalidArgument("potential frequency must be >= 1");
    if (potential.table && !(potential.table->min() >= 0.0)) throw InvalidArgument("potential must be >= 0 everywhere");
    kernel_weights(mollifier, grid);
}

std::string to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::diverged: return "diverged";
    case SolveStatus::inner_failure: return "inner_failure";
    }
    return "unknown";
}

ScalarField coupling_rhs(const ScalarField& v, const ScalarField& m, const CouplingSpec& c, const Mollifier& psi)
{
    const ScalarField fm = mollify(m, psi).map([&c](double x) { return f_eval(c, x); });
    if (c.sign == CouplingSign::focusing) return v - fm;
    return v + mollify(fm, psi);
}

namespace {

double l1_distance(const ScalarField& a, const ScalarField& b) { return lp_norm(a - b, 1.0); }

void check_density(const ScalarField& m, const TorusGrid& g)
{
    if (!(m.grid() == g)) throw InvalidArgument("solve_fixed_point: m0 grid mismatch");
    if (!(m.min() > 0.0)) throw InvalidArgument("solve_fixed_point: m0 must be positive");
    if (std::abs(integrate(m) - 1.0) > 1e-10) throw InvalidArgument("solve_fixed_point: m0 must have unit mass");
}

}  // namespace

MFGSolution solve_fixed_point(const MFGProblem& p, const std::optional<ScalarField>& m0)
{
    p.validate();
    const TorusGrid& g = p.grid;
    ScalarField m = m0 ? *m0 : p.initial.build(g);
    check_density(m, g);
    const ScalarField v = p.potential.sample(g);

    MFGSolution s{ScalarField(g), 0.0, m};
    s.hamiltonian = p.hamiltonian;
    s.coupling = p.coupling;
    s.mollifier = p.mollifier;
    s.initial_max_m = m.max();

    std::optional<ScalarField> u_prev;
    double theta = p.theta;
    int rising = 0;
    for (int it = 1; it <= p.max_outer_iters; ++it) {
        s.outer_iters = it;
        ErgodicSolution hjb{ScalarField(g), 0.0, 0.0, 0};
        InvariantMeasure fp{ScalarField(g), 0.0, 0};
        try {
            hjb = solve_ergodic_hjb({g, p.hamiltonian, coupling_rhs(v, m, p.coupling, p.mollifier)}, p.hjb, u_prev);
            const DriftField b = DriftField::from_value_function(hjb.u, p.hamiltonian);
            fp = solve_invariant_measure(b, p.fp);
            if (b.mesh_peclet() >= 1.0 && s.warnings.empty())
                s.warnings.push_back("mesh Peclet number " + std::to_string(b.mesh_peclet()) + " >= 1 at iteration " +
                                     std::to_string(it));
        } catch (const InvalidArgument&) {
            throw;
        } catch (const std::exception& e) {
            s.status = SolveStatus::inner_failure;
            s.message = std::string("outer iteration ") + std::to_string(it) + ": " + e.what();
            return s;
        }
        u_prev = hjb.u;

        const double diff = l1_distance(fp.m, m);
        s.history.push_back(diff);
        const ScalarField r_new = coupling_rhs(v, fp.m, p.coupling, p.mollifier);
        const double hjb_res = hjb_residual(hjb.u, hjb.lambda, r_new, p.hamiltonian);
        s.u = hjb.u;
        s.lambda = hjb.lambda;
        s.hjb_res = hjb_res;
        s.fp_res = fp.residual_inf;
        if (diff <= p.tol && hjb_res <= p.tol && fp.residual_inf <= p.tol) {
            s.m = fp.m;
            s.converged = true;
            s.status = SolveStatus::converged;
            const ScalarField fm = s.m.map([&](double x) { return f_eval(p.coupling, x); });
            const ScalarField fmol = mollify(s.m, p.mollifier).map([&](double x) { return f_eval(p.coupling, x); });
            s.coupling_res = lp_norm(fmol - fm, std::numeric_limits<double>::infinity());
            return s;
        }

        const std::size_t h = s.history.size();
        rising = h >= 2 && s.history[h - 1] > s.history[h - 2] ? rising + 1 : 0;
        if (rising >= 3) {
            theta *= 0.5;
            rising = 0;
        }
        m *= 1.0 - theta;
        m += theta * fp.m;
        s.m = m;
        if (m.max() > 10.0 * s.initial_max_m) {
            s.status = SolveStatus::diverged;
            s.message = "max m exceeded 10x its initial value at iteration " + std::to_string(it);
            return s;
        }
    }
    s.status = SolveStatus::max_iterations;
    s.message = "no convergence within " + std::to_string(p.max_outer_iters) + " outer iterations, last L1 update " +
                format_exact(s.history.back());
    return s;
}

RescaledSolution rescale_blowup(const MFGSolution& s, const PotentialProfile& potential)
{
    const TorusGrid& g = s.m.grid();
    const double M = s.m.max();
    if (!(M > 0.0)) throw InvalidArgument("rescale_blowup: max m must be > 0");
    const std::size_t x0 = s.m.argmax();
    const auto ij = g.multi_index(x0);
    const double gc = conjugate_exponent(s.hamiltonian.gamma);
    const double alpha = s.coupling.alpha;
    const double a = std::pow(M, -alpha / gc);
    const double ag = std::pow(a, gc);

    ScalarField v = shift(s.u, ij[0], ij[1]) * std::pow(a, gc - 2.0);
    ScalarField mu = shift(s.m, ij[0], ij[1]) * (1.0 / M);
    ScalarField w = shift(potential.sample(g), ij[0], ij[1]) * ag;
    CouplingSpec fk = s.coupling;
    fk.c_f = ag * s.coupling.c_f * std::pow(M, alpha);
    return {std::move(v), std::move(mu), ag * s.lambda, a, M, x0, g.h() / a, s.hamiltonian, fk, std::move(w), s.mollifier};
}

RescalingResidual rescaling_residual(const RescaledSolution& r)
{
    const TorusGrid& g = r.v.grid();
    const double ratio = g.h() / r.spacing;
    const ScalarField lap = laplacian(r.v) * (ratio * ratio);
    const VectorField grad_unit = gradient(r.v);
    std::vector<double> grad(grad_unit.values().begin(), grad_unit.values().end());
    for (double& c : grad) c *= ratio;
    const VectorField gv(g, std::move(grad));

    const ScalarField rhs = coupling_rhs(r.w_k, r.mu, r.f_k, r.mollifier);
    double hjb = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        hjb = std::max(hjb, std::abs(-lap[k] + h_eval(r.h_k, gv.node(k)) + r.Lambda - rhs[k]));

    std::optional<DriftField> b;
    if (r.h_k.gamma == 2.0) {
        b = DriftField::from_potential(r.v, r.spacing);
    } else {
        std::vector<double> flat(g.size() * g.dim());
        for (std::size_t k = 0; k < g.size(); ++k) {
            const auto dh = h_grad(r.h_k, gv.node(k));
            for (int d = 0; d < g.dim(); ++d) flat[k * g.dim() + d] = -dh[d];
        }
        b = DriftField::from_nodal(VectorField(g, std::move(flat)), r.spacing);
    }
    return {hjb, fp_residual(r.mu, *b)};
}

double energy_functional(const ScalarField& m, const ScalarField& u, const CouplingSpec& c, const HamiltonianSpec& h)
{
    const double gc = conjugate_exponent(h.gamma);
    const double beta = c.alpha + 1.0;
    const VectorField gu = gradient(u);
    ScalarField kinetic(m.grid());
    ScalarField potential(m.grid());
    for (std::size_t k = 0; k < m.size(); ++k) {
        const auto dh = h_grad(h, gu.node(k));
        double a2 = 0.0;
        for (double x : dh) a2 += x * x;
        kinetic[k] = std::pow(std::sqrt(a2), gc) * m[k];
        potential[k] = std::pow(m[k], beta);
    }
    return integrate(kinetic) / gc - c.c_f / beta * integrate(potential);
}

namespace {

MFGProblem at_resolution(const MFGProblem& p, int n, int k, double alpha)
{
    MFGProblem q{TorusGrid(p.grid.dim(), n), p.hamiltonian, p.coupling, p.potential, Mollifier{k}};
    q.coupling.alpha = alpha;
    q.theta = p.theta;
    q.tol = p.tol;
    q.max_outer_iters = p.max_outer_iters;
    q.hjb = p.hjb;
    q.fp = p.fp;
    q.initial = p.initial;
    if (q.hjb.dt != 0.0) q.hjb.dt *= static_cast<double>(p.grid.n()) / n;
    return q;
}

bool blew_up(const MFGSolution& s)
{
    return !s.converged && s.m.max() > 10.0 * s.initial_max_m;
}

}  // namespace

SweepReport sweep_alpha(const MFGProblem& tmpl, const std::vector<double>& alphas, bool refine)
{
    if (alphas.empty()) throw InvalidArgument("sweep_alpha: alphas must be nonempty");
    if (!std::is_sorted(alphas.begin(), alphas.end())) throw InvalidArgument("sweep_alpha: alphas must be sorted");
    const int dim = tmpl.grid.dim();
    const auto ce = critical_exponents(tmpl.hamiltonian.gamma, dim);
    SweepReport rep{dim, tmpl.grid.n(), refine, ce.alpha1, ce.alpha2, {}};
    for (double alpha : alphas) {
        const MFGSolution s = solve_fixed_point(at_resolution(tmpl, tmpl.grid.n(), tmpl.mollifier.k, alpha));
        const double mp = integrate(s.m.map([alpha](double x) { return std::pow(x, alpha + 1.0); }));
        CouplingSpec c = tmpl.coupling;
        c.alpha = alpha;
        SweepRow row{alpha, s.converged, s.status, s.lambda, s.m.max(), energy_functional(s.m, s.u, c, tmpl.hamiltonian),
                     mp, s.outer_iters, std::nullopt, std::nullopt, blew_up(s), alpha == ce.alpha2, s.message};
        if (refine) {
            const MFGSolution f = solve_fixed_point(at_resolution(tmpl, 2 * tmpl.grid.n(), 2 * tmpl.mollifier.k, alpha));
            row.max_m_refined = f.m.max();
            row.status_refined = f.status;
            if (s.converged && f.converged && f.m.max() >= 1.5 * s.m.max()) row.concentrating = true;
            if (blew_up(f)) row.concentrating = true;
            if (row.message.empty()) row.message = f.message;
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace mfg
