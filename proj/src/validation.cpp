#include "mfg/validation.hpp"
#include "mfg/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/numeric/odeint.hpp>

namespace mfg {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double norm2(std::span<const double> p)
{
    double s = 0.0;
    for (double c : p) s += c * c;
    return std::sqrt(s);
}

/// x^e, by repeated multiplication when e is a small integer.
double power(double x, double e)
{
    if (e == 1.0) return x;
    if (e == 2.0) return x * x;
    if (e == 3.0) return x * x * x;
    if (e == 4.0) {
        const double x2 = x * x;
        return x2 * x2;
    }
    return std::pow(x, e);
}

}  // namespace

EnergyReport energy_report(const MFGSolution& s, const std::vector<double>& betas)
{
    const double gamma = s.hamiltonian.gamma;
    const double gc = conjugate_exponent(gamma);
    const double alpha = s.coupling.alpha;
    const VectorField gu = gradient(s.u);
    ScalarField ge(s.m.grid());
    ScalarField de(s.m.grid());
    for (std::size_t k = 0; k < s.m.size(); ++k) {
        ge[k] = std::pow(norm2(gu.node(k)), gamma) * s.m[k];
        de[k] = std::pow(norm2(h_grad(s.hamiltonian, gu.node(k))), gc) * s.m[k];
    }
    EnergyReport rep{integrate(ge), integrate(de), integrate(s.m.map([alpha](double x) { return std::pow(x, alpha + 1.0); })),
                     s.lambda, {}};
    rep.lbeta_norms[alpha + 1.0] = lp_norm(s.m, alpha + 1.0);
    for (double b : betas) rep.lbeta_norms[b] = lp_norm(s.m, b);
    return rep;
}

double beta_limit(double gamma, int dim_n)
{
    const double gc = conjugate_exponent(gamma);
    return gc < dim_n ? 1.0 + gc / (dim_n - gc) : inf;
}

InequalityAudit audit_energy_inequality(const std::vector<MFGSolution>& suite, double beta)
{
    if (suite.empty()) throw InvalidArgument("audit_energy_inequality: suite must be nonempty");
    const double gamma = suite.front().hamiltonian.gamma;
    const int dim = suite.front().m.grid().dim();
    const double limit = beta_limit(gamma, dim);
    if (!(beta > 1.0) || !(beta < limit))
        throw InvalidArgument("audit_energy_inequality: beta must satisfy 1 < beta < 1 + gamma'/(N - gamma') = " +
                              std::to_string(limit) + ", got " + std::to_string(beta));
    std::vector<double> x, y;
    for (const auto& s : suite) {
        const auto rep = energy_report(s);
        x.push_back(std::log(rep.grad_energy + 1.0));
        y.push_back(std::log(lp_norm(s.m, beta)));
    }
    const double n = static_cast<double>(x.size());
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    InequalityAudit audit{beta, 2.0, 0.0, false, false};
    if (sxx < 1e-24) {
        audit.degenerate = true;
    } else {
        const double slope = sxy / sxx;
        audit.delta_fit = slope > 0.0 ? 1.0 / slope : inf;
    }
    if (!std::isfinite(audit.delta_fit)) {
        audit.c_fit = inf;
        return audit;
    }
    for (std::size_t i = 0; i < x.size(); ++i)
        audit.c_fit = std::max(audit.c_fit, std::exp(audit.delta_fit * y[i] - x[i]));
    audit.pass = audit.delta_fit > 1.0 && std::isfinite(audit.c_fit);
    return audit;
}

namespace {

struct PohozaevFields {
    ScalarField g, m, ux, uy, mx, my, vx, vy;
};

struct PointValues {
    double g, m;
    std::array<double, 2> du, dm, dv;
};

PointValues at(const PohozaevFields& f, double x, double y)
{
    return {interpolate(f.g, x, y),
            interpolate(f.m, x, y),
            {interpolate(f.ux, x, y), interpolate(f.uy, x, y)},
            {interpolate(f.mx, x, y), interpolate(f.my, x, y)},
            {interpolate(f.vx, x, y), interpolate(f.vy, x, y)}};
}

/// Interior terms at one point, x the displacement from the centre.
std::array<double, 4> interior_terms(const PointValues& p, std::array<double, 2> x, double gamma, int dim)
{
    const double gu = std::hypot(p.du[0], p.du[1]);
    return {dim * p.g, (p.dv[0] * x[0] + p.dv[1] * x[1]) * p.m, (1.0 - dim / gamma) * std::pow(gu, gamma) * p.m,
            (2.0 - dim) * (p.du[0] * p.dm[0] + p.du[1] * p.dm[1])};
}

/// Boundary integrand at radius r in unit normal direction nu.
double boundary_term(const PointValues& p, std::array<double, 2> nu, double r, double gamma)
{
    const double gu = std::hypot(p.du[0], p.du[1]);
    const double gum = p.du[0] * p.dm[0] + p.du[1] * p.dm[1];
    const double un = p.du[0] * nu[0] + p.du[1] * nu[1];
    const double mn = p.dm[0] * nu[0] + p.dm[1] * nu[1];
    const double ug2 = gu > 0.0 ? std::pow(gu, gamma - 2.0) * un * un * p.m : 0.0;
    return r * (p.g - gum - std::pow(gu, gamma) * p.m / gamma + 2.0 * un * mn + ug2);
}

constexpr std::array<double, 3> gl_nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> gl_weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

PohozaevReport pohozaev_residual(const MFGSolution& s, const PotentialProfile& potential, double radius,
                                 std::array<double, 2> center)
{
    const TorusGrid& g = s.m.grid();
    const int dim = g.dim();
    const double gamma = s.hamiltonian.gamma;
    if (!(radius <= 0.45)) throw InvalidArgument("pohozaev_residual: radius must be <= 0.45 to stay interior");
    if (!(radius > 2.0 * g.h())) throw InvalidArgument("pohozaev_residual: radius must exceed two grid cells");
    for (int d = 0; d < dim; ++d)
        if (!(center[d] >= 0.0 && center[d] < 1.0))
            throw InvalidArgument("pohozaev_residual: center must lie in the fundamental domain [0,1)^N");

    const ScalarField v = potential.sample(g);
    const double sgn = s.coupling.sign == CouplingSign::focusing ? -1.0 : 1.0;
    ScalarField gfield(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        gfield[k] = v[k] * s.m[k] - s.lambda * s.m[k] + sgn * F_eval(s.coupling, s.m[k]);
    const VectorField gu = gradient(s.u);
    const VectorField gm = gradient(s.m);
    const VectorField gv = gradient(v);
    auto component = [&g, dim](const VectorField& f, int d) {
        ScalarField out(g);
        if (d < dim)
            for (std::size_t k = 0; k < g.size(); ++k) out[k] = f.at(k, d);
        return out;
    };
    const PohozaevFields f{gfield,          s.m, component(gu, 0), component(gu, 1), component(gm, 0), component(gm, 1),
                           component(gv, 0), component(gv, 1)};

    std::array<double, 4> terms{};
    double boundary = 0.0;
    const double h = g.h();
    if (dim == 1) {
        const double lo = center[0] - radius;
        const double hi = center[0] + radius;
        std::vector<double> cuts{lo};
        for (double y = (std::floor(lo / h) + 1.0) * h; y < hi; y += h) cuts.push_back(y);
        cuts.push_back(hi);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i], b = cuts[i + 1];
            if (!(b > a)) continue;
            for (int q = 0; q < 3; ++q) {
                const double y = 0.5 * (a + b) + 0.5 * (b - a) * gl_nodes[q];
                const auto t = interior_terms(at(f, y, 0.0), {y - center[0], 0.0}, gamma, 1);
                for (int j = 0; j < 4; ++j) terms[j] += 0.5 * (b - a) * gl_weights[q] * t[j];
            }
        }
        boundary = boundary_term(at(f, hi, 0.0), {1.0, 0.0}, radius, gamma) +
                   boundary_term(at(f, lo, 0.0), {-1.0, 0.0}, radius, gamma);
    } else {
        const int panels = static_cast<int>(std::ceil(2.0 * radius / h));
        const int nth = std::max(64, 4 * static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / h)));
        const double dth = 2.0 * std::numbers::pi / nth;
        const double dr = radius / panels;
        for (int t = 0; t < nth; ++t) {
            const double th = t * dth;
            const std::array<double, 2> nu{std::cos(th), std::sin(th)};
            for (int pnl = 0; pnl < panels; ++pnl) {
                for (int q = 0; q < 3; ++q) {
                    const double r = (pnl + 0.5) * dr + 0.5 * dr * gl_nodes[q];
                    const std::array<double, 2> x{r * nu[0], r * nu[1]};
                    const auto val = interior_terms(at(f, center[0] + x[0], center[1] + x[1]), x, gamma, 2);
                    const double w = 0.5 * dr * gl_weights[q] * r * dth;
                    for (int j = 0; j < 4; ++j) terms[j] += w * val[j];
                }
            }
            boundary += boundary_term(at(f, center[0] + radius * nu[0], center[1] + radius * nu[1]), nu, radius, gamma) *
                        radius * dth;
        }
    }
    const double lhs = terms[0] + terms[1] + terms[2] + terms[3];
    double largest = 0.0;
    for (double t : terms) largest = std::max(largest, std::abs(t));
    return {radius, center, lhs, boundary, std::abs(lhs - boundary), largest};
}

ScalarField hopf_cole_forward(const MFGSolution& s)
{
    if (s.hamiltonian.gamma != 2.0) throw InvalidArgument("hopf_cole_forward: requires gamma = 2");
    ScalarField phi = s.m.map([](double x) { return std::sqrt(x); });
    phi *= 1.0 / std::sqrt(integrate(product(phi, phi)));
    return phi;
}

double nls_residual(const ScalarField& phi, double lambda, const CouplingSpec& c, const ScalarField& v)
{
    const ScalarField lap = laplacian(phi);
    const double e = 2.0 * c.alpha + 1.0;
    double r = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k)
        r = std::max(r, std::abs(2.0 * lap[k] + lambda * phi[k] - v[k] * phi[k] + c.c_f * power(phi[k], e)));
    return r;
}

namespace {

struct NLSParts {
    double grad;   ///< ∫|∇⁺φ|²
    double pot;    ///< ∫Vφ²
    double power;  ///< ∫φ^(2β)
};

NLSParts nls_parts(std::span<const double> phi, std::span<const double> v, const TorusGrid& g, double two_beta)
{
    const double h = g.h();
    const double inv2 = 1.0 / (h * h);
    double grad = 0.0, pot = 0.0, pw = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        for (int d = 0; d < g.dim(); ++d) {
            const double diff = phi[g.neighbor(k, d, 1)] - phi[k];
            grad += diff * diff * inv2;
        }
        pot += v[k] * phi[k] * phi[k];
        pw += power(phi[k], two_beta);
    }
    const double cell = std::pow(h, g.dim());
    return {grad * cell, pot * cell, pw * cell};
}

double energy_of(const NLSParts& p, const CouplingSpec& c)
{
    const double beta = c.alpha + 1.0;
    return p.grad + 0.5 * p.pot - c.c_f / (2.0 * beta) * p.power;
}

void normalize_l2(std::vector<double>& phi, double cell)
{
    double s = 0.0;
    for (double x : phi) s += x * x;
    const double scale = 1.0 / std::sqrt(s * cell);
    for (double& x : phi) x *= scale;
}

}  // namespace

double nls_energy(const ScalarField& phi, const CouplingSpec& c, const ScalarField& v)
{
    return energy_of(nls_parts(phi.values(), v.values(), phi.grid(), 2.0 * (c.alpha + 1.0)), c);
}

GroundState solve_nls_ground_state(const TorusGrid& grid, const CouplingSpec& c, const ScalarField& v, double tol,
                                   const NLSOptions& opt)
{
    c.validate();
    if (!(tol > 0.0)) throw InvalidArgument("solve_nls_ground_state: tol must be > 0");
    if (!(v.grid() == grid)) throw InvalidArgument("solve_nls_ground_state: potential grid mismatch");
    if (c.sign != CouplingSign::focusing) throw InvalidArgument("solve_nls_ground_state: focusing coupling only");
    const double h = grid.h();
    const int dim = grid.dim();
    const double tau0 = opt.tau == 0.0 ? h * h / (8.0 * dim) : opt.tau;
    if (!(tau0 > 0.0)) throw InvalidArgument("solve_nls_ground_state: tau must be > 0");
    const double cell = std::pow(h, dim);
    const double inv2 = 1.0 / (h * h);
    const double e = 2.0 * c.alpha + 1.0;
    const double two_beta = 2.0 * (c.alpha + 1.0);
    const std::size_t n = grid.size();

    std::vector<double> phi(n);
    if (opt.initial) {
        if (!(opt.initial->grid() == grid)) throw InvalidArgument("solve_nls_ground_state: initial grid mismatch");
        if (!(opt.initial->min() > 0.0)) throw InvalidArgument("solve_nls_ground_state: initial guess must be positive");
        std::copy(opt.initial->values().begin(), opt.initial->values().end(), phi.begin());
    } else {
        const double two_pi = 2.0 * std::numbers::pi;
        for (std::size_t k = 0; k < n; ++k) {
            const auto ij = grid.multi_index(k);
            double p = std::cos(two_pi * grid.coord(ij[0]));
            if (dim == 2) p *= std::cos(two_pi * grid.coord(ij[1]));
            phi[k] = 1.0 + 1e-2 * p;
        }
    }
    normalize_l2(phi, cell);

    const auto vv = v.values();
    double tau = tau0;
    double energy = energy_of(nls_parts(phi, vv, grid, two_beta), c);
    std::vector<double> next(n);
    double change = inf;
    long step = 0;
    // neighbour tables, [axis][k] -> flat index
    std::array<std::vector<std::size_t>, 2> up, down;
    for (int d = 0; d < dim; ++d) {
        up[d].resize(n);
        down[d].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            up[d][k] = grid.neighbor(k, d, 1);
            down[d][k] = grid.neighbor(k, d, -1);
        }
    }
    double residual = inf;
    while (step < opt.max_steps) {
        for (std::size_t k = 0; k < n; ++k) {
            double lap = -2.0 * dim * phi[k];
            for (int d = 0; d < dim; ++d) lap += phi[up[d][k]] + phi[down[d][k]];
            const double grad = -2.0 * lap * inv2 + vv[k] * phi[k] - c.c_f * power(phi[k], e);
            next[k] = phi[k] - tau * grad;
        }
        normalize_l2(next, cell);
        const double e_next = energy_of(nls_parts(next, vv, grid, two_beta), c);
        if (e_next > energy + 1e-12 * std::max(1.0, std::abs(energy))) {
            tau *= 0.5;
            if (tau < 1e-8 * tau0) throw NLSConvergenceError("solve_nls_ground_state: step size collapsed", change);
            continue;
        }
        ++step;
        double diff = 0.0;
        double lo = inf;
        for (std::size_t k = 0; k < n; ++k) {
            diff = std::max(diff, std::abs(next[k] - phi[k]));
            lo = std::min(lo, next[k]);
        }
        if (!(lo > 0.0)) throw std::logic_error("solve_nls_ground_state: lost positivity at step " + std::to_string(step));
        phi.swap(next);
        energy = e_next;
        change = diff / tau;
        if (change <= tol) {
            const NLSParts parts = nls_parts(phi, vv, grid, two_beta);
            residual = nls_residual(ScalarField(grid, phi), 2.0 * parts.grad + parts.pot - c.c_f * parts.power, c, v);
            // iterates no longer move, so the residual cannot improve
            if (residual <= tol || diff == 0.0) break;
        }
    }
    if (!(change <= tol && residual <= tol))
        throw NLSConvergenceError("solve_nls_ground_state: no convergence after " + std::to_string(step) +
                                      " steps, last change " + format_exact(change) + ", residual " + format_exact(residual),
                                  change);

    ScalarField out(grid, phi);
    const NLSParts parts = nls_parts(phi, vv, grid, two_beta);
    const double lambda = 2.0 * parts.grad + parts.pot - c.c_f * parts.power;
    const bool zero_v = std::all_of(vv.begin(), vv.end(), [](double x) { return x == 0.0; });
    return {out, lambda, energy_of(parts, c), nls_residual(out, lambda, c, v), static_cast<int>(step), tau, zero_v};
}

double whole_space_ground_mass(double alpha, int dim_n)
{
    if (!(alpha > 0.0)) throw InvalidArgument("whole_space_ground_mass: alpha must be > 0");
    if (dim_n != 1 && dim_n != 2) throw InvalidArgument("whole_space_ground_mass: N must be 1 or 2");
    if (dim_n == 2 && alpha >= 1e6) throw InvalidArgument("whole_space_ground_mass: alpha out of range");
    using State = std::array<double, 3>;  // ψ, ψ', ∫ψ² r^(N-1)
    const double e = 2.0 * alpha + 1.0;
    const int nd = dim_n;
    auto rhs = [e, nd](const State& s, State& ds, double r) {
        ds[0] = s[1];
        ds[1] = 0.5 * (s[0] - std::pow(std::max(s[0], 0.0), e)) - (nd - 1) / r * s[1];
        ds[2] = s[0] * s[0] * std::pow(r, nd - 1);
    };
    boost::numeric::odeint::runge_kutta4<State> stepper;
    const double dr = 1e-3;
    const double r_max = 60.0;

    enum class Outcome { overshoot, undershoot, reached };
    auto shoot = [&](double psi0, double& mass) {
        const double c2 = (psi0 - std::pow(psi0, e)) / (2.0 * nd);
        double r = dr;
        State s{psi0 + 0.5 * c2 * r * r, c2 * r, psi0 * psi0 * std::pow(r, nd) / nd};
        while (r < r_max) {
            stepper.do_step(rhs, s, r, dr);
            r += dr;
            if (s[0] < 0.0) {
                mass = s[2];
                return Outcome::overshoot;
            }
            if (s[1] > 0.0) {
                mass = s[2];
                return Outcome::undershoot;
            }
        }
        mass = s[2];
        return Outcome::reached;
    };

    double lo = 1.0 + 1e-9;
    double hi = 2.0;
    double mass = 0.0;
    while (shoot(hi, mass) != Outcome::overshoot) {
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("whole_space_ground_mass: no overshoot bracket");
    }
    double best = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        double m = 0.0;
        const Outcome o = shoot(mid, m);
        if (o == Outcome::overshoot) {
            hi = mid;
        } else {
            lo = mid;
            best = m;
        }
    }
    const double sphere = dim_n == 1 ? 2.0 : 2.0 * std::numbers::pi;
    return sphere * best;
}

MassScalingReport mass_scaling_check(const GroundState& gs, const CouplingSpec& c, double domain_length)
{
    const TorusGrid& g = gs.phi.grid();
    const int dim = g.dim();
    const double alpha = c.alpha;
    const double L = domain_length;
    if (!gs.zero_potential) throw InvalidArgument("mass_scaling_check: requires V = 0");
    if (!(gs.lambda_nls < 0.0))
        throw InvalidArgument("mass_scaling_check: requires lambda < 0, got " + std::to_string(gs.lambda_nls));
    if (!(L > 0.0)) throw InvalidArgument("mass_scaling_check: domain length must be > 0");
    const double expected_cf = std::pow(L, 2.0 - dim * alpha);
    if (std::abs(c.c_f - expected_cf) > 1e-12 * expected_cf)
        throw InvalidArgument("mass_scaling_check: c_f must equal L^(2 - N alpha) = " + std::to_string(expected_cf));
    const double concentration = gs.phi.max() / gs.phi.min();
    if (!(concentration >= 100.0))
        throw InvalidArgument("mass_scaling_check: state not concentrated, max/min phi = " + std::to_string(concentration));

    const double big_lambda = std::abs(gs.lambda_nls) / (L * L);
    const double amp = std::pow(big_lambda, -1.0 / (2.0 * alpha)) * std::pow(L, -0.5 * dim);
    const double hz = L * g.h() * std::sqrt(big_lambda);
    double psi_mass = 0.0;
    for (double p : gs.phi.values()) psi_mass += amp * p * amp * p;
    psi_mass *= std::pow(hz, dim);

    const double eq = std::pow(big_lambda, -1.0 / (2.0 * alpha) - 1.0) * std::pow(L, -0.5 * dim - 2.0) *
                      nls_residual(gs.phi, gs.lambda_nls, c, ScalarField(g, 0.0));
    const double tail = amp * gs.phi.min();
    const double lhs = std::pow(big_lambda, (dim * alpha - 2.0) / (2.0 * alpha));
    const double whole = whole_space_ground_mass(alpha, dim);
    return {lhs,      psi_mass, whole, std::abs(lhs - whole), std::max(eq, tail),           eq,
            tail,     L * std::sqrt(big_lambda), std::abs(dim * alpha - 2.0) < 1e-12, concentration};
}

CrossValidation cross_validate_quadratic(const MFGSolution& s, const PotentialProfile& potential, double tol,
                                         const NLSOptions& opt)
{
    if (s.hamiltonian.gamma != 2.0) throw InvalidArgument("cross_validate_quadratic: requires gamma = 2");
    const TorusGrid& g = s.m.grid();
    GroundState gs = solve_nls_ground_state(g, s.coupling, potential.sample(g), tol, opt);
    double dm = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) dm = std::max(dm, std::abs(s.m[k] - gs.phi[k] * gs.phi[k]));
    return {dm, std::abs(s.lambda - gs.lambda_nls), std::move(gs)};
}

}  // namespace mfg
