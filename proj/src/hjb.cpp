#include "mfg/hjb.hpp"
#include "mfg/field_io.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

namespace mfg {

namespace {

struct Extent {
    double lo;
    double hi;
};

Extent extent(std::span<const double> v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return {*lo, *hi};
}

}  // namespace

ScalarField hamiltonian_field(const ScalarField& u, const HamiltonianSpec& h)
{
    const VectorField g = gradient(u);
    ScalarField out(u.grid());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = h_eval(h, g.node(k));
    return out;
}

namespace {

/// R + Δ_h u - H(∇_h u); the residual for λ is |λ - this|.
ScalarField stationary_defect(const ScalarField& u, const ScalarField& rhs, const HamiltonianSpec& h)
{
    ScalarField r = rhs + laplacian(u);
    r -= hamiltonian_field(u, h);
    return r;
}

}  // namespace

double hjb_residual(const ScalarField& u, double lambda, const ScalarField& rhs, const HamiltonianSpec& h)
{
    const ScalarField r = stationary_defect(u, rhs, h);
    double m = 0.0;
    for (double v : r.values()) m = std::max(m, std::abs(lambda - v));
    return m;
}

double best_lambda(const ScalarField& u, const ScalarField& rhs, const HamiltonianSpec& h)
{
    const ScalarField r = stationary_defect(u, rhs, h);
    const Extent e = extent(r.values());
    return 0.5 * (e.lo + e.hi);
}

ErgodicSolution solve_ergodic_hjb(const ErgodicHJBProblem& p, const HJBOptions& opt, const std::optional<ScalarField>& initial)
{
    p.hamiltonian.validate();
    if (!(p.rhs.grid() == p.grid)) throw InvalidArgument("solve_ergodic_hjb: rhs grid mismatch");
    if (!p.rhs.all_finite()) throw InvalidArgument("solve_ergodic_hjb: rhs must be finite");
    if (!(opt.tol > 0.0)) throw InvalidArgument("solve_ergodic_hjb: tol must be > 0");
    if (opt.max_steps < 1) throw InvalidArgument("solve_ergodic_hjb: max_steps must be >= 1");
    const TorusGrid& g = p.grid;
    double dt = opt.dt == 0.0 ? 0.5 * g.h() : opt.dt;
    const double lap_norm = 4.0 * g.dim() / (g.h() * g.h());
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("solve_ergodic_hjb: dt must be > 0");
    if (1.0 + dt * lap_norm > 1e12)
        throw InvalidArgument("solve_ergodic_hjb: dt = " + std::to_string(dt) + " makes I - dt Δ_h too ill-conditioned");

    ScalarField start = initial ? *initial : ScalarField(g, 0.0);
    if (!(start.grid() == g)) throw InvalidArgument("solve_ergodic_hjb: initial guess grid mismatch");
    start += -mean(start);

    const Eigen::SparseMatrix<double> lap = laplacian_matrix(g);
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::SparseMatrix<double> eye(n, n);
    eye.setIdentity();

    double last_res = std::numeric_limits<double>::infinity();
    int total_steps = 0;
    for (int attempt = 0; attempt <= 6; ++attempt, dt *= 0.5) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
        solver.compute(eye - dt * lap);
        if (solver.info() != Eigen::Success) throw std::runtime_error("solve_ergodic_hjb: factorization failed");

        ScalarField v = start;
        Eigen::VectorXd rhs(n);
        const double first_res = hjb_residual(v, best_lambda(v, p.rhs, p.hamiltonian), p.rhs, p.hamiltonian);
        bool blew_up = false;
        for (int step = 1; step <= opt.max_steps; ++step) {
            ++total_steps;
            const ScalarField hv = hamiltonian_field(v, p.hamiltonian);
            for (Eigen::Index k = 0; k < n; ++k) rhs[k] = v[k] + dt * (p.rhs[k] - hv[k]);
            const Eigen::VectorXd sol = solver.solve(rhs);
            ScalarField next(g);
            for (Eigen::Index k = 0; k < n; ++k) next[k] = sol[k];

            ScalarField incr = next - v;
            const Extent ie = extent(incr.values());
            const double incr_res = 0.5 * (ie.hi - ie.lo) / dt;

            const ScalarField defect = stationary_defect(next, p.rhs, p.hamiltonian);
            const Extent de = extent(defect.values());
            const double res = 0.5 * (de.hi - de.lo);
            last_res = res;
            if (!std::isfinite(res) || res > 1e6 * (first_res + 1.0)) {
                blew_up = true;
                break;
            }
            next += -mean(next);
            if (incr_res <= opt.tol && res <= opt.tol) {
                const double lambda = 0.5 * (de.lo + de.hi);
                return {next, lambda, hjb_residual(next, lambda, p.rhs, p.hamiltonian), total_steps};
            }
            v = std::move(next);
        }
        if (!blew_up) break;
    }
    throw HJBConvergenceError("solve_ergodic_hjb: no convergence after " + std::to_string(total_steps) +
                                  " steps, last residual " + format_exact(last_res),
                              last_res, total_steps);
}

}  // namespace mfg
