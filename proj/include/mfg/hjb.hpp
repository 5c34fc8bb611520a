#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "mfg/grid.hpp"
#include "mfg/model.hpp"

namespace mfg {

/// -Δu + H(∇u) + λ = R on the torus, unknowns (u, λ) with mean(u) = 0.
struct ErgodicHJBProblem {
    TorusGrid grid;
    HamiltonianSpec hamiltonian;
    ScalarField rhs;
};

struct ErgodicSolution {
    ScalarField u;
    double lambda;
    double residual_inf;
    int iterations;
};

struct HJBOptions {
    /// Pseudo-time step; 0 selects 0.5 h.
    double dt = 0.0;
    double tol = 1e-10;
    int max_steps = 100000;
};

/// Marching did not reach the tolerance; carries the last stationary residual.
class HJBConvergenceError : public std::runtime_error {
public:
    HJBConvergenceError(const std::string& what, double last_residual, int steps)
        : std::runtime_error(what), last_residual(last_residual), steps(steps)
    {
    }
    double last_residual;
    int steps;
};

/// H(∇_h u) at every node.
ScalarField hamiltonian_field(const ScalarField& u, const HamiltonianSpec& h);

/// ‖-Δ_h u + H(∇_h u) + λ - R‖_∞.
double hjb_residual(const ScalarField& u, double lambda, const ScalarField& rhs, const HamiltonianSpec& h);

/// λ minimizing the ∞-norm residual for a fixed u: midrange of R + Δ_h u - H(∇_h u).
double best_lambda(const ScalarField& u, const ScalarField& rhs, const HamiltonianSpec& h);

/**
 * Long-time semi-implicit marching
 *
 *     (I - dt Δ_h) v_new = v + dt (R - H(∇_h v))
 *
 * until both the drift-corrected increment and the stationary residual of
 * v_new fall below tol. The implicit matrix is factored once. If the
 * iterate blows up, dt is halved and marching restarts from the initial
 * guess (at most 6 times).
 */
ErgodicSolution solve_ergodic_hjb(const ErgodicHJBProblem& p, const HJBOptions& opt,
                                  const std::optional<ScalarField>& initial = std::nullopt);

}  // namespace mfg
