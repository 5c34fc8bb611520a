#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/mfg_solver.hpp"
#include "mfg/model.hpp"

namespace mfg {

struct EnergyReport {
    /// ∫|∇u|^γ m
    double grad_energy;
    /// ∫|A|^γ' m with A = -∇H(∇u)
    double drift_energy;
    /// ∫m^(α+1)
    double mass_power;
    double lambda;
    std::map<double, double> lbeta_norms;
};

/// Quadrature of the a-priori quantities; lbeta_norms always includes β = α + 1.
EnergyReport energy_report(const MFGSolution& s, const std::vector<double>& betas = {});

struct InequalityAudit {
    double beta;
    double delta_fit;
    double c_fit;
    bool pass;
    /// Spread of log(E + 1) over the suite was zero, so δ fell back to 2.
    bool degenerate;
};

/// Upper limit for β: 1 + γ'/(N - γ') when γ' < N, otherwise +inf.
double beta_limit(double gamma, int dim_n);

/**
 * Fits ‖m‖_β^δ <= C (∫|∇u|^γ m + 1) over the suite: δ = 1/slope of the
 * log-log regression, C the largest ratio at that δ.
 */
InequalityAudit audit_energy_inequality(const std::vector<MFGSolution>& suite, double beta);

struct PohozaevReport {
    double radius;
    std::array<double, 2> center;
    /// N∫G + ∫(∇V·x) m + (1 - N/γ)∫|∇u|^γ m + (2 - N)∫∇u·∇m over the ball.
    double interior_lhs;
    double boundary_rhs;
    double residual;
    /// Largest of the four interior terms in magnitude.
    double largest_term;
};

/**
 * Both sides of the Pohozaev identity on the ball B(center, R), with
 * G = Vm - λm ∓ F(m). 1D integrates the piecewise-linear interpolant exactly;
 * 2D uses Gauss-Legendre in r by trapezoid in θ on bilinear interpolants.
 */
PohozaevReport pohozaev_residual(const MFGSolution& s, const PotentialProfile& potential, double radius,
                                 std::array<double, 2> center = {0.5, 0.5});

/// √m normalized to unit L² mass; γ must be 2.
ScalarField hopf_cole_forward(const MFGSolution& s);

/// ‖2Δ_h φ + λφ - Vφ + C_f φ^(2α+1)‖_∞.
double nls_residual(const ScalarField& phi, double lambda, const CouplingSpec& c, const ScalarField& v);

/// ∫|∇⁺φ|² + ½∫Vφ² - C_f/(2β)∫φ^(2β), forward differences, β = α + 1.
double nls_energy(const ScalarField& phi, const CouplingSpec& c, const ScalarField& v);

struct GroundState {
    ScalarField phi;
    double lambda_nls;
    double energy;
    double residual;
    int steps;
    double tau;
    bool zero_potential;
};

struct NLSOptions {
    /// 0 selects h²/(8 N).
    double tau = 0.0;
    long max_steps = 20'000'000;
    std::optional<ScalarField> initial;
};

class NLSConvergenceError : public std::runtime_error {
public:
    NLSConvergenceError(const std::string& what, double last_change)
        : std::runtime_error(what), last_change(last_change)
    {
    }
    double last_change;
};

/**
 * Normalized explicit gradient flow of the NLS energy,
 * φ <- φ - τ(-2Δφ + Vφ - C_f φ^(2α+1)), renormalized each step, until
 * ‖φ_new - φ‖_∞ / τ <= tol and nls_residual <= tol. τ halves whenever the
 * energy rises by more than 1e-12 max(1, |E|). Default start is
 * 1 + 1e-2 Π cos 2πx_d.
 */
GroundState solve_nls_ground_state(const TorusGrid& grid, const CouplingSpec& c, const ScalarField& v, double tol,
                                   const NLSOptions& opt = {});

/// Mass of the positive decaying radial solution of 2Δψ - ψ + ψ^(2α+1) = 0 in R^N (shooting).
double whole_space_ground_mass(double alpha, int dim_n);

struct MassScalingReport {
    /// |Λ|^((Nα - 2)/(2α)) with Λ the eigenvalue of the period-L problem.
    double lhs;
    /// ∫ψ² of the rescaled lattice function (equals lhs up to round-off).
    double psi_mass;
    /// Whole-space mass of the limiting profile.
    double whole_space_mass;
    /// |lhs - whole_space_mass|.
    double mismatch;
    /// max of the rescaled equation residual and the boundary value of ψ.
    double residual;
    double equation_residual;
    double tail;
    /// ψ period in rescaled units, L |Λ|^(1/2).
    double period;
    bool degenerate;
    double concentration;
};

/**
 * Compares a concentrated torus ground state with the whole-space profile.
 * The state is read as the period-L problem with C_f = 1 (so the unit-torus
 * coupling must be L^(2 - Nα)) and rescaled by ψ(z) = |Λ|^(-1/(2α)) Φ(z/|Λ|^(1/2)).
 */
MassScalingReport mass_scaling_check(const GroundState& gs, const CouplingSpec& c, double domain_length);

struct CrossValidation {
    double m_mismatch;
    double lambda_mismatch;
    GroundState ground_state;
};

/// Runs the NLS oracle on the solution's grid and compares m with φ² and the two λ.
CrossValidation cross_validate_quadratic(const MFGSolution& s, const PotentialProfile& potential, double tol,
                                         const NLSOptions& opt = {});

struct ParticleReport {
    ScalarField density;
    double l1;
    std::uint64_t samples;
};

struct ParticleOptions {
    std::uint64_t count = 100'000;
    double horizon = 50.0;
    double dt = 1e-3;
    std::uint64_t seed = 0;
};

/**
 * Euler-Maruyama for dX = -∇H(∇u(X)) dt + √2 dW on the torus with
 * multilinear drift interpolation. Positions are histogrammed on the grid
 * nodes at every step after T/2 and compared with target in L¹.
 */
ParticleReport simulate_particles(const ScalarField& u, const HamiltonianSpec& h, const ScalarField& target,
                                  const ParticleOptions& opt);

}  // namespace mfg
