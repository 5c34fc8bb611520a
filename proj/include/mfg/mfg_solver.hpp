#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfg/fokker_planck.hpp"
#include "mfg/grid.hpp"
#include "mfg/hjb.hpp"
#include "mfg/model.hpp"

namespace mfg {

/**
 * V(x) = (amplitude/2) Σ_d (1 - cos 2π freq x_d), or a tabulated field that
 * is interpolated onto other grids. amplitude 0 without a table is V ≡ 0.
 */
struct PotentialProfile {
    double amplitude = 0.0;
    int freq = 1;
    std::optional<ScalarField> table;

    ScalarField sample(const TorusGrid& grid) const;
    /// Upper bound C_V of the sampled field.
    double bound(int dim) const;
};

/// Starting density, rebuilt on whatever grid the solve runs on.
struct InitialDensity {
    enum class Kind { uniform, cosine, bump };
    Kind kind = Kind::uniform;
    /// cosine: 1 + eps Π_d cos 2π x_d.
    double eps = 0.0;
    /// bump: 1 + (peak - 1) exp(-|x - c|²/width²), c the torus centre, then renormalized.
    double peak = 1.5;
    double width = 0.1;

    ScalarField build(const TorusGrid& grid) const;
    /// "uniform", "cosine:EPS" or "bump:PEAK,WIDTH".
    static InitialDensity parse(const std::string& text);
    std::string describe() const;
};

struct MFGProblem {
    TorusGrid grid;
    HamiltonianSpec hamiltonian;
    CouplingSpec coupling;
    PotentialProfile potential;
    Mollifier mollifier;
    double theta = 0.5;
    double tol = 1e-8;
    int max_outer_iters = 200;
    HJBOptions hjb;
    FPOptions fp;
    InitialDensity initial;

    /// Range checks on every parameter; throws InvalidArgument.
    void validate() const;
};

enum class SolveStatus { converged, max_iterations, diverged, inner_failure };
std::string to_string(SolveStatus s);

struct MFGSolution {
    ScalarField u;
    double lambda = 0.0;
    ScalarField m;
    int outer_iters = 0;
    double hjb_res = 0.0;
    double fp_res = 0.0;
    double coupling_res = 0.0;
    bool converged = false;
    SolveStatus status = SolveStatus::max_iterations;
    std::string message;
    std::vector<std::string> warnings;
    /// ‖m_new - m‖_L¹ per outer iteration.
    std::vector<double> history;
    double initial_max_m = 1.0;
    HamiltonianSpec hamiltonian;
    CouplingSpec coupling;
    Mollifier mollifier{8};
};

/// R = V - f(m ⋆ ψ) (focusing) or V + f(m ⋆ ψ) ⋆ ψ (defocusing).
ScalarField coupling_rhs(const ScalarField& v, const ScalarField& m, const CouplingSpec& c, const Mollifier& psi);

/**
 * Damped fixed point: HJB on R(m), invariant measure of its drift, then
 * m <- (1-θ) m + θ m_new. θ halves when the L¹ update grows three times in
 * a row. Outer failure is reported in the status, never thrown.
 */
MFGSolution solve_fixed_point(const MFGProblem& p, const std::optional<ScalarField>& m0 = std::nullopt);

struct RescaledSolution {
    ScalarField v;
    ScalarField mu;
    double Lambda;
    double a;
    double M;
    std::size_t x0;
    /// Lattice step of the rescaled coordinates, h / a.
    double spacing;
    /// H_k, F_k and W_k of the zoomed system; H_k and F_k stay power laws.
    HamiltonianSpec h_k;
    CouplingSpec f_k;
    ScalarField w_k;
    Mollifier mollifier;
};

/// Zoom around the density peak with a = M^{-α/γ'}; fields are rolled so index 0 sits at x0.
RescaledSolution rescale_blowup(const MFGSolution& s, const PotentialProfile& potential);

struct RescalingResidual {
    double hjb;
    double fp;
};

/// Residuals of the zoomed system evaluated with difference operators of step h/a.
RescalingResidual rescaling_residual(const RescaledSolution& r);

/// (1/γ')∫|A|^{γ'} m - (C_f/β)∫m^β with A = -∇H(∇_h u), β = α + 1.
double energy_functional(const ScalarField& m, const ScalarField& u, const CouplingSpec& c, const HamiltonianSpec& h);

struct SweepRow {
    double alpha;
    bool converged;
    SolveStatus status;
    double lambda;
    double max_m;
    double energy;
    double mass_power;
    int outer_iters;
    /// Present when the sweep refines.
    std::optional<double> max_m_refined;
    std::optional<SolveStatus> status_refined;
    bool concentrating;
    bool unknown_regime;
    std::string message;
};

struct SweepReport {
    int dim;
    int n;
    bool refine;
    double alpha1;
    double alpha2;
    std::vector<SweepRow> rows;
};

/**
 * One fixed-point solve per α (and one at n doubled, k doubled when refine).
 * A row is CONCENTRATING when max m grows by >= 1.5 under refinement, or a
 * solve stopped without converging with max m above 10x its initial value.
 */
SweepReport sweep_alpha(const MFGProblem& tmpl, const std::vector<double>& alphas, bool refine);

}  // namespace mfg
