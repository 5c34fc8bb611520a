#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "mfg/grid.hpp"
#include "mfg/model.hpp"

namespace mfg {

/**
 * Drift b = -∇H(∇u) of the controlled diffusion, held both at nodes and on
 * the faces between node k and its +axis neighbour.
 *
 * spacing is the lattice step used by the flux formula; it is the grid's h
 * except on rescaled lattices.
 */
class DriftField {
public:
    /// Faces by averaging adjacent nodal values.
    static DriftField from_nodal(const VectorField& b, std::optional<double> spacing = std::nullopt);
    /// b = -∇u with faces taken as exact potential differences -(u_{k+e} - u_k)/spacing.
    static DriftField from_potential(const ScalarField& u, std::optional<double> spacing = std::nullopt);
    /// γ = 2 uses from_potential, otherwise nodal -∇H(∇_h u) averaged to faces.
    static DriftField from_value_function(const ScalarField& u, const HamiltonianSpec& h);

    const TorusGrid& grid() const { return nodal_.grid(); }
    const VectorField& nodal() const { return nodal_; }
    double spacing() const { return spacing_; }
    double face(std::size_t k, int axis) const { return faces_[k * grid().dim() + axis]; }
    /// max |b_face| * spacing / 2.
    double mesh_peclet() const;

private:
    DriftField(VectorField nodal, std::vector<double> faces, double spacing);
    VectorField nodal_;
    std::vector<double> faces_;
    double spacing_;
};

struct InvariantMeasure {
    ScalarField m;
    double residual_inf;
    int iterations;
};

struct FPOptions {
    double tol = 1e-13;
    int max_iters = 100;
};

class FPConvergenceError : public std::runtime_error {
public:
    FPConvergenceError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual(last_residual)
    {
    }
    double last_residual;
};

/// z / (e^z - 1), with B(0) = 1.
double bernoulli(double z);

/// Flux-balance operator (A m)_k = Σ_d (J_{k+e_d/2} - J_{k-e_d/2}) / h with exponentially fitted face fluxes.
Eigen::SparseMatrix<double> assemble_fp_operator(const DriftField& b);

/**
 * Positive null vector of the flux operator, scaled to unit mass.
 *
 * Shifted inverse power iteration with (A + σI), σ = 1e-8 ‖A‖_∞, stopping
 * once successive normalized iterates agree to tol relative to their max.
 */
InvariantMeasure solve_invariant_measure(const DriftField& b, const FPOptions& opt = {},
                                         const std::optional<ScalarField>& initial = std::nullopt);

/// ‖A m‖_∞.
double fp_residual(const ScalarField& m, const DriftField& b);

}  // namespace mfg
