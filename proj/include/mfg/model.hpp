#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Power-law Hamiltonian H(p) = |p|^gamma / gamma.
struct HamiltonianSpec {
    double gamma = 2.0;
    /// Structure constant of the growth bounds; only consulted by audit_assumptions.
    double c_h = 2.0;

    void validate() const;
};

enum class CouplingSign { focusing, defocusing };

/// Local coupling f(m) = c_f m^alpha, entering as -f (focusing) or +f (defocusing).
struct CouplingSpec {
    double alpha = 1.0;
    double c_f = 1.0;
    CouplingSign sign = CouplingSign::focusing;

    void validate() const;
};

/// Nonnegative bounded potential sampled on the grid.
struct PotentialSpec {
    ScalarField v;
    double c_v;
};

struct CriticalExponents {
    double alpha1;      ///< mass-critical gamma'/N
    double alpha2;      ///< energy-critical gamma'/(N - gamma'), +inf when gamma' >= N
    double gamma_conj;  ///< gamma' = gamma/(gamma - 1)
};

double h_eval(const HamiltonianSpec& spec, std::span<const double> p);
/// |p|^(gamma-2) p, extended by 0 at p = 0.
std::vector<double> h_grad(const HamiltonianSpec& spec, std::span<const double> p);

double conjugate_exponent(double gamma);
CriticalExponents critical_exponents(double gamma, int dim_n);

double f_eval(const CouplingSpec& c, double m);
double F_eval(const CouplingSpec& c, double m);

/// Smallest C_H for which the power law satisfies all three growth bounds.
double default_c_h(double gamma);

/// One inequality of the standing assumptions checked over a sample set.
struct AssumptionCheck {
    std::string name;
    bool pass;
    /// min over samples of (rhs - lhs); negative means the inequality failed somewhere.
    double worst_margin;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool all_pass() const;
    const AssumptionCheck& find(const std::string& name) const;
};

struct AssumptionSamples {
    std::vector<std::vector<double>> p;  ///< momenta, each of length dim
    std::vector<double> m;               ///< densities >= 0
};

/**
 * Checks on the samples:
 *   H lower/upper growth, |grad H| growth, grad H . p - H coercivity,
 *   0 <= f(m) <= C_f (m^alpha + 1), 0 <= V <= C_V at every node.
 */
AssumptionReport audit_assumptions(const HamiltonianSpec& h, const CouplingSpec& c, const PotentialSpec& v,
                                   const AssumptionSamples& samples);

/// (N - gamma') f(m) m - N F(m); positive for every m > 0 is the supercriticality condition.
double pohozaev_defect(const CouplingSpec& c, double gamma, int dim_n, double m);

/// Closed form for the power law: gamma' < N and alpha > gamma'/(N - gamma').
bool pohozaev_supercriticality(const CouplingSpec& c, double gamma, int dim_n, std::span<const double> m_samples = {});

}  // namespace mfg
