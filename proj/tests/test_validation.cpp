#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mfg/validation.hpp"

using namespace mfg;

namespace {

constexpr double pi = std::numbers::pi;

MFGSolution constant_solution(int dim, int n, double alpha, double c_f, double gamma = 2.0)
{
    TorusGrid g(dim, n);
    MFGSolution s{ScalarField(g), -c_f, ScalarField(g, 1.0)};
    s.hamiltonian = {gamma, default_c_h(gamma)};
    s.coupling = {alpha, c_f, CouplingSign::focusing};
    s.mollifier = Mollifier{std::max(2, n / 8)};
    s.converged = true;
    s.status = SolveStatus::converged;
    return s;
}

MFGProblem cosine_problem(int n, double amplitude, double c_f = 1.0, double alpha = 1.0)
{
    MFGProblem p{TorusGrid(1, n), HamiltonianSpec{2.0, 2.0}, CouplingSpec{alpha, c_f, CouplingSign::focusing},
                 PotentialProfile{amplitude}, Mollifier{n / 8}};
    p.tol = 1e-9;
    p.hjb.tol = 1e-11;
    return p;
}

}  // namespace

TEST(EnergyReport, ConstantSolution)
{
    const auto r = energy_report(constant_solution(2, 16, 0.5, 1.0), {1.2, 3.0});
    EXPECT_EQ(r.grad_energy, 0.0);
    EXPECT_EQ(r.drift_energy, 0.0);
    EXPECT_NEAR(r.mass_power, 1.0, 1e-15);
    for (const auto& [beta, norm] : r.lbeta_norms) EXPECT_NEAR(norm, 1.0, 1e-15) << beta;
    EXPECT_EQ(r.lbeta_norms.size(), 3u);
}

TEST(EnergyReport, QuadraticCaseAndDirectSums)
{
    const auto p = cosine_problem(64, 2.0);
    const auto s = solve_fixed_point(p);
    ASSERT_TRUE(s.converged);
    const auto r = energy_report(s);
    EXPECT_NEAR(r.grad_energy, r.drift_energy, 1e-14);
    const double h = p.grid.h();
    double ge = 0.0, mp = 0.0, l2 = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double du = (s.u[p.grid.index(i + 1)] - s.u[p.grid.index(i - 1)]) / (2 * h);
        ge += du * du * s.m[i] * h;
        mp += s.m[i] * s.m[i] * h;
    }
    l2 = std::sqrt(mp);
    EXPECT_NEAR(r.grad_energy, ge, 1e-13);
    EXPECT_NEAR(r.mass_power, mp, 1e-13);
    EXPECT_NEAR(r.lbeta_norms.at(2.0), l2, 1e-13);
    EXPECT_EQ(r.lambda, s.lambda);
}

TEST(EnergyAudit, BetaLimit)
{
    EXPECT_DOUBLE_EQ(beta_limit(3.0, 2), 4.0);
    EXPECT_DOUBLE_EQ(beta_limit(2.0, 3), 3.0);
    EXPECT_TRUE(std::isinf(beta_limit(2.0, 1)));
}

TEST(EnergyAudit, RejectsInadmissibleBeta)
{
    std::vector<MFGSolution> suite{constant_solution(2, 16, 0.5, 1.0, 3.0)};
    EXPECT_THROW(audit_energy_inequality(suite, 4.0), InvalidArgument);
    EXPECT_THROW(audit_energy_inequality(suite, 1.0), InvalidArgument);
    EXPECT_NO_THROW(audit_energy_inequality(suite, 3.99));
}

TEST(EnergyAudit, ConstantSuiteIsDegenerateWithUnitRatio)
{
    std::vector<MFGSolution> suite(3, constant_solution(1, 32, 1.0, 1.0));
    const auto a = audit_energy_inequality(suite, 2.0);
    EXPECT_TRUE(a.degenerate);
    EXPECT_NEAR(a.c_fit, 1.0, 1e-14);
    EXPECT_TRUE(a.pass);
}

TEST(EnergyAudit, FittedBoundHoldsOnEverySuiteMember)
{
    std::vector<MFGSolution> suite;
    for (double amp : {1.0, 8.0, 32.0, 128.0}) {
        const auto s = solve_fixed_point(cosine_problem(64, amp, 5.0));
        ASSERT_TRUE(s.converged);
        suite.push_back(s);
    }
    const auto a = audit_energy_inequality(suite, 2.0);
    ASSERT_TRUE(a.pass);
    EXPECT_GT(a.delta_fit, 1.0);
    for (const auto& s : suite) {
        const auto r = energy_report(s);
        EXPECT_LE(std::pow(r.lbeta_norms.at(2.0), a.delta_fit), a.c_fit * (r.grad_energy + 1.0) * (1 + 1e-12));
    }
}

TEST(Pohozaev, ConstantSolutionBalancesOnAnyBall)
{
    for (int dim : {1, 2}) {
        const auto s = constant_solution(dim, 64, 0.7, 1.3);
        for (double r : {0.1, 0.25, 0.45}) {
            for (std::array<double, 2> c : {std::array<double, 2>{0.5, 0.5}, std::array<double, 2>{0.13, 0.71}}) {
                const auto rep = pohozaev_residual(s, PotentialProfile{}, r, c);
                EXPECT_LE(rep.residual, 1e-10) << dim << " " << r;
                EXPECT_NE(rep.interior_lhs, 0.0);
            }
        }
    }
}

TEST(Pohozaev, RejectsInadmissibleRadius)
{
    const auto s = constant_solution(1, 64, 1.0, 1.0);
    EXPECT_THROW(pohozaev_residual(s, PotentialProfile{}, 0.5), InvalidArgument);
    EXPECT_THROW(pohozaev_residual(s, PotentialProfile{}, 1.5 / 64), InvalidArgument);
}

TEST(Pohozaev, SecondOrderIn1D)
{
    auto res = [](int n) {
        const auto p = cosine_problem(n, 1.0);
        const auto s = solve_fixed_point(p);
        EXPECT_TRUE(s.converged);
        return pohozaev_residual(s, p.potential, 0.25, {0.4, 0.5}).residual;
    };
    const double r1 = res(256), r2 = res(512);
    EXPECT_LT(r1, 1e-3);
    EXPECT_NEAR(r1 / r2, 4.0, 1.2);
}

TEST(HopfCole, Examples)
{
    const auto c = constant_solution(1, 32, 1.0, 1.0);
    const auto phi = hopf_cole_forward(c);
    for (std::size_t k = 0; k < phi.size(); ++k) EXPECT_NEAR(phi[k], 1.0, 1e-15);

    const auto p = cosine_problem(128, 1.0);
    const auto s = solve_fixed_point(p);
    const auto f = hopf_cole_forward(s);
    EXPECT_NEAR(integrate(product(f, f)), 1.0, 1e-12);
    EXPECT_LE(lp_norm(product(f, f) - s.m, INFINITY), 1e-12);
    auto e = s.u.map([](double u) { return std::exp(-u / 2); });
    e = e * (1.0 / std::sqrt(integrate(product(e, e))));
    EXPECT_LE(lp_norm(f - e, INFINITY), 1e-6);

    MFGSolution cubic = s;
    cubic.hamiltonian.gamma = 3.0;
    EXPECT_THROW(hopf_cole_forward(cubic), InvalidArgument);
}

TEST(NLSResidual, Examples)
{
    TorusGrid g(1, 32);
    const ScalarField one(g, 1.0), zero(g, 0.0);
    EXPECT_EQ(nls_residual(one, -1.0, {1.0, 1.0, CouplingSign::focusing}, zero), 0.0);
    EXPECT_EQ(nls_residual(one, 0.0, {1.0, 1.0, CouplingSign::focusing}, zero), 1.0);
    EXPECT_NEAR(nls_residual(one, -2.5, {0.5, 2.5, CouplingSign::focusing}, zero), 0.0, 1e-15);
}

TEST(NLSGroundState, ConstantAtSmallCoupling)
{
    TorusGrid g(1, 64);
    const CouplingSpec c{1.0, 0.5, CouplingSign::focusing};
    const ScalarField v(g, 0.0);
    const auto gs = solve_nls_ground_state(g, c, v, 1e-10);
    EXPECT_LE(lp_norm(gs.phi + (-1.0), INFINITY), 1e-8);
    EXPECT_NEAR(gs.lambda_nls, -0.5, 1e-8);
    EXPECT_TRUE(gs.zero_potential);
    EXPECT_LE(gs.lambda_nls, 1e-8);
    // perturbations of unit mass do not lower the energy
    for (double eps : {0.05, 0.2}) {
        for (int mode : {1, 2, 3}) {
            auto phi = ScalarField::sample(g, [&](double x, double) { return 1 + eps * std::cos(2 * pi * mode * x); });
            phi = phi * (1.0 / std::sqrt(integrate(product(phi, phi))));
            EXPECT_GE(nls_energy(phi, c, v), gs.energy - 1e-14);
        }
    }
}

TEST(NLSGroundState, CosinePotentialConvergesAndLambdaIdentityHolds)
{
    TorusGrid g(1, 256);
    const CouplingSpec c{1.0, 1.0, CouplingSign::focusing};
    const auto v = PotentialProfile{1.0}.sample(g);
    const double tol = 1e-9;
    const auto gs = solve_nls_ground_state(g, c, v, tol);
    EXPECT_LE(gs.residual, tol);
    EXPECT_NEAR(integrate(product(gs.phi, gs.phi)), 1.0, 1e-12);
    EXPECT_GT(gs.phi.min(), 0.0);
    const double h = g.h();
    double grad = 0.0, pot = 0.0, pw = 0.0;
    for (int i = 0; i < 256; ++i) {
        const double d = (gs.phi[g.index(i + 1)] - gs.phi[i]) / h;
        grad += d * d * h;
        pot += v[i] * gs.phi[i] * gs.phi[i] * h;
        pw += std::pow(gs.phi[i], 4) * h;
    }
    EXPECT_LE(std::abs(gs.lambda_nls - (2 * grad + pot - pw)), 10 * tol);
}

TEST(NLSGroundState, RejectsDefocusing)
{
    TorusGrid g(1, 32);
    EXPECT_THROW(solve_nls_ground_state(g, {1.0, 1.0, CouplingSign::defocusing}, ScalarField(g), 1e-8), InvalidArgument);
}

TEST(NLSGroundState, FocusingZeroPotentialLambdaNonpositive)
{
    TorusGrid g(1, 128);
    for (double cf : {0.5, 20.0, 60.0}) {
        const auto gs = solve_nls_ground_state(g, {1.0, cf, CouplingSign::focusing}, ScalarField(g), 1e-8);
        EXPECT_LE(gs.lambda_nls, 1e-8) << cf;
    }
}

TEST(WholeSpaceMass, ClosedFormIn1D)
{
    for (double alpha : {0.5, 1.0, 2.0}) {
        const double expect = std::pow(alpha + 1, 1 / alpha) * std::sqrt(2.0) / alpha * std::beta(1 / alpha, 0.5);
        EXPECT_NEAR(whole_space_ground_mass(alpha, 1), expect, 1e-6 * expect) << alpha;
    }
    EXPECT_NEAR(whole_space_ground_mass(1.0, 1), 4 * std::sqrt(2.0), 1e-6);
}

TEST(WholeSpaceMass, TwoDimensionalCubicProfile)
{
    // Townes profile of ΔR - R + R³ = 0 has mass 11.7009; ψ(z) = R(z/√2) doubles it
    EXPECT_NEAR(whole_space_ground_mass(1.0, 2), 2 * 11.700896, 1e-3);
}

TEST(MassScaling, UnitEigenvalueIsIdentity)
{
    TorusGrid g(1, 256);
    auto phi = ScalarField::sample(g, [](double x, double) { return 1.0 / std::cosh(20 * (x - 0.5)); });
    phi = phi * (1.0 / std::sqrt(integrate(product(phi, phi))));
    const GroundState gs{phi, -1.0, 0.0, 0.0, 0, 0.0, true};
    const auto r = mass_scaling_check(gs, {1.0, 1.0, CouplingSign::focusing}, 1.0);
    EXPECT_DOUBLE_EQ(r.lhs, 1.0);
    EXPECT_NEAR(r.psi_mass, 1.0, 1e-13);
    EXPECT_DOUBLE_EQ(r.period, 1.0);
    EXPECT_FALSE(r.degenerate);
}

TEST(MassScaling, MassCriticalBranchIsFlagged)
{
    TorusGrid g(1, 256);
    auto phi = ScalarField::sample(g, [](double x, double) { return 1.0 / std::cosh(20 * (x - 0.5)); });
    phi = phi * (1.0 / std::sqrt(integrate(product(phi, phi))));
    const GroundState gs{phi, -3.0, 0.0, 0.0, 0, 0.0, true};
    const auto r = mass_scaling_check(gs, {2.0, 1.0, CouplingSign::focusing}, 1.0);
    EXPECT_TRUE(r.degenerate);
    EXPECT_DOUBLE_EQ(r.lhs, 1.0);
}

TEST(MassScaling, Preconditions)
{
    TorusGrid g(1, 64);
    const ScalarField flat(g, 1.0);
    const GroundState spread{flat, -1.0, 0.0, 0.0, 0, 0.0, true};
    const CouplingSpec c{1.0, 1.0, CouplingSign::focusing};
    EXPECT_THROW(mass_scaling_check(spread, c, 1.0), InvalidArgument);
    GroundState positive = spread;
    positive.lambda_nls = 0.5;
    EXPECT_THROW(mass_scaling_check(positive, c, 1.0), InvalidArgument);
    GroundState with_v = spread;
    with_v.zero_potential = false;
    EXPECT_THROW(mass_scaling_check(with_v, c, 1.0), InvalidArgument);
    // c_f must equal L^(2 - Nα)
    EXPECT_THROW(mass_scaling_check(spread, c, 4.0), InvalidArgument);
}

TEST(CrossValidation, ConstantSetup)
{
    MFGProblem p{TorusGrid(1, 64), HamiltonianSpec{2.0, 2.0}, CouplingSpec{1.0, 0.5, CouplingSign::focusing},
                 PotentialProfile{}, Mollifier{8}};
    const auto s = solve_fixed_point(p);
    const auto cv = cross_validate_quadratic(s, p.potential, 1e-11);
    EXPECT_LE(cv.m_mismatch, 1e-10);
    EXPECT_LE(cv.lambda_mismatch, 1e-10);
}

TEST(Particles, ArgumentChecks)
{
    TorusGrid g(1, 32);
    const ScalarField u(g), m(g, 1.0);
    EXPECT_THROW(simulate_particles(u, {2.0, 2.0}, m, {1000, 1.0, 1e-3, 0}), InvalidArgument);
    EXPECT_THROW(simulate_particles(u, {2.0, 2.0}, m, {10000, 1.0, 0.1, 0}), InvalidArgument);
    EXPECT_THROW(simulate_particles(u, {2.0, 2.0}, ScalarField(TorusGrid(1, 16), 1.0), {10000, 1.0, 1e-3, 0}),
                 InvalidArgument);
}

TEST(Particles, DeterministicPerSeed)
{
    TorusGrid g(1, 16);
    const auto u = ScalarField::sample(g, [](double x, double) { return 0.5 * std::cos(2 * pi * x); });
    const ParticleOptions o{10000, 0.02, 1e-3, 7};
    const auto a = simulate_particles(u, {2.0, 2.0}, ScalarField(g, 1.0), o);
    const auto b = simulate_particles(u, {2.0, 2.0}, ScalarField(g, 1.0), o);
    EXPECT_EQ(a.l1, b.l1);
    EXPECT_EQ(a.samples, 10000u * 10u);
    EXPECT_NEAR(integrate(a.density), 1.0, 1e-12);
}

TEST(Particles, ZeroDriftNoiseScaling)
{
    TorusGrid g(1, 32);
    const ScalarField u(g), target(g, 1.0);
    auto median_l1 = [&](std::uint64_t count) {
        std::vector<double> l1;
        for (std::uint64_t seed = 0; seed < 5; ++seed) l1.push_back(simulate_particles(u, {2.0, 2.0}, target, {count, 0.004, 1e-3, seed}).l1);
        std::nth_element(l1.begin(), l1.begin() + 2, l1.end());
        return l1[2];
    };
    const double a = median_l1(20000), b = median_l1(40000);
    EXPECT_LE(a, 3 * std::sqrt(32.0 / 20000));
    EXPECT_NEAR(a / b, std::sqrt(2.0), 0.4 * std::sqrt(2.0));
}

TEST(Particles, GibbsDriftShortRun)
{
    TorusGrid g(1, 32);
    const auto u = ScalarField::sample(g, [](double x, double) { return 0.5 * std::cos(2 * pi * x); });
    auto w = u.map([](double x) { return std::exp(-x); });
    w = w * (1.0 / integrate(w));
    const auto r = simulate_particles(u, {2.0, 2.0}, w, {20000, 2.0, 1e-3, 1});
    EXPECT_LE(r.l1, 0.05);
}
