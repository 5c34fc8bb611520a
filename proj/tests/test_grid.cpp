#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "mfg/grid.hpp"

using namespace mfg;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField random_field(const TorusGrid& g, unsigned seed, double lo = -1.0, double hi = 1.0)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    ScalarField f(g);
    for (std::size_t k = 0; k < g.size(); ++k) f[k] = u(rng);
    return f;
}

// Dense periodic shift along one axis: (S f)_k = f_{k + e_axis}.
Eigen::MatrixXd dense_shift(const TorusGrid& g, int axis, int s)
{
    const int n = g.n();
    const int size = static_cast<int>(g.size());
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(size, size);
    for (int k = 0; k < size; ++k) {
        int i = k % n, j = k / n;
        if (g.dim() == 1) j = 0;
        if (axis == 0) i = ((i + s) % n + n) % n;
        else j = ((j + s) % n + n) % n;
        S(k, g.dim() == 1 ? i : i + n * j) = 1.0;
    }
    return S;
}

Eigen::VectorXd as_vec(const ScalarField& f)
{
    Eigen::VectorXd v(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) v[k] = f[k];
    return v;
}

}  // namespace

TEST(TorusGrid, RejectsBadShapes)
{
    EXPECT_THROW(TorusGrid(3, 16), InvalidArgument);
    EXPECT_THROW(TorusGrid(1, 4), InvalidArgument);
    EXPECT_NO_THROW(TorusGrid(2, 8));
}

TEST(TorusGrid, IndexWrapsAndInverts)
{
    TorusGrid g(2, 8);
    EXPECT_EQ(g.index(-1, 0), g.index(7, 0));
    EXPECT_EQ(g.index(3, 9), g.index(3, 1));
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto ij = g.multi_index(k);
        EXPECT_EQ(g.index(ij[0], ij[1]), k);
    }
    EXPECT_EQ(g.neighbor(g.index(7, 7), 0, 1), g.index(0, 7));
    EXPECT_EQ(g.neighbor(g.index(7, 0), 1, -1), g.index(7, 7));
}

TEST(Gradient, ConstantGivesZero)
{
    TorusGrid g(2, 16);
    const VectorField d = gradient(ScalarField(g, 3.7));
    EXPECT_EQ(d.max_norm(), 0.0);
}

TEST(Gradient, CosineDiscreteSymbol)
{
    TorusGrid g(1, 64);
    const double h = g.h();
    const auto f = ScalarField::sample(g, [](double x, double) { return std::cos(2 * pi * x); });
    const VectorField d = gradient(f);
    for (int j = 0; j < 64; ++j)
        EXPECT_NEAR(d.at(j, 0), -std::sin(2 * pi * j * h) * std::sin(2 * pi * h) / h, 1e-12);
}

TEST(Gradient, MatchesDenseOracle)
{
    for (int dim : {1, 2}) {
        TorusGrid g(dim, 16);
        const auto f = random_field(g, 7 + dim);
        const VectorField d = gradient(f);
        for (int axis = 0; axis < dim; ++axis) {
            const Eigen::MatrixXd D = (dense_shift(g, axis, 1) - dense_shift(g, axis, -1)) / (2 * g.h());
            const Eigen::VectorXd ref = D * as_vec(f);
            for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(d.at(k, axis), ref[k], 1e-12);
        }
    }
}

TEST(Laplacian, ConstantGivesZero)
{
    TorusGrid g(2, 16);
    EXPECT_EQ(lp_norm(laplacian(ScalarField(g, -2.0)), INFINITY), 0.0);
}

TEST(Laplacian, CosineEigenfunction)
{
    TorusGrid g(1, 64);
    const double h = g.h();
    const auto f = ScalarField::sample(g, [](double x, double) { return std::cos(2 * pi * x); });
    const auto l = laplacian(f);
    const double eig = -(2 / (h * h)) * (1 - std::cos(2 * pi * h));
    for (int j = 0; j < 64; ++j) EXPECT_NEAR(l[j], eig * f[j], 1e-9);
}

TEST(Laplacian, MatchesDenseOracleAndSparseMatrix)
{
    for (int dim : {1, 2}) {
        TorusGrid g(dim, 16);
        const auto f = random_field(g, 11 + dim);
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero(g.size(), g.size());
        for (int axis = 0; axis < dim; ++axis)
            L += (dense_shift(g, axis, 1) + dense_shift(g, axis, -1) - 2 * Eigen::MatrixXd::Identity(g.size(), g.size())) /
                 (g.h() * g.h());
        const Eigen::VectorXd ref = L * as_vec(f);
        const Eigen::VectorXd sparse = laplacian_matrix(g) * as_vec(f);
        const auto l = laplacian(f);
        for (std::size_t k = 0; k < g.size(); ++k) {
            EXPECT_NEAR(l[k], ref[k], 1e-9);
            EXPECT_NEAR(sparse[k], ref[k], 1e-9);
        }
    }
}

TEST(Divergence, ConstantVectorGivesZero)
{
    TorusGrid g(2, 16);
    VectorField v(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        v.at(k, 0) = 1.5;
        v.at(k, 1) = -0.5;
    }
    EXPECT_EQ(lp_norm(divergence(v), INFINITY), 0.0);
}

TEST(Divergence, OfGradientIsWideLaplacian)
{
    TorusGrid g(1, 32);
    const auto f = random_field(g, 3);
    const auto dd = divergence(gradient(f));
    for (int j = 0; j < 32; ++j)
        EXPECT_NEAR(dd[j], (f[g.index(j + 2)] - 2 * f[j] + f[g.index(j - 2)]) / (4 * g.h() * g.h()), 1e-9);
}

TEST(Divergence, AdjointOfGradient)
{
    for (int dim : {1, 2}) {
        TorusGrid g(dim, 16);
        const auto f = random_field(g, 21);
        VectorField v(g);
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-1, 1);
        for (std::size_t k = 0; k < g.size(); ++k)
            for (int d = 0; d < dim; ++d) v.at(k, d) = u(rng);
        const double lhs = integrate(dot(v, gradient(f)));
        const double rhs = -integrate(product(f, divergence(v)));
        EXPECT_NEAR(lhs, rhs, 1e-12);
    }
}

TEST(Integrate, Examples)
{
    TorusGrid g(2, 32);
    EXPECT_DOUBLE_EQ(integrate(ScalarField(g, 1.0)), 1.0);
    const auto c = ScalarField::sample(g, [](double x, double y) { return std::cos(2 * pi * x) + std::sin(2 * pi * y); });
    EXPECT_NEAR(integrate(c), 0.0, 1e-14);
    const auto f = random_field(g, 9);
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += f[k];
    EXPECT_NEAR(integrate(f), s / (32.0 * 32.0), 1e-15);
}

TEST(LpNorm, Examples)
{
    TorusGrid g(1, 64);
    EXPECT_DOUBLE_EQ(lp_norm(ScalarField(g, 1.0), 1.0), 1.0);
    EXPECT_DOUBLE_EQ(lp_norm(ScalarField(g, 1.0), 3.5), 1.0);
    ScalarField half(g);
    for (int j = 0; j < 32; ++j) half[j] = 2.0;
    EXPECT_DOUBLE_EQ(lp_norm(half, 1.0), 1.0);
    const auto f = random_field(g, 4);
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += std::pow(std::abs(f[k]), 3) / 64.0;
    EXPECT_NEAR(lp_norm(f, 3.0), std::cbrt(s), 1e-14);
    EXPECT_THROW(lp_norm(f, 0.5), InvalidArgument);
}

TEST(Shift, InverseAndWrap)
{
    TorusGrid g(2, 8);
    const auto f = random_field(g, 2);
    const auto s = shift(f, 3, -2);
    EXPECT_EQ(s[g.index(0, 0)], f[g.index(3, -2)]);
    const auto back = shift(s, -3, 2);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(back[k], f[k]);
}

TEST(Operators, CommuteWithLatticeShifts)
{
    TorusGrid g(2, 16);
    const auto f = random_field(g, 31);
    const auto a = laplacian(shift(f, 5, 3));
    const auto b = shift(laplacian(f), 5, 3);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-10);
}

TEST(Mollifier, KernelIsNonnegativeUnitMassAndSymmetric)
{
    TorusGrid g(2, 64);
    const auto taps = kernel_weights(Mollifier{8}, g);
    double total = 0.0;
    for (const auto& t : taps) {
        EXPECT_GE(t.weight, 0.0);
        EXPECT_LT(std::hypot(t.di, t.dj) * g.h(), 1.0 / 8);
        total += t.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Mollifier, Examples)
{
    TorusGrid g(1, 128);
    const Mollifier psi{16};
    const auto c = mollify(ScalarField(g, 2.5), psi);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(c[k], 2.5, 1e-14);

    ScalarField dirac(g);
    dirac[40] = 1.0;
    const auto spread = mollify(dirac, psi);
    ScalarField expect(g);
    for (const auto& t : kernel_weights(psi, g)) expect[g.index(40 + t.di)] += t.weight;
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_DOUBLE_EQ(spread[k], expect[k]);

    const auto f = random_field(g, 8, 0.0, 3.0);
    EXPECT_NEAR(integrate(mollify(f, psi)), integrate(f), 1e-13);
}

TEST(Mollifier, RejectsInadmissibleSupport)
{
    TorusGrid g(1, 32);
    EXPECT_THROW(kernel_weights(Mollifier{1}, g), InvalidArgument);
    // support radius below one lattice step
    EXPECT_THROW(kernel_weights(Mollifier{64}, g), InvalidArgument);
}

TEST(Interpolate, ReproducesNodesAndLinearPieces)
{
    TorusGrid g(2, 16);
    const auto f = random_field(g, 17);
    EXPECT_DOUBLE_EQ(interpolate(f, 3 * g.h(), 5 * g.h()), f[g.index(3, 5)]);
    const double mid = interpolate(f, 3.5 * g.h(), 5 * g.h());
    EXPECT_NEAR(mid, 0.5 * (f[g.index(3, 5)] + f[g.index(4, 5)]), 1e-15);
    // periodic wrap between the last and first node
    TorusGrid l(1, 16);
    const auto f1 = random_field(l, 18);
    EXPECT_NEAR(interpolate(f1, 1.0 - 0.25 * l.h()), 0.75 * f1[0] + 0.25 * f1[15], 1e-15);
}
