#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

namespace mfg {

/// Raised for arguments that violate an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Periodic uniform lattice on the unit torus [0,1)^dim, dim in {1,2}.
 *
 * Node (i, j) sits at (i*h, j*h) with flat index i + n*j. Indices passed to
 * index() are wrapped, so neighbour lookups never need bounds checks.
 */
class TorusGrid {
public:
    TorusGrid(int dim, int n);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double h() const { return h_; }
    std::size_t size() const { return size_; }

    double coord(int i) const { return i * h_; }

    int wrap(int i) const
    {
        const int r = i % n_;
        return r < 0 ? r + n_ : r;
    }

    std::size_t index(int i, int j = 0) const
    {
        return dim_ == 1 ? static_cast<std::size_t>(wrap(i))
                         : static_cast<std::size_t>(wrap(i)) + static_cast<std::size_t>(n_) * wrap(j);
    }

    /// Inverse of index(): {i, j}, with j = 0 in 1D.
    std::array<int, 2> multi_index(std::size_t k) const
    {
        if (dim_ == 1) return {static_cast<int>(k), 0};
        return {static_cast<int>(k % n_), static_cast<int>(k / n_)};
    }

    /// Flat index of the node displaced by `shift` lattice steps along `axis`.
    std::size_t neighbor(std::size_t k, int axis, int shift) const
    {
        auto ij = multi_index(k);
        ij[axis] += shift;
        return index(ij[0], ij[1]);
    }

    friend bool operator==(const TorusGrid& a, const TorusGrid& b)
    {
        return a.dim_ == b.dim_ && a.n_ == b.n_;
    }

private:
    int dim_;
    int n_;
    double h_;
    std::size_t size_;
};

/// Node values of a real function on a TorusGrid.
class ScalarField {
public:
    explicit ScalarField(const TorusGrid& grid, double value = 0.0);
    ScalarField(const TorusGrid& grid, std::vector<double> values);

    /// Samples f(x, y) at every node (y = 0 in 1D).
    static ScalarField sample(const TorusGrid& grid, const std::function<double(double, double)>& f);

    const TorusGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double min() const;
    double max() const;
    std::size_t argmax() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
    ScalarField& operator+=(double s);

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
    friend ScalarField operator+(ScalarField a, double s) { return a += s; }

    /// Applies g to every node value.
    ScalarField map(const std::function<double(double)>& g) const;

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

/// A dim-vector per node, stored node-major: component d of node k at k*dim + d.
class VectorField {
public:
    explicit VectorField(const TorusGrid& grid);
    VectorField(const TorusGrid& grid, std::vector<double> values);

    const TorusGrid& grid() const { return grid_; }
    int dim() const { return grid_.dim(); }
    std::size_t nodes() const { return grid_.size(); }

    double& at(std::size_t k, int d) { return values_[k * grid_.dim() + d]; }
    double at(std::size_t k, int d) const { return values_[k * grid_.dim() + d]; }

    std::span<double> node(std::size_t k) { return {values_.data() + k * grid_.dim(), static_cast<std::size_t>(grid_.dim())}; }
    std::span<const double> node(std::size_t k) const
    {
        return {values_.data() + k * grid_.dim(), static_cast<std::size_t>(grid_.dim())};
    }

    std::span<const double> values() const { return values_; }

    /// Largest Euclidean norm over nodes.
    double max_norm() const;

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

/**
 * Radial mollifier psi_k(x) = k^N psi(k x) with the polynomial bump
 * psi(r) ∝ (1 - r^2)^3 on r < 1, support radius 1/k.
 */
struct Mollifier {
    int k;
    double radius() const { return 1.0 / k; }
};

/// One entry of a discretized convolution kernel: lattice offset and weight.
struct KernelTap {
    int di;
    int dj;
    double weight;
};

/// Grid weights of psi_k; nonnegative, summing to one.
std::vector<KernelTap> kernel_weights(const Mollifier& psi, const TorusGrid& grid);

ScalarField shift(const ScalarField& f, int si, int sj = 0);  ///< g(x) = f(x + s h)

VectorField gradient(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(const VectorField& v);

double integrate(const ScalarField& f);
double mean(const ScalarField& f);
double lp_norm(const ScalarField& f, double p);

ScalarField mollify(const ScalarField& f, const Mollifier& psi);

/// Pointwise product and Euclidean dot product of two vector fields.
ScalarField product(const ScalarField& a, const ScalarField& b);
ScalarField dot(const VectorField& a, const VectorField& b);

/// Periodic multilinear interpolation at a point of the torus (y ignored in 1D).
double interpolate(const ScalarField& f, double x, double y = 0.0);

/// Sparse matrix of the periodic 3-point / 5-point Laplacian.
Eigen::SparseMatrix<double> laplacian_matrix(const TorusGrid& grid);

}  // namespace mfg
