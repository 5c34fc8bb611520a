#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mfg {

TorusGrid::TorusGrid(int dim, int n) : dim_(dim), n_(n), h_(0.0), size_(0)
{
    if (dim != 1 && dim != 2) throw InvalidArgument("TorusGrid: dim must be 1 or 2, got " + std::to_string(dim));
    if (n < 8) throw InvalidArgument("TorusGrid: n must be >= 8, got " + std::to_string(n));
    h_ = 1.0 / n;
    if (h_ * n != 1.0)
        throw InvalidArgument("TorusGrid: n = " + std::to_string(n) + " does not give h*n == 1 in double precision");
    size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

ScalarField::ScalarField(const TorusGrid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.size())
        throw InvalidArgument("ScalarField: expected " + std::to_string(grid_.size()) + " values, got " +
                              std::to_string(values_.size()));
    if (!all_finite()) throw InvalidArgument("ScalarField: non-finite value");
}

ScalarField ScalarField::sample(const TorusGrid& grid, const std::function<double(double, double)>& f)
{
    ScalarField out(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto ij = grid.multi_index(k);
        out[k] = f(grid.coord(ij[0]), grid.dim() == 2 ? grid.coord(ij[1]) : 0.0);
    }
    return out;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

std::size_t ScalarField::argmax() const
{
    return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());
}

bool ScalarField::all_finite() const
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o)
{
    if (!(grid_ == o.grid_)) throw InvalidArgument("ScalarField: grid mismatch");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o)
{
    if (!(grid_ == o.grid_)) throw InvalidArgument("ScalarField: grid mismatch");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s)
{
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField& ScalarField::operator+=(double s)
{
    for (double& v : values_) v += s;
    return *this;
}

ScalarField ScalarField::map(const std::function<double(double)>& g) const
{
    ScalarField out(grid_);
    for (std::size_t k = 0; k < values_.size(); ++k) out[k] = g(values_[k]);
    return out;
}

VectorField::VectorField(const TorusGrid& grid) : grid_(grid), values_(grid.size() * grid.dim(), 0.0) {}

VectorField::VectorField(const TorusGrid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.size() * grid_.dim())
        throw InvalidArgument("VectorField: expected dim * nodes components");
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
        throw InvalidArgument("VectorField: non-finite value");
}

double VectorField::max_norm() const
{
    double best = 0.0;
    for (std::size_t k = 0; k < nodes(); ++k) {
        double s = 0.0;
        for (double c : node(k)) s += c * c;
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

std::vector<KernelTap> kernel_weights(const Mollifier& psi, const TorusGrid& grid)
{
    if (psi.k < 2) throw InvalidArgument("mollifier: support radius 1/k must be <= 1/2 (k >= 2), got k = " + std::to_string(psi.k));
    const double h = grid.h();
    const double k = psi.k;
    const int reach = static_cast<int>(std::ceil(1.0 / (k * h)));
    std::vector<KernelTap> taps;
    const int jreach = grid.dim() == 2 ? reach : 0;
    for (int dj = -jreach; dj <= jreach; ++dj) {
        for (int di = -reach; di <= reach; ++di) {
            const double kr2 = k * k * h * h * (di * di + dj * dj);
            if (kr2 >= 1.0) continue;
            const double w = std::pow(1.0 - kr2, 3);
            taps.push_back({di, dj, w});
        }
    }
    const auto across = std::count_if(taps.begin(), taps.end(), [](const KernelTap& t) { return t.dj == 0; });
    if (across < 3)
        throw InvalidArgument("mollifier: k = " + std::to_string(psi.k) + " leaves fewer than 3 nodes across the support on n = " +
                              std::to_string(grid.n()));
    double total = 0.0;
    for (const auto& t : taps) total += t.weight;
    for (auto& t : taps) t.weight /= total;
    return taps;
}

ScalarField shift(const ScalarField& f, int si, int sj)
{
    const TorusGrid& g = f.grid();
    ScalarField out(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto ij = g.multi_index(k);
        out[k] = f[g.index(ij[0] + si, ij[1] + sj)];
    }
    return out;
}

VectorField gradient(const ScalarField& f)
{
    const TorusGrid& g = f.grid();
    VectorField out(g);
    const double inv = 0.5 / g.h();
    for (std::size_t k = 0; k < g.size(); ++k)
        for (int d = 0; d < g.dim(); ++d) out.at(k, d) = (f[g.neighbor(k, d, 1)] - f[g.neighbor(k, d, -1)]) * inv;
    return out;
}

ScalarField laplacian(const ScalarField& f)
{
    const TorusGrid& g = f.grid();
    ScalarField out(g);
    const double inv = 1.0 / (g.h() * g.h());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double s = 0.0;
        for (int d = 0; d < g.dim(); ++d) s += f[g.neighbor(k, d, 1)] - 2.0 * f[k] + f[g.neighbor(k, d, -1)];
        out[k] = s * inv;
    }
    return out;
}

ScalarField divergence(const VectorField& v)
{
    const TorusGrid& g = v.grid();
    ScalarField out(g);
    const double inv = 0.5 / g.h();
    for (std::size_t k = 0; k < g.size(); ++k) {
        double s = 0.0;
        for (int d = 0; d < g.dim(); ++d) s += v.at(g.neighbor(k, d, 1), d) - v.at(g.neighbor(k, d, -1), d);
        out[k] = s * inv;
    }
    return out;
}

double integrate(const ScalarField& f)
{
    const auto vals = f.values();
    const double sum = std::accumulate(vals.begin(), vals.end(), 0.0);
    return sum * std::pow(f.grid().h(), f.grid().dim());
}

double mean(const ScalarField& f) { return integrate(f); }

double lp_norm(const ScalarField& f, double p)
{
    if (std::isinf(p) && p > 0) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1 or infinity, got " + std::to_string(p));
    return std::pow(integrate(f.map([p](double v) { return std::pow(std::abs(v), p); })), 1.0 / p);
}

ScalarField mollify(const ScalarField& f, const Mollifier& psi)
{
    const TorusGrid& g = f.grid();
    const auto taps = kernel_weights(psi, g);
    ScalarField out(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto ij = g.multi_index(k);
        double s = 0.0;
        for (const auto& t : taps) s += t.weight * f[g.index(ij[0] - t.di, ij[1] - t.dj)];
        out[k] = s;
    }
    return out;
}

ScalarField product(const ScalarField& a, const ScalarField& b)
{
    if (!(a.grid() == b.grid())) throw InvalidArgument("product: grid mismatch");
    ScalarField out(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
    return out;
}

ScalarField dot(const VectorField& a, const VectorField& b)
{
    if (!(a.grid() == b.grid())) throw InvalidArgument("dot: grid mismatch");
    ScalarField out(a.grid());
    for (std::size_t k = 0; k < a.nodes(); ++k) {
        double s = 0.0;
        for (int d = 0; d < a.dim(); ++d) s += a.at(k, d) * b.at(k, d);
        out[k] = s;
    }
    return out;
}

double interpolate(const ScalarField& f, double x, double y)
{
    const TorusGrid& g = f.grid();
    const double sx = x * g.n();
    const double fx = std::floor(sx);
    const double wx = sx - fx;
    const int i = static_cast<int>(fx);
    if (g.dim() == 1) return (1.0 - wx) * f[g.index(i)] + wx * f[g.index(i + 1)];
    const double sy = y * g.n();
    const double fy = std::floor(sy);
    const double wy = sy - fy;
    const int j = static_cast<int>(fy);
    return (1.0 - wx) * (1.0 - wy) * f[g.index(i, j)] + wx * (1.0 - wy) * f[g.index(i + 1, j)] +
           (1.0 - wx) * wy * f[g.index(i, j + 1)] + wx * wy * f[g.index(i + 1, j + 1)];
}

Eigen::SparseMatrix<double> laplacian_matrix(const TorusGrid& grid)
{
    const double inv = 1.0 / (grid.h() * grid.h());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(grid.size() * (1 + 2 * grid.dim()));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        trip.emplace_back(k, k, -2.0 * grid.dim() * inv);
        for (int d = 0; d < grid.dim(); ++d) {
            trip.emplace_back(k, grid.neighbor(k, d, 1), inv);
            trip.emplace_back(k, grid.neighbor(k, d, -1), inv);
        }
    }
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    return L;
}

}  // namespace mfg
