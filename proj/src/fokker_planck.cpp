#include "mfg/fokker_planck.hpp"
#include "mfg/field_io.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseLU>

namespace mfg {

DriftField::DriftField(VectorField nodal, std::vector<double> faces, double spacing)
    : nodal_(std::move(nodal)), faces_(std::move(faces)), spacing_(spacing)
{
    if (!(spacing_ > 0.0)) throw InvalidArgument("DriftField: spacing must be > 0");
    if (!std::all_of(faces_.begin(), faces_.end(), [](double v) { return std::isfinite(v); }))
        throw InvalidArgument("DriftField: non-finite face drift");
}

DriftField DriftField::from_nodal(const VectorField& b, std::optional<double> spacing)
{
    const TorusGrid& g = b.grid();
    std::vector<double> faces(g.size() * g.dim());
    for (std::size_t k = 0; k < g.size(); ++k)
        for (int d = 0; d < g.dim(); ++d) faces[k * g.dim() + d] = 0.5 * (b.at(k, d) + b.at(g.neighbor(k, d, 1), d));
    return DriftField(b, std::move(faces), spacing.value_or(g.h()));
}

DriftField DriftField::from_potential(const ScalarField& u, std::optional<double> spacing)
{
    const TorusGrid& g = u.grid();
    const double s = spacing.value_or(g.h());
    VectorField nodal = gradient(u);
    const double ratio = g.h() / s;
    std::vector<double> flat(nodal.values().begin(), nodal.values().end());
    for (double& c : flat) c *= -ratio;
    std::vector<double> faces(g.size() * g.dim());
    for (std::size_t k = 0; k < g.size(); ++k)
        for (int d = 0; d < g.dim(); ++d) faces[k * g.dim() + d] = -(u[g.neighbor(k, d, 1)] - u[k]) / s;
    return DriftField(VectorField(g, std::move(flat)), std::move(faces), s);
}

DriftField DriftField::from_value_function(const ScalarField& u, const HamiltonianSpec& h)
{
    if (h.gamma == 2.0) return from_potential(u);
    const TorusGrid& g = u.grid();
    const VectorField gu = gradient(u);
    std::vector<double> flat(g.size() * g.dim());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto dh = h_grad(h, gu.node(k));
        for (int d = 0; d < g.dim(); ++d) flat[k * g.dim() + d] = -dh[d];
    }
    return from_nodal(VectorField(g, std::move(flat)));
}

double DriftField::mesh_peclet() const
{
    double m = 0.0;
    for (double f : faces_) m = std::max(m, std::abs(f));
    return 0.5 * m * spacing_;
}

double bernoulli(double z)
{
    if (z == 0.0) return 1.0;
    return z / std::expm1(z);
}

Eigen::SparseMatrix<double> assemble_fp_operator(const DriftField& b)
{
    const TorusGrid& g = b.grid();
    const double s = b.spacing();
    const double inv = 1.0 / (s * s);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.size() * (1 + 4 * g.dim()));
    // Face between k and kp carries J = (B(-s b) m_k - B(s b) m_kp) / s;
    // it leaves k (+J / s) and enters kp (-J / s).
    for (std::size_t k = 0; k < g.size(); ++k) {
        for (int d = 0; d < g.dim(); ++d) {
            const std::size_t kp = g.neighbor(k, d, 1);
            const double z = s * b.face(k, d);
            const double bm = bernoulli(-z) * inv;
            const double bp = bernoulli(z) * inv;
            trip.emplace_back(k, k, bm);
            trip.emplace_back(k, kp, -bp);
            trip.emplace_back(kp, k, -bm);
            trip.emplace_back(kp, kp, bp);
        }
    }
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

namespace {

double inf_norm(const Eigen::SparseMatrix<double>& A)
{
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
    for (Eigen::Index c = 0; c < A.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it) rows[it.row()] += std::abs(it.value());
    return rows.maxCoeff();
}

}  // namespace

InvariantMeasure solve_invariant_measure(const DriftField& b, const FPOptions& opt, const std::optional<ScalarField>& initial)
{
    if (!(opt.tol > 0.0)) throw InvalidArgument("solve_invariant_measure: tol must be > 0");
    if (opt.max_iters < 1) throw InvalidArgument("solve_invariant_measure: max_iters must be >= 1");
    const TorusGrid& g = b.grid();
    const Eigen::SparseMatrix<double> A = assemble_fp_operator(b);
    const auto n = A.rows();
    Eigen::SparseMatrix<double> shifted = A;
    const double sigma = 1e-8 * inf_norm(A);
    for (Eigen::Index k = 0; k < n; ++k) shifted.coeffRef(k, k) += sigma;
    shifted.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) throw std::runtime_error("solve_invariant_measure: factorization failed");

    const double cell = std::pow(g.h(), g.dim());
    Eigen::VectorXd x(n);
    if (initial) {
        if (!(initial->grid() == g)) throw InvalidArgument("solve_invariant_measure: initial grid mismatch");
        for (Eigen::Index k = 0; k < n; ++k) x[k] = (*initial)[k];
    } else {
        x.setOnes();
    }
    x /= x.sum() * cell;

    double change = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opt.max_iters; ++it) {
        Eigen::VectorXd y = lu.solve(x);
        y /= y.sum() * cell;
        change = (y - x).cwiseAbs().maxCoeff() / y.cwiseAbs().maxCoeff();
        x = std::move(y);
        if (change <= opt.tol) {
            ScalarField m(g);
            for (Eigen::Index k = 0; k < n; ++k) m[k] = x[k];
            if (!(m.min() > 0.0))
                throw std::logic_error("solve_invariant_measure: nonpositive density entry " + std::to_string(m.min()));
            return {m, fp_residual(m, b), it};
        }
    }
    const Eigen::VectorXd r = A * x;
    throw FPConvergenceError("solve_invariant_measure: no convergence after " + std::to_string(opt.max_iters) +
                                 " iterations, last change " + format_exact(change),
                             r.cwiseAbs().maxCoeff());
}

double fp_residual(const ScalarField& m, const DriftField& b)
{
    if (!(m.grid() == b.grid())) throw InvalidArgument("fp_residual: grid mismatch");
    const Eigen::SparseMatrix<double> A = assemble_fp_operator(b);
    const Eigen::Map<const Eigen::VectorXd> x(m.values().data(), static_cast<Eigen::Index>(m.size()));
    const Eigen::VectorXd r = A * x;
    return r.cwiseAbs().maxCoeff();
}

}  // namespace mfg
