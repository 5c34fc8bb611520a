#include <cmath>
#include <random>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "mfg/validation.hpp"

namespace mfg {

namespace {

constexpr std::size_t chunk_size = 1024;

/// Nodal -∇H(∇_h u), one array per component.
std::array<std::vector<double>, 2> nodal_drift(const ScalarField& u, const HamiltonianSpec& h)
{
    const TorusGrid& g = u.grid();
    const VectorField gu = gradient(u);
    std::array<std::vector<double>, 2> b{std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0)};
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto dh = h_grad(h, gu.node(k));
        for (int d = 0; d < g.dim(); ++d) b[d][k] = -dh[d];
    }
    return b;
}

}  // namespace

ParticleReport simulate_particles(const ScalarField& u, const HamiltonianSpec& h, const ScalarField& target,
                                  const ParticleOptions& opt)
{
    const TorusGrid& g = u.grid();
    if (!(target.grid() == g)) throw InvalidArgument("simulate_particles: target grid mismatch");
    if (opt.count < 10'000) throw InvalidArgument("simulate_particles: count must be >= 10^4");
    if (!(opt.dt > 0.0) || !(opt.dt <= g.h())) throw InvalidArgument("simulate_particles: dt must lie in (0, h]");
    if (!(opt.horizon > opt.dt)) throw InvalidArgument("simulate_particles: horizon must exceed dt");
    const int dim = g.dim();
    const int n = g.n();
    const auto b = nodal_drift(u, h);
    const long steps = std::lround(opt.horizon / opt.dt);
    const long burn = steps / 2;
    const double noise = std::sqrt(2.0 * opt.dt);
    const double dt = opt.dt;

    std::vector<std::uint64_t> hist(g.size(), 0);
    // Steps are far shorter than the period, so one correction suffices.
    auto wrap01 = [](double x) {
        if (x < 0.0) x += 1.0;
        if (x >= 1.0) x -= 1.0;
        return x;
    };
    auto node_of = [n](double x) {
        int i = static_cast<int>(x * n + 0.5);
        return i >= n ? i - n : i;
    };
    // Multilinear interpolation of component d at (x, y).
    auto drift = [&](int d, double x, double y) {
        const double sx = x * n;
        int i = static_cast<int>(sx);
        const double wx = sx - i;
        if (i >= n) i -= n;
        const int ip = i + 1 == n ? 0 : i + 1;
        const auto& f = b[d];
        if (dim == 1) return (1.0 - wx) * f[i] + wx * f[ip];
        const double sy = y * n;
        int j = static_cast<int>(sy);
        const double wy = sy - j;
        if (j >= n) j -= n;
        const int jp = j + 1 == n ? 0 : j + 1;
        const std::size_t r0 = static_cast<std::size_t>(j) * n;
        const std::size_t r1 = static_cast<std::size_t>(jp) * n;
        return (1.0 - wy) * ((1.0 - wx) * f[r0 + i] + wx * f[r0 + ip]) + wy * ((1.0 - wx) * f[r1 + i] + wx * f[r1 + ip]);
    };

    auto interp1 = [&](double x) {
        const double sx = x * n;
        int i = static_cast<int>(sx);
        const double wx = sx - i;
        if (i >= n) i -= n;
        const int ip = i + 1 == n ? 0 : i + 1;
        return b[0][i] + wx * (b[0][ip] - b[0][i]);
    };

    std::vector<double> xs(chunk_size), ys(chunk_size);
    for (std::uint64_t start = 0, chunk = 0; start < opt.count; start += chunk_size, ++chunk) {
        const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(chunk_size, opt.count - start));
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                          static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
        boost::random::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        boost::random::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t p = 0; p < len; ++p) {
            xs[p] = unif(rng);
            ys[p] = dim == 2 ? unif(rng) : 0.0;
        }
        for (long s = 1; s <= steps; ++s) {
            const bool record = s > burn;
            if (dim == 1) {
                for (std::size_t p = 0; p < len; ++p) {
                    const double x = wrap01(xs[p] + interp1(xs[p]) * dt + noise * normal(rng));
                    if (record) ++hist[node_of(x)];
                    xs[p] = x;
                }
                continue;
            }
            for (std::size_t p = 0; p < len; ++p) {
                double x = xs[p];
                double y = ys[p];
                const double bx = drift(0, x, y);
                const double by = drift(1, x, y);
                x = wrap01(x + bx * dt + noise * normal(rng));
                y = wrap01(y + by * dt + noise * normal(rng));
                if (record) ++hist[g.index(node_of(x), node_of(y))];
                xs[p] = x;
                ys[p] = y;
            }
        }
    }

    std::uint64_t total = 0;
    for (auto c : hist) total += c;
    const double cell = std::pow(g.h(), dim);
    ScalarField density(g);
    for (std::size_t k = 0; k < g.size(); ++k) density[k] = static_cast<double>(hist[k]) / (static_cast<double>(total) * cell);
    return {density, lp_norm(density - target, 1.0), total};
}

}  // namespace mfg
