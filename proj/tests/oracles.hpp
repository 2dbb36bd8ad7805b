#pragma once

// Test-only reference computations, kept independent of the library paths
// they check: plain quadrature, dense eigendecompositions, exhaustive cut
// enumeration, and brute-force geometry scans.

#include "tfstab/graph.hpp"
#include "tfstab/grid.hpp"
#include "tfstab/prng.hpp"
#include "tfstab/signal.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

/// Random Gaussian mixture: sum of k bumps phi(t - a_k) e^{2 pi i b_k t} with
/// complex coefficients, time-frequency content within |a|, |b| <= 2.
inline tfstab::Signal make_mixture(tfstab::Prng& rng, int k = 3, int n = 512,
                                   double dt = 1.0 / 16.0) {
    std::vector<double> a(k), b(k);
    std::vector<std::complex<double>> c(k);
    for (int m = 0; m < k; ++m) {
        a[m] = rng.next_in(-2.0, 2.0);
        b[m] = rng.next_in(-2.0, 2.0);
        c[m] = std::polar(rng.next_in(0.3, 1.0), rng.next_in(0.0, 2.0 * M_PI));
    }
    tfstab::Signal s;
    s.dt = dt;
    s.t0 = -(n / 2) * dt;
    s.samples.setZero(n);
    for (int i = 0; i < n; ++i) {
        const double t = s.t(i);
        for (int m = 0; m < k; ++m)
            s.samples[i] += c[m] * std::exp(-M_PI * (t - a[m]) * (t - a[m])) *
                            std::polar(1.0, 2.0 * M_PI * b[m] * t);
    }
    return s;
}

/// Trapezoid rule over [-L, L]; exponentially accurate for analytic decaying
/// integrands, which covers every closed form used in these tests.
inline double quad(const std::function<double(double)>& f, double L, int n = 1 << 15) {
    const double h = 2.0 * L / n;
    double s = 0.5 * (f(-L) + f(L));
    for (int i = 1; i < n; ++i) s += f(-L + i * h);
    return s * h;
}

inline std::complex<double> quad_c(const std::function<std::complex<double>(double)>& f, double L,
                                   int n = 1 << 15) {
    const double h = 2.0 * L / n;
    std::complex<double> s = 0.5 * (f(-L) + f(L));
    for (int i = 1; i < n; ++i) s += f(-L + i * h);
    return s * h;
}

/// 2-D trapezoid over [-L, L]^2.
inline double quad2(const std::function<double(double, double)>& f, double L, int n = 1 << 10) {
    const double h = 2.0 * L / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double wx = (i == 0 || i == n) ? 0.5 : 1.0;
        for (int j = 0; j <= n; ++j) {
            const double wy = (j == 0 || j == n) ? 0.5 : 1.0;
            s += wx * wy * f(-L + i * h, -L + j * h);
        }
    }
    return s * h * h;
}

/// Exhaustive Cheeger constant by direct enumeration of all subsets.
struct BruteCut {
    double ratio;
    std::vector<bool> subset;
};

inline BruteCut enumerate_cheeger(const tfstab::WeightedGridGraph& g) {
    const int n = g.num_vertices();
    BruteCut best{std::numeric_limits<double>::infinity(), {}};
    for (std::uint32_t m = 1; m + 1 < (1u << n); ++m) {
        double vin = 0.0, cut = 0.0;
        for (int u = 0; u < n; ++u) {
            if (!((m >> u) & 1u)) continue;
            vin += g.degree[u];
            for (int e = g.adj_offset[u]; e < g.adj_offset[u + 1]; ++e)
                if (!((m >> g.adj_vertex[e]) & 1u)) cut += g.adj_weight[e];
        }
        const double mv = std::min(vin, g.total_volume - vin);
        if (!(mv > 0.0)) continue;
        const double r = cut / mv;
        if (r < best.ratio) {
            best.ratio = r;
            best.subset.assign(n, false);
            for (int u = 0; u < n; ++u) best.subset[u] = (m >> u) & 1u;
        }
    }
    return best;
}

/// Dense normalized Laplacian spectrum (ascending) of the non-isolated part.
inline Eigen::VectorXd dense_laplacian_spectrum(const tfstab::WeightedGridGraph& g) {
    std::vector<int> ids;
    for (int u = 0; u < g.num_vertices(); ++u)
        if (!g.isolated[u]) ids.push_back(u);
    const int m = static_cast<int>(ids.size());
    std::vector<int> local(g.num_vertices(), -1);
    for (int a = 0; a < m; ++a) local[ids[a]] = a;

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(m);
    for (int a = 0; a < m; ++a)
        for (int e = g.adj_offset[ids[a]]; e < g.adj_offset[ids[a] + 1]; ++e) {
            const int b = local[g.adj_vertex[e]];
            if (b < 0) continue;
            W(a, b) = g.adj_weight[e];
            deg[a] += g.adj_weight[e];
        }
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (W(a, b) != 0.0) L(a, b) -= W(a, b) / std::sqrt(deg[a] * deg[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    return es.eigenvalues();
}

/// Nearest-outside-cell distance by direct O(cells^2) scan, in lattice units.
inline Eigen::ArrayXXd brute_distance_transform(const tfstab::Mask& inside) {
    const int nx = static_cast<int>(inside.rows()), ny = static_cast<int>(inside.cols());
    Eigen::ArrayXXd d(nx, ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double best = std::min(std::min(i + 1, nx - i), std::min(j + 1, ny - j));
            best *= best;
            for (int a = 0; a < nx; ++a)
                for (int b = 0; b < ny; ++b) {
                    if (inside(a, b)) continue;
                    const double dd = double(i - a) * (i - a) + double(j - b) * (j - b);
                    best = std::min(best, dd);
                }
            d(i, j) = std::sqrt(best);
        }
    return d;
}

/// |V_phi phi|(x, y) = 2^{-1/2} e^{-pi/2 (x^2+y^2)}
inline double gauss_gabor_abs(double x, double y) {
    return std::exp(-M_PI / 2.0 * (x * x + y * y)) / std::sqrt(2.0);
}

} // namespace oracle
