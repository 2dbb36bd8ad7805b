#include "tfstab/gabor.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tfstab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWindowCut = 5.0; // e^{-pi 5^2} < 1e-34

void check_nyquist(const Signal& f, const TfGrid& grid) {
    const double ymax = std::max(std::abs(grid.y(0)), std::abs(grid.y(grid.ny - 1)));
    if (ymax > 0.5 / f.dt + 1e-12)
        throw std::invalid_argument("grid frequency extent exceeds the Nyquist rate of the signal");
}

/// e^{-2 pi i y_j t_m} for every sample time and grid frequency.
/// Column j holds the oscillation at frequency y_j, contiguous over m.
Eigen::MatrixXcd phase_table(const Signal& f, const TfGrid& grid) {
    Eigen::MatrixXcd e(f.size(), grid.ny);
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        for (int m = 0; m < f.size(); ++m)
            e(m, j) = std::polar(1.0, -2.0 * kPi * y * f.t(m));
    }
    return e;
}

template <class WindowFn>
GaborField windowed_transform(const Signal& f, const TfGrid& grid, WindowFn window) {
    if (f.size() < 2) throw std::invalid_argument("dgt: empty signal");
    check_nyquist(f, grid);

    const Eigen::MatrixXcd table = phase_table(f, grid);
    GaborField out;
    out.grid = grid;
    out.kind = FieldKind::gabor;
    out.values.setZero(grid.nx, grid.ny);

    Eigen::VectorXcd wf(f.size());
    // TODO: columns write disjoint rows, so this loop can be threaded with a
    // fixed per-column order once grids grow past ~1k x 1k
    for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.x(i);
        int lo = static_cast<int>(std::ceil((x - kWindowCut - f.t0) / f.dt));
        int hi = static_cast<int>(std::floor((x + kWindowCut - f.t0) / f.dt));
        lo = std::max(lo, 0);
        hi = std::min(hi, f.size() - 1);
        if (lo > hi) continue;
        const int w = hi - lo + 1;
        for (int m = lo; m <= hi; ++m)
            wf[m] = f.samples[m] * (window(f.t(m) - x) * f.dt);
        out.values.row(i) = wf.segment(lo, w).transpose() * table.middleRows(lo, w);
    }
    return out;
}

} // namespace

GaborField dgt(const Signal& f, const TfGrid& grid) {
    return windowed_transform(f, grid, [](double u) { return std::exp(-kPi * u * u); });
}

GaborField window_derivative_dgt(const Signal& f, const TfGrid& grid) {
    return windowed_transform(f, grid,
                              [](double u) { return -2.0 * kPi * u * std::exp(-kPi * u * u); });
}

GaborField ambiguity(const Signal& f, const TfGrid& grid) {
    if (f.size() < 2) throw std::invalid_argument("ambiguity: empty signal");
    check_nyquist(f, grid);

    const int n = f.size();
    const Eigen::MatrixXcd table = phase_table(f, grid);
    GaborField out;
    out.grid = grid;
    out.kind = FieldKind::ambiguity;
    out.values.setZero(grid.nx, grid.ny);

    Eigen::VectorXcd prod(n);
    for (int i = 0; i < grid.nx; ++i) {
        const double shift = grid.x(i) / f.dt;
        const int s = static_cast<int>(std::llround(shift));
        if (std::abs(shift - s) > 1e-6)
            throw std::invalid_argument("ambiguity: lag lattice incommensurate with signal sampling");
        const int lo = std::max(0, s);
        const int hi = std::min(n - 1, n - 1 + s);
        if (lo > hi) continue;
        const int w = hi - lo + 1;
        for (int m = lo; m <= hi; ++m)
            prod[m] = f.samples[m] * std::conj(f.samples[m - s]) * f.dt;
        out.values.row(i) = prod.segment(lo, w).transpose() * table.middleRows(lo, w);
    }
    return out;
}

GaborField gaussian_ambiguity_closed_form(const TfGrid& grid) {
    const double c = 1.0 / std::sqrt(2.0);
    GaborField out;
    out.grid = grid;
    out.kind = FieldKind::ambiguity;
    out.values.resize(grid.nx, grid.ny);
    for (int i = 0; i < grid.nx; ++i) {
        const double x = grid.x(i);
        for (int j = 0; j < grid.ny; ++j) {
            const double y = grid.y(j);
            out.values(i, j) =
                c * std::exp(-kPi / 2.0 * (x * x + y * y)) * std::polar(1.0, -kPi * x * y);
        }
    }
    return out;
}

WeightField weight_field(const GaborField& F, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("weight_field: p must be >= 1");
    if (!F.values.allFinite()) throw std::invalid_argument("weight_field: field has non-finite values");
    WeightField w;
    w.grid = F.grid;
    w.p = p;
    if (p == 1.0)
        w.w = F.values.array().abs();
    else if (p == 2.0)
        w.w = F.values.array().abs2();
    else
        w.w = F.values.array().abs().pow(p);
    w.degenerate = !(w.w.maxCoeff() > 0.0);
    return w;
}

VectorField gradient_field(const Eigen::ArrayXXd& A, const TfGrid& grid) {
    const int nx = grid.nx, ny = grid.ny;
    if (A.rows() != nx || A.cols() != ny)
        throw std::invalid_argument("gradient_field: shape mismatch");
    if (nx < 3 || ny < 3) throw std::invalid_argument("gradient_field: need nx, ny >= 3");

    VectorField g;
    g.grid = grid;
    g.gx.resize(nx, ny);
    g.gy.resize(nx, ny);
    const double inv2 = 1.0 / (2.0 * grid.delta), inv1 = 1.0 / grid.delta;
    for (int j = 0; j < ny; ++j) {
        g.gx(0, j) = (A(1, j) - A(0, j)) * inv1;
        for (int i = 1; i + 1 < nx; ++i) g.gx(i, j) = (A(i + 1, j) - A(i - 1, j)) * inv2;
        g.gx(nx - 1, j) = (A(nx - 1, j) - A(nx - 2, j)) * inv1;
    }
    for (int i = 0; i < nx; ++i) {
        g.gy(i, 0) = (A(i, 1) - A(i, 0)) * inv1;
        for (int j = 1; j + 1 < ny; ++j) g.gy(i, j) = (A(i, j + 1) - A(i, j - 1)) * inv2;
        g.gy(i, ny - 1) = (A(i, ny - 1) - A(i, ny - 2)) * inv1;
    }
    return g;
}

double cr_residual(const GaborField& F) {
    if (F.kind != FieldKind::gabor)
        throw std::invalid_argument("cr_residual: field must be a Gabor transform");
    const TfGrid& g = F.grid;
    if (g.nx < 3 || g.ny < 3) throw std::invalid_argument("cr_residual: grid too small");
    if (std::abs(g.y(0) + g.y(g.ny - 1)) > 1e-9 * g.delta)
        throw std::invalid_argument("cr_residual: grid must be symmetric in frequency");

    const double corner = std::max({std::abs(g.x(0)), std::abs(g.x(g.nx - 1))});
    const double cornery = std::max({std::abs(g.y(0)), std::abs(g.y(g.ny - 1))});
    if (kPi / 2.0 * (corner * corner + cornery * cornery) > 600.0)
        throw std::invalid_argument("cr_residual: grid extent too large for the holomorphy factor");

    // G(z) = eta(z) V(x, -y); the frequency flip pairs j with ny-1-j on a
    // symmetric lattice.
    Eigen::MatrixXcd G(g.nx, g.ny);
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.y(j);
            const std::complex<double> eta =
                std::exp(kPi * (x * x + y * y) / 2.0) * std::polar(1.0, -kPi * x * y);
            G(i, j) = eta * F.values(i, g.ny - 1 - j);
        }
    }

    const double gmax = G.cwiseAbs().maxCoeff();
    const double floor = gmax * std::numeric_limits<double>::epsilon();
    const double inv2 = 1.0 / (2.0 * g.delta);
    double worst = 0.0;
    for (int i = 1; i + 1 < g.nx; ++i)
        for (int j = 1; j + 1 < g.ny; ++j) {
            const std::complex<double> dx = (G(i + 1, j) - G(i - 1, j)) * inv2;
            const std::complex<double> dy = (G(i, j + 1) - G(i, j - 1)) * inv2;
            const std::complex<double> defect = dx + std::complex<double>(0.0, 1.0) * dy;
            const double scale = std::max(std::abs(G(i, j)), floor);
            worst = std::max(worst, std::abs(defect) / scale);
        }
    return worst;
}

CenterShift center_field(GaborField& F) {
    Eigen::Index imax = 0, jmax = 0;
    F.values.cwiseAbs().maxCoeff(&imax, &jmax);

    const TfGrid& g = F.grid;
    auto clampi = [](long v, int n) { return static_cast<int>(std::min<long>(std::max<long>(v, 0), n - 1)); };
    const int itgt = clampi(std::lround(-g.x0 / g.delta), g.nx);
    const int jtgt = clampi(std::lround(-g.y0 / g.delta), g.ny);

    CenterShift s;
    s.di = itgt - static_cast<int>(imax);
    s.dj = jtgt - static_cast<int>(jmax);
    if (s.di == 0 && s.dj == 0) return s;

    Eigen::MatrixXcd shifted(g.nx, g.ny);
    auto wrap = [](int v, int n) { return ((v % n) + n) % n; };
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            shifted(i, j) = F.values(wrap(i - s.di, g.nx), wrap(j - s.dj, g.ny));
    F.values = std::move(shifted);
    return s;
}

} // namespace tfstab
