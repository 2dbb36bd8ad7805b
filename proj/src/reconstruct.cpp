#include "tfstab/reconstruct.hpp"

#include "tfstab/fft.hpp"
#include "tfstab/gabor.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace tfstab {

namespace {

constexpr double kPi = std::numbers::pi;
const double kAmbiguityPeak = 1.0 / std::sqrt(2.0);

std::complex<double> gaussian_ambiguity_at(double x, double y) {
    return kAmbiguityPeak * std::exp(-kPi / 2.0 * (x * x + y * y)) * std::polar(1.0, -kPi * x * y);
}

/// Lattice of the first ambiguity coordinate after the (u, v) -> (-v, u)
/// swap: negating the reciprocal axis reverses and shifts it by one step
/// when n is even.
TfGrid swapped_ambiguity_grid(const TfGrid& rec) {
    const int n = rec.nx;
    const double h = rec.delta;
    return TfGrid(h, n, n, -rec.x(n - 1), rec.y0);
}

} // namespace

double verify_factorization(const Signal& f, const TfGrid& grid) {
    const GaborField V = dgt(f, grid);
    const Eigen::ArrayXXd S = V.values.array().abs2();

    const GaborField lhs = grid_fourier(S.matrix().cast<std::complex<double>>(), grid);
    const TfGrid& rec = lhs.grid;
    const int n = rec.nx;

    // A f on the swapped lattice {(-v_l, u_k)}
    const TfGrid amb = swapped_ambiguity_grid(rec);
    const GaborField Af = ambiguity(f, amb);

    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const double x = -rec.y(l); // first ambiguity coordinate
            const double y = rec.x(k);
            const std::complex<double> rhs =
                Af.values(n - 1 - l, k) * std::conj(gaussian_ambiguity_at(x, y));
            num += std::norm(lhs.values(k, l) - rhs);
            den += std::norm(rhs);
        }
    if (den == 0.0) return 0.0; // zero signal: both sides vanish
    return std::sqrt(num / den);
}

Signal reconstruct_from_spectrogram(const Eigen::ArrayXXd& S, const TfGrid& grid,
                                    const ReconstructionConfig& cfg) {
    if (S.rows() != grid.nx || S.cols() != grid.ny)
        throw std::invalid_argument("reconstruct: shape mismatch");
    if (grid.nx != grid.ny) throw std::invalid_argument("reconstruct: grid must be square");
    if (!S.allFinite() || S.minCoeff() < 0.0)
        throw std::invalid_argument("reconstruct: spectrogram must be finite and nonnegative");
    if (!(cfg.tau_reg > 0.0)) throw std::invalid_argument("reconstruct: tau_reg must be positive");

    const GaborField G = grid_fourier(S.matrix().cast<std::complex<double>>(), grid);
    const TfGrid& rec = G.grid;
    const int n = rec.nx;
    const TfGrid amb = swapped_ambiguity_grid(rec);

    // A f(x_a, y_k) = F S(y_k-index, l(x_a)) / conj(A phi), regularized
    Eigen::MatrixXcd af(n, n);
    const double tau_abs = cfg.tau_reg * kAmbiguityPeak;
    for (int i = 0; i < n; ++i) {
        const double x = amb.x(i);
        const int l = n - 1 - i; // x = -rec.y(l)
        for (int k = 0; k < n; ++k) {
            const double y = amb.y(k);
            if (x * x + y * y > 81.0) { // |A phi| below 1e-30: pure noise out here
                af(i, k) = 0.0;
                continue;
            }
            const std::complex<double> aphi = gaussian_ambiguity_at(x, y);
            const std::complex<double> meas = G.values(k, l);
            if (cfg.regularization == RegularizationKind::threshold) {
                af(i, k) = std::abs(aphi) < tau_abs ? 0.0 : meas / std::conj(aphi);
            } else {
                af(i, k) = meas * aphi / (std::norm(aphi) + tau_abs * tau_abs);
            }
        }
    }

    // diagonal of the inverse transform in the second coordinate:
    // g(x, x) = h * sum_k A f(x, y_k) e^{+2 pi i y_k x}
    Eigen::VectorXcd diag(n);
    for (int i = 0; i < n; ++i) {
        const double t = amb.x(i);
        std::complex<double> acc(0.0, 0.0);
        for (int k = 0; k < n; ++k) acc += af(i, k) * std::polar(1.0, 2.0 * kPi * amb.y(k) * t);
        diag[i] = acc * rec.delta;
    }

    const int i0 = static_cast<int>(std::llround(-amb.x0 / amb.delta));
    if (i0 < 0 || i0 >= n || std::abs(amb.x(i0)) > 1e-12 * amb.delta)
        throw std::logic_error("reconstruct: origin missing from the output lattice");

    // the lag-zero row recovers g(0, t) = |f(t)|^2, whose max scales the
    // whole surface g(x, t) = f(t) conj(f(t-x))
    double gmax = 0.0;
    for (int m = 0; m < n; ++m) {
        const double t = amb.x(m);
        std::complex<double> acc(0.0, 0.0);
        for (int k = 0; k < n; ++k) acc += af(i0, k) * std::polar(1.0, 2.0 * kPi * amb.y(k) * t);
        gmax = std::max(gmax, std::abs(acc) * rec.delta);
    }
    // |f(0)|^2 against ||f||_inf^2; the gate sits well above the ~tau_reg
    // numerical floor that the regularized division leaves in g0
    const double g0 = std::abs(diag[i0]);
    if (!(g0 > 1e-6 * gmax))
        throw std::runtime_error("reconstruct: f(0) is (near) zero; translate the input first");

    Signal out;
    out.dt = amb.delta;
    out.t0 = amb.x0;
    out.samples = diag / std::sqrt(g0);

    // gauge: largest-modulus sample real positive
    Eigen::Index imax = 0;
    out.samples.cwiseAbs().maxCoeff(&imax);
    const std::complex<double> top = out.samples[imax];
    if (std::abs(top) > 0.0) out.samples *= std::conj(top) / std::abs(top);
    return out;
}

double default_tau_reg(double noise_level) {
    if (noise_level <= 0.0) return 1e-8;
    return std::min(0.9, 10.0 * noise_level / kAmbiguityPeak);
}

} // namespace tfstab
