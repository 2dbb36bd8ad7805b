#include "tfstab/reconstruct.hpp"

#include "oracles.hpp"
#include "tfstab/gabor.hpp"
#include "tfstab/prng.hpp"
#include "tfstab/fft.hpp"
#include "tfstab/stability.hpp"

#include <doctest.h>

using namespace tfstab;

namespace {

TfGrid square_grid(double delta, double half_extent) {
    const int n = static_cast<int>(std::llround(2.0 * half_extent / delta));
    return TfGrid(delta, n, n, -half_extent, -half_extent);
}

/// relative L2 error of a reconstructed signal against a closed form, after
/// optimal global phase alignment
double aligned_error(const Signal& rec, const std::function<std::complex<double>(double)>& target) {
    std::complex<double> inner(0.0, 0.0);
    double nt = 0.0, nr = 0.0;
    for (int i = 0; i < rec.size(); ++i) {
        const std::complex<double> t = target(rec.t(i));
        inner += t * std::conj(rec.samples[i]);
        nt += std::norm(t);
        nr += std::norm(rec.samples[i]);
    }
    const double d2 = std::max(0.0, nt + nr - 2.0 * std::abs(inner));
    return std::sqrt(d2 / nt);
}

} // namespace

TEST_CASE("verify_factorization: closed-form and discretization-limited cases") {
    const TfGrid grid = square_grid(1.0 / 16.0, 8.0);

    const Signal phi = synthesize(SynthKind::gaussian, {});
    CHECK(verify_factorization(phi, grid) <= 1e-6);

    const Signal pair = synthesize(SynthKind::gaussian_pair_plus, {2.0, 0.0});
    CHECK(verify_factorization(pair, grid) <= 1e-4);

    Signal zero;
    zero.dt = 1.0 / 16.0;
    zero.t0 = -16.0;
    zero.samples.setZero(512);
    CHECK(verify_factorization(zero, grid) == 0.0);
}

namespace {

/// closed-form ambiguity function of phi(.+a) + phi(.-a), by superposition:
/// 2 cos(2 pi a y) A phi(x,y) + e^{2 pi i a y} A phi(x+2a,y)
///                            + e^{-2 pi i a y} A phi(x-2a,y)
std::complex<double> pair_ambiguity_cf(double a, double x, double y) {
    auto aphi = [](double u, double v) {
        return std::exp(-M_PI / 2.0 * (u * u + v * v)) / std::sqrt(2.0) *
               std::polar(1.0, -M_PI * u * v);
    };
    return 2.0 * std::cos(2.0 * M_PI * a * y) * aphi(x, y) +
           std::polar(1.0, 2.0 * M_PI * a * y) * aphi(x + 2.0 * a, y) +
           std::polar(1.0, -2.0 * M_PI * a * y) * aphi(x - 2.0 * a, y);
}

/// residual of the discrete Fourier side against the fully analytic product;
/// unlike verify_factorization (discrete on both sides, exact by
/// construction) this exposes the alias error of the left-hand chain
double analytic_factorization_residual(const Signal& f, double a, const TfGrid& grid) {
    const GaborField V = dgt(f, grid);
    const Eigen::ArrayXXd S = V.values.array().abs2();
    const GaborField lhs = grid_fourier(S.matrix().cast<std::complex<double>>(), grid);
    const TfGrid& rec = lhs.grid;
    double num = 0.0, den = 0.0;
    for (int k = 0; k < rec.nx; ++k)
        for (int l = 0; l < rec.ny; ++l) {
            const double x = -rec.y(l), y = rec.x(k);
            const std::complex<double> aphi = std::exp(-M_PI / 2.0 * (x * x + y * y)) /
                                              std::sqrt(2.0) * std::polar(1.0, -M_PI * x * y);
            const std::complex<double> rhs = pair_ambiguity_cf(a, x, y) * std::conj(aphi);
            num += std::norm(lhs.values(k, l) - rhs);
            den += std::norm(rhs);
        }
    return std::sqrt(num / den);
}

} // namespace

TEST_CASE("factorization converges to the continuum identity") {
    const double a = 2.5;
    const Signal f = synthesize(SynthKind::gaussian_pair_plus, {a, 0.0});

    // dual route: the discrete Fourier side against the fully analytic
    // product (pair ambiguity in closed form)
    CHECK(analytic_factorization_residual(f, a, square_grid(1.0 / 16.0, 8.0)) <= 1e-6);

    // coarse lattices under-resolve the interference fringes of |V|^2; the
    // residual is then genuinely discretization-limited and collapses as
    // delta is halved
    const double r4 = verify_factorization(f, square_grid(0.25, 8.0));
    const double r8 = verify_factorization(f, square_grid(0.125, 8.0));
    CHECK(r4 <= 1e-4);
    CHECK(r4 >= 1e-9);
    CHECK(r4 / r8 >= 3.0);
}

TEST_CASE("reconstruct: gaussian and modulated gaussian") {
    const TfGrid grid = square_grid(1.0 / 16.0, 8.0);

    const Signal phi = synthesize(SynthKind::gaussian, {});
    const Eigen::ArrayXXd S = dgt(phi, grid).values.array().abs2();
    const Signal rec = reconstruct_from_spectrogram(S, grid);
    CHECK(aligned_error(rec, [](double t) { return std::exp(-M_PI * t * t); }) <= 1e-6);

    const Signal mod = synthesize(SynthKind::modulated_gaussian, {0.0, 1.0});
    const Eigen::ArrayXXd Sm = dgt(mod, grid).values.array().abs2();
    const Signal recm = reconstruct_from_spectrogram(Sm, grid);
    CHECK(aligned_error(recm, [](double t) {
              return std::exp(-M_PI * t * t) * std::polar(1.0, 2.0 * M_PI * t);
          }) <= 1e-5);
}

TEST_CASE("reconstruct: phase blindness") {
    const TfGrid grid = square_grid(1.0 / 16.0, 8.0);
    const Signal phi = synthesize(SynthKind::gaussian, {});
    Signal rotated = phi;
    rotated.samples *= std::polar(1.0, 1.1);

    const Eigen::ArrayXXd S1 = dgt(phi, grid).values.array().abs2();
    const Eigen::ArrayXXd S2 = dgt(rotated, grid).values.array().abs2();
    const Signal r1 = reconstruct_from_spectrogram(S1, grid);
    const Signal r2 = reconstruct_from_spectrogram(S2, grid);
    REQUIRE(r1.size() == r2.size());
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < r1.size(); ++i) {
        diff += std::norm(r1.samples[i] - r2.samples[i]);
        scale += std::norm(r1.samples[i]);
    }
    CHECK(std::sqrt(diff / scale) <= 1e-9);

    // the very same array reconstructs bitwise identically
    const Signal r1b = reconstruct_from_spectrogram(S1, grid);
    for (int i = 0; i < r1.size(); ++i) CHECK(r1.samples[i] == r1b.samples[i]);
}

TEST_CASE("reconstruct: round trip in measurement space") {
    const TfGrid grid = square_grid(1.0 / 16.0, 8.0);
    const std::vector<std::pair<SynthKind, SynthParams>> cases = {
        {SynthKind::gaussian, {}},
        {SynthKind::modulated_gaussian, {0.0, 1.0}},
        {SynthKind::modulated_gaussian, {0.0, -1.5}},
        {SynthKind::gaussian_pair_plus, {0.3, 0.0}},
        {SynthKind::gaussian_pair_plus, {0.5, 0.0}},
    };
    for (const auto& [kind, params] : cases) {
        const Signal f = synthesize(kind, params);
        // all cases satisfy the |f(0)| >= 0.1 max gate of the formula
        REQUIRE(std::abs(f.samples[f.size() / 2]) >= 0.1 * f.samples.cwiseAbs().maxCoeff());
        const GaborField V = dgt(f, grid);
        const Signal rec = reconstruct_from_spectrogram(V.values.array().abs2(), grid);
        const GaborField Vr = dgt(rec, grid);
        const double scale = std::sqrt(V.values.array().abs2().sum() * grid.cell_area());
        CHECK(phase_distance(Vr, V, 2.0).distance <= 1e-5 * scale);
    }
}

TEST_CASE("reconstruct: threshold and tikhonov agree when noiseless") {
    const TfGrid grid = square_grid(1.0 / 16.0, 8.0);
    const Signal phi = synthesize(SynthKind::gaussian, {});
    const Eigen::ArrayXXd S = dgt(phi, grid).values.array().abs2();
    const Signal a = reconstruct_from_spectrogram(S, grid, {RegularizationKind::threshold, 1e-8});
    const Signal b = reconstruct_from_spectrogram(S, grid, {RegularizationKind::tikhonov, 1e-8});
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        diff += std::norm(a.samples[i] - b.samples[i]);
        scale += std::norm(a.samples[i]);
    }
    CHECK(std::sqrt(diff / scale) <= 1e-4);
}

TEST_CASE("reconstruct: noise monotonicity") {
    const TfGrid grid = square_grid(1.0 / 16.0, 8.0);
    const Signal phi = synthesize(SynthKind::gaussian, {});
    const Eigen::ArrayXXd S = dgt(phi, grid).values.array().abs2();
    const double smax = S.maxCoeff();

    Prng rng(123);
    std::vector<double> errors;
    for (double nu : {0.0, 1e-6, 1e-4, 1e-2}) {
        Eigen::ArrayXXd noisy = S;
        if (nu > 0.0)
            for (int i = 0; i < grid.nx; ++i)
                for (int j = 0; j < grid.ny; ++j)
                    noisy(i, j) = std::max(0.0, S(i, j) + nu * smax * rng.next_in(-1.0, 1.0));
        const Signal rec = reconstruct_from_spectrogram(
            noisy, grid, {RegularizationKind::threshold, default_tau_reg(nu)});
        errors.push_back(aligned_error(rec, [](double t) { return std::exp(-M_PI * t * t); }));
    }
    for (std::size_t k = 0; k + 1 < errors.size(); ++k)
        CHECK(errors[k + 1] >= 0.5 * errors[k]); // monotone within 2x jitter
    CHECK(errors.back() > 10.0 * errors.front());
}

TEST_CASE("reconstruct: input validation and the f(0) = 0 failure") {
    const TfGrid grid = square_grid(1.0 / 16.0, 8.0);
    Eigen::ArrayXXd bad = Eigen::ArrayXXd::Constant(grid.nx, grid.ny, -1.0);
    CHECK_THROWS(reconstruct_from_spectrogram(bad, grid));

    // odd signal: f(0) = 0 exactly, the diagonal formula divides by conj f(0)
    const Signal odd = synthesize(SynthKind::gaussian_pair_minus, {1.0, 0.0});
    const Eigen::ArrayXXd S = dgt(odd, grid).values.array().abs2();
    CHECK_THROWS_WITH_AS(reconstruct_from_spectrogram(S, grid), doctest::Contains("translate"),
                         std::runtime_error);
}

TEST_CASE("grid_fourier matches the self-dual gaussian transform") {
    // F[e^{-pi r^2}](u, v) = e^{-pi (u^2 + v^2)} pins the sign and the
    // normalization of the continuous-transform approximation
    const TfGrid grid(1.0 / 16.0, 256, 256, -8.0, -8.0);
    Eigen::MatrixXcd F(grid.nx, grid.ny);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j)
            F(i, j) = std::exp(-M_PI * (grid.x(i) * grid.x(i) + grid.y(j) * grid.y(j)));
    const GaborField out = grid_fourier(F, grid);
    const TfGrid& rec = out.grid;
    CHECK(rec.delta == doctest::Approx(1.0 / 16.0));
    double worst = 0.0;
    for (int k = 0; k < rec.nx; ++k)
        for (int l = 0; l < rec.ny; ++l) {
            const double target =
                std::exp(-M_PI * (rec.x(k) * rec.x(k) + rec.y(l) * rec.y(l)));
            worst = std::max(worst, std::abs(out.values(k, l) - target));
        }
    CHECK(worst <= 1e-12);
}
