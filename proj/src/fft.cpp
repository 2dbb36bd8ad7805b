#include "tfstab/fft.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <numbers>
#include <stdexcept>

namespace tfstab {

namespace {
constexpr double kPi = std::numbers::pi;
}

void dft_columns(Eigen::MatrixXcd& m) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd in(m.rows()), out(m.rows());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        in = m.col(j);
        fft.fwd(out, in);
        m.col(j) = out;
    }
}

void idft_columns(Eigen::MatrixXcd& m) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd in(m.rows()), out(m.rows());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        in = m.col(j);
        fft.inv(out, in);
        m.col(j) = out;
    }
}

Eigen::VectorXcd dft(const Eigen::VectorXcd& v) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd out(v.size());
    fft.fwd(out, v);
    return out;
}

Eigen::VectorXcd idft(const Eigen::VectorXcd& v) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd out(v.size());
    fft.inv(out, v);
    return out;
}

TfGrid reciprocal_grid(const TfGrid& grid) {
    if (grid.nx != grid.ny)
        throw std::invalid_argument("reciprocal_grid: grid must be square");
    const int n = grid.nx;
    const double h = 1.0 / (n * grid.delta);
    const int k0 = n / 2;
    return TfGrid(h, n, n, -k0 * h, -k0 * h);
}

GaborField grid_fourier(const Eigen::MatrixXcd& values, const TfGrid& grid) {
    if (values.rows() != grid.nx || values.cols() != grid.ny)
        throw std::invalid_argument("grid_fourier: shape mismatch");
    const TfGrid rec = reciprocal_grid(grid);
    const int n = grid.nx;
    const int k0 = n / 2;

    // ramp shifting the DFT index so bin k corresponds to frequency (k - k0)/(n delta)
    Eigen::VectorXcd ramp(n);
    for (int i = 0; i < n; ++i) ramp[i] = std::polar(1.0, 2.0 * kPi * k0 * i / n);

    Eigen::MatrixXcd work = values;
    // transform over i (time axis) for each j
    work.array().colwise() *= ramp.array();
    dft_columns(work);
    for (int k = 0; k < n; ++k)
        work.row(k) *= std::polar(1.0, -2.0 * kPi * rec.x(k) * grid.x0);

    // transform over j (frequency axis) for each output row k
    work.transposeInPlace();
    work.array().colwise() *= ramp.array();
    dft_columns(work);
    for (int l = 0; l < n; ++l)
        work.row(l) *= std::polar(1.0, -2.0 * kPi * rec.y(l) * grid.y0);
    work.transposeInPlace();

    GaborField out;
    out.grid = rec;
    out.values = work * grid.cell_area();
    out.kind = FieldKind::generic;
    return out;
}

} // namespace tfstab
