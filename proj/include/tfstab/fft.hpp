#pragma once

#include "tfstab/grid.hpp"

#include <Eigen/Dense>

namespace tfstab {

/// In-place forward DFT of each column: X_k = sum_m x_m e^{-2 pi i k m / n}.
void dft_columns(Eigen::MatrixXcd& m);
/// Inverse, scaled by 1/n.
void idft_columns(Eigen::MatrixXcd& m);

Eigen::VectorXcd dft(const Eigen::VectorXcd& v);
Eigen::VectorXcd idft(const Eigen::VectorXcd& v);

/// Continuous 2-D Fourier transform of a field sampled on a square grid,
/// approximated by the Riemann sum
///
///   out(u, v) = delta^2 sum_{ij} F(i, j) e^{-2 pi i (u x_i + v y_j)}
///
/// evaluated on the reciprocal lattice with spacing 1/(n delta) centered at
/// the origin (spacing and offsets carried in the returned field's grid).
/// Requires nx == ny.
GaborField grid_fourier(const Eigen::MatrixXcd& values, const TfGrid& grid);

/// Reciprocal lattice of grid_fourier for a given grid.
TfGrid reciprocal_grid(const TfGrid& grid);

} // namespace tfstab
