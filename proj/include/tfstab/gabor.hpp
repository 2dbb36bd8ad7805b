#pragma once

#include "tfstab/grid.hpp"
#include "tfstab/signal.hpp"

#include <Eigen/Dense>

namespace tfstab {

/// Discrete Gabor transform with the Gaussian window phi(t) = e^{-pi t^2}:
///
///   values(i, j) = sum_t f(t) e^{-pi (t - x_i)^2} e^{-2 pi i y_j t} dt
///
/// The window is truncated at |t - x_i| <= 5 (tail < 1e-34) and each x-column
/// is summed in a fixed order, so results are deterministic.
/// Throws if the grid frequency extent exceeds the Nyquist rate of f.
GaborField dgt(const Signal& f, const TfGrid& grid);

/// Same kernel with the window replaced by phi'(t) = -2 pi t e^{-pi t^2}.
/// By the magnitude-gradient identity |V_{phi'} f| = |grad |V_phi f||.
GaborField window_derivative_dgt(const Signal& f, const TfGrid& grid);

/// Ambiguity function A f(x, y) = sum_t f(t) conj(f(t - x)) e^{-2 pi i y t} dt.
/// Lags x_i must land on the sample lattice of f (x_i / dt near-integer).
GaborField ambiguity(const Signal& f, const TfGrid& grid);

/// A phi(x, y) = 2^{-1/2} e^{-pi i x y} e^{-pi/2 (x^2 + y^2)}, evaluated
/// exactly. Coincides with V_phi phi on the same grid.
GaborField gaussian_ambiguity_closed_form(const TfGrid& grid);

/// w = |F|^p elementwise; flags the all-zero field as degenerate.
WeightField weight_field(const GaborField& F, double p);

/// First-order partial derivatives of a real field on the lattice: central
/// differences in the interior, one-sided (first order) at the boundary.
struct VectorField {
    TfGrid grid;
    Eigen::ArrayXXd gx;
    Eigen::ArrayXXd gy;

    Eigen::ArrayXXd magnitude() const { return (gx.square() + gy.square()).sqrt(); }
};

VectorField gradient_field(const Eigen::ArrayXXd& A, const TfGrid& grid);

/// Discrete Cauchy-Riemann defect of G(z) = eta(z) V_phi f(x, -y) with
/// eta(z) = e^{pi (|z|^2/2 - i x y)}: max over interior points of
/// |dG/dx + i dG/dy| / max(|G|, eps). Small iff the field is a genuine Gabor
/// transform; O(delta^2) for smooth fields.
double cr_residual(const GaborField& F);

/// Circularly shift values so that the maximum modulus sits at the sample
/// nearest the origin. Returns the applied shift (in lattice steps).
struct CenterShift {
    int di = 0;
    int dj = 0;
};
CenterShift center_field(GaborField& F);

} // namespace tfstab
