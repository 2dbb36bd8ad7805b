#pragma once

#include "tfstab/grid.hpp"
#include "tfstab/signal.hpp"

#include <Eigen/Dense>

namespace tfstab {

enum class RegularizationKind { threshold, tikhonov };

/// Controls the regularized division by the Gaussian ambiguity function, the
/// ill-posed (backward-heat) step of the inversion. tau_reg is relative to
/// max |A phi| = 2^{-1/2}.
struct ReconstructionConfig {
    RegularizationKind regularization = RegularizationKind::threshold;
    double tau_reg = 1e-8;
};

/// Relative L^2 residual between the 2-D Fourier transform of the spectrogram
/// |V_phi f|^2 and the matching product of ambiguity functions of f and phi.
/// Exact in the continuum; the discrete residual measures grid truncation.
///
/// Math-to-code map (fixed conventions): with
///   F S(u, v) = sum S(x, y) e^{-2 pi i (u x + v y)} dx dy  and
///   A f(x, y) = sum f(t) conj(f(t - x)) e^{-2 pi i y t} dt,
/// the factorization reads  F S(u, v) = A f(-v, u) * conj(A phi(-v, u)),
/// i.e. both ambiguity factors appear coordinate-swapped.
double verify_factorization(const Signal& f, const TfGrid& grid);

/// Invert a noiseless (or mildly noisy) spectrogram S = |V_phi f|^2 sampled
/// on a square grid: Fourier transform, divide out the Gaussian ambiguity
/// factor with regularization, inverse transform in the second coordinate,
/// and read the diagonal f(t) conj(f(0)). The output is normalized so its
/// largest-modulus sample is real positive (any global phase works).
/// Requires f(0) bounded away from zero; the division is hard-capped to the
/// disc of radius 9 where |A phi| is representable.
Signal reconstruct_from_spectrogram(const Eigen::ArrayXXd& S, const TfGrid& grid,
                                    const ReconstructionConfig& cfg = {});

/// Default threshold for a given relative noise level: 1e-8 when noiseless,
/// 10 * nu / max|A phi| otherwise.
double default_tau_reg(double noise_level);

} // namespace tfstab
