#pragma once

#include "tfstab/grid.hpp"
#include "tfstab/signal.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <vector>

namespace tfstab {

/// Parameters of the measurement-space norm
///   ||F|| = ||F||_p + ||F||_q + ||grad F||_p + ||(|x|+|y|)^s F||_q
/// with r = 1 and s = 6 fixed. Requires p in [1,2) and q in (2p/(2-p), inf].
struct DNormParams {
    double p;
    double q; // may be +infinity
    int r = 1;
    int s = 6;

    DNormParams(double p_, double q_);
};

struct DNormTerms {
    double lp = 0.0;
    double lq = 0.0;
    double grad_lp = 0.0;
    double weighted_lq = 0.0;

    double total() const { return lp + lq + grad_lp + weighted_lq; }
};

DNormTerms d_norm_terms(const Eigen::ArrayXXd& F, const TfGrid& grid, const DNormParams& params,
                        const Mask* mask = nullptr);
double d_norm(const Eigen::ArrayXXd& F, const TfGrid& grid, const DNormParams& params,
              const Mask* mask = nullptr);

struct PhaseDistance {
    double distance = 0.0;
    double alpha_star = 0.0; // phase applied to F1 that best matches F2, in [0, 2 pi)
};

/// Phase-invariant L^p distance min_alpha ||e^{i alpha} F1 - F2||_{L^p}.
/// p = 2 uses the closed-form minimizer; otherwise a 64-point scan refined by
/// golden section to 1e-10.
PhaseDistance phase_distance(const GaborField& F1, const GaborField& F2, double p,
                             const Mask* mask = nullptr);

struct GlobalVariation {
    double delta_d = 0.0;       // min{ ||F||_inf / (2 ||grad|F|||_inf), 1 }
    double delta_tilde_d = 0.0; // inscribed half-max disc radius, capped at 1
};

GlobalVariation global_variation(const GaborField& F, const Mask* mask = nullptr);

struct LogDerivativeNorm {
    double value = 0.0;        // || grad|F| / max(|F|, eps) ||_{L^r(B_R)}
    double growth_ratio = 0.0; // value / (R^5 + 1)
};

/// L^r norm (r in [1,2)) of the logarithmic derivative of a centered field
/// over the disc B_R(0). Near-zeros are floored at 1e-13 * max|F|.
LogDerivativeNorm log_derivative_norm(const GaborField& F, double r, double R);

/// Zeros of F inside B_R(0), counted by the phase winding around each grid
/// cell. A zero landing exactly on a sample retries once with R + delta/2.
int count_zeros(const GaborField& F, double R);

struct ExperimentRow {
    double a = 0.0;
    double h_cal = 0.0;
    double mismatch = 0.0;
    double distance = 0.0;
    double bound_rhs = 0.0; // (1 + 1/h_cal) * mismatch
    double ratio = 0.0;     // distance / bound_rhs
};

struct ExperimentConfig {
    int n = 512;
    double dt = 1.0 / 16.0;
    TfGrid grid = TfGrid::centered(1.0 / 8.0, 8.0, 8.0);
    std::uint64_t seed = 42;
};

/// The two-Gaussian instability sweep: for each separation a, measure the
/// calibrated Cheeger estimate of |V_phi f|^p, the D-norm mismatch between
/// the pair's spectrogram magnitudes, and the phase-invariant distance.
std::vector<ExperimentRow> instability_experiment(const std::vector<double>& a_values,
                                                  const DNormParams& params,
                                                  const ExperimentConfig& config = {});

void write_rows_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path);

} // namespace tfstab
