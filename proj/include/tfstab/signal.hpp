#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>

namespace tfstab {

/// Finite complex sample sequence on a uniform time lattice.
struct Signal {
    Eigen::VectorXcd samples;
    double dt = 1.0;
    double t0 = 0.0;

    int size() const { return static_cast<int>(samples.size()); }
    double t(int i) const { return t0 + i * dt; }

    /// sum |samples|^2 * dt
    double energy() const { return samples.squaredNorm() * dt; }
};

enum class SynthKind {
    gaussian,            // phi(t) = e^{-pi t^2}
    gaussian_pair_plus,  // phi(t+a) + phi(t-a)
    gaussian_pair_minus, // phi(t+a) - phi(t-a)
    modulated_gaussian,  // e^{-pi t^2} e^{2 pi i b t}
};

struct SynthParams {
    double a = 0.0; // time shift of the pair kinds
    double b = 0.0; // modulation frequency
};

/// Evaluate one of the closed-form test signals on the lattice
/// t = (-floor(n/2) + k) * dt, k = 0..n-1. Warns on stderr when the window
/// clips more than 1e-12 of the tail mass.
Signal synthesize(SynthKind kind, const SynthParams& params, int n = 512, double dt = 1.0 / 16.0);

enum class SignalFormat { wav, csv };

/// Load a recorded signal. WAV must be mono 16-bit PCM (dt = 1/rate);
/// CSV is one "re" or "re,im" row per sample with an optional "dt=<float>"
/// header line. Non-finite samples are rejected.
Signal load_signal(const std::filesystem::path& path, SignalFormat format, bool normalize = false);

void save_signal_csv(const Signal& s, const std::filesystem::path& path);

SynthKind parse_synth_kind(const std::string& name);

} // namespace tfstab
