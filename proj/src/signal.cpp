#include "tfstab/signal.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

namespace tfstab {

namespace {

constexpr double kPi = std::numbers::pi;

double gauss(double t) { return std::exp(-kPi * t * t); }

std::uint32_t read_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16le(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

Signal load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    char tag[5] = {0};
    in.read(tag, 4);
    if (std::strncmp(tag, "RIFF", 4) != 0) throw std::runtime_error("not a RIFF file: " + path.string());
    read_u32le(in);
    in.read(tag, 4);
    if (std::strncmp(tag, "WAVE", 4) != 0) throw std::runtime_error("not a WAVE file: " + path.string());

    std::uint16_t channels = 0, bits = 0, format = 0;
    std::uint32_t rate = 0;
    std::vector<std::int16_t> pcm;
    bool have_fmt = false, have_data = false;

    while (in && !(have_fmt && have_data)) {
        in.read(tag, 4);
        if (!in) break;
        std::uint32_t chunk = read_u32le(in);
        if (std::strncmp(tag, "fmt ", 4) == 0) {
            format = read_u16le(in);
            channels = read_u16le(in);
            rate = read_u32le(in);
            read_u32le(in); // byte rate
            read_u16le(in); // block align
            bits = read_u16le(in);
            if (chunk > 16) in.seekg(chunk - 16, std::ios::cur);
            have_fmt = true;
        } else if (std::strncmp(tag, "data", 4) == 0) {
            pcm.resize(chunk / 2);
            in.read(reinterpret_cast<char*>(pcm.data()), chunk);
            have_data = true;
        } else {
            in.seekg(chunk + (chunk & 1u), std::ios::cur);
        }
    }
    if (!have_fmt || !have_data) throw std::runtime_error("missing fmt/data chunk: " + path.string());
    if (format != 1) throw std::runtime_error("WAV must be PCM: " + path.string());
    if (channels != 1) throw std::runtime_error("WAV must be mono: " + path.string());
    if (bits != 16) throw std::runtime_error("WAV must be 16-bit: " + path.string());
    if (rate == 0) throw std::runtime_error("WAV has zero sample rate: " + path.string());
    if (pcm.size() < 2) throw std::runtime_error("WAV too short: " + path.string());

    Signal s;
    s.dt = 1.0 / static_cast<double>(rate);
    s.t0 = 0.0;
    s.samples.resize(static_cast<Eigen::Index>(pcm.size()));
    for (std::size_t k = 0; k < pcm.size(); ++k)
        s.samples[static_cast<Eigen::Index>(k)] = static_cast<double>(pcm[k]) / 32768.0;
    return s;
}

Signal load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    Signal s;
    s.dt = 1.0;
    s.t0 = 0.0;
    std::vector<std::complex<double>> data;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip whitespace and skip blanks
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("dt=", 0) == 0) {
            s.dt = std::stod(line.substr(3));
            if (!(s.dt > 0.0)) throw std::runtime_error("CSV header dt must be positive");
            continue;
        }
        // parse "re" or "re,im" (std::stod, unlike stream extraction, accepts
        // nan/inf so those can be rejected with a precise diagnostic)
        auto parse = [&](const std::string& tok) {
            try {
                std::size_t used = 0;
                const double v = std::stod(tok, &used);
                while (used < tok.size() && tok[used] == ' ') ++used;
                if (used != tok.size()) throw std::invalid_argument("trailing text");
                return v;
            } catch (const std::exception&) {
                throw std::runtime_error("unparsable sample at line " + std::to_string(lineno));
            }
        };
        const std::size_t comma = line.find(',');
        const double re = parse(line.substr(0, comma));
        const double im = comma == std::string::npos ? 0.0 : parse(line.substr(comma + 1));
        if (!std::isfinite(re) || !std::isfinite(im))
            throw std::runtime_error("non-finite sample at line " + std::to_string(lineno));
        data.emplace_back(re, im);
    }
    if (data.size() < 2) throw std::runtime_error("need at least 2 samples: " + path.string());
    s.samples = Eigen::Map<const Eigen::VectorXcd>(data.data(), static_cast<Eigen::Index>(data.size()));
    return s;
}

} // namespace

Signal synthesize(SynthKind kind, const SynthParams& params, int n, double dt) {
    if (n < 16) throw std::invalid_argument("synthesize: need n >= 16");
    if (!(dt > 0.0)) throw std::invalid_argument("synthesize: dt must be positive");

    Signal s;
    s.dt = dt;
    s.t0 = -static_cast<double>(n / 2) * dt;
    s.samples.resize(n);
    const double a = params.a, b = params.b;
    for (int k = 0; k < n; ++k) {
        const double t = s.t(k);
        switch (kind) {
        case SynthKind::gaussian:
            s.samples[k] = gauss(t);
            break;
        case SynthKind::gaussian_pair_plus:
            s.samples[k] = gauss(t + a) + gauss(t - a);
            break;
        case SynthKind::gaussian_pair_minus:
            s.samples[k] = gauss(t + a) - gauss(t - a);
            break;
        case SynthKind::modulated_gaussian:
            s.samples[k] = gauss(t) * std::polar(1.0, 2.0 * kPi * b * t);
            break;
        }
    }

    // tail check: the sampled window should contain the support [-a-5, a+5]
    const double need = std::abs(a) + 5.0;
    if (s.t(0) > -need || s.t(n - 1) < need)
        std::cerr << "warning: synthesize window [" << s.t(0) << ", " << s.t(n - 1)
                  << "] clips tail mass beyond 1e-12\n";
    return s;
}

Signal load_signal(const std::filesystem::path& path, SignalFormat format, bool normalize) {
    Signal s = format == SignalFormat::wav ? load_wav(path) : load_csv(path);
    for (Eigen::Index k = 0; k < s.samples.size(); ++k) {
        const auto v = s.samples[k];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::runtime_error("non-finite sample at line " + std::to_string(k + 1));
    }
    if (normalize) {
        const double peak = s.samples.cwiseAbs().maxCoeff();
        if (peak > 0.0) s.samples /= peak;
    }
    return s;
}

void save_signal_csv(const Signal& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    out << "dt=" << s.dt << "\n";
    for (Eigen::Index k = 0; k < s.samples.size(); ++k)
        out << s.samples[k].real() << "," << s.samples[k].imag() << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

SynthKind parse_synth_kind(const std::string& name) {
    if (name == "gaussian") return SynthKind::gaussian;
    if (name == "gaussian_pair_plus") return SynthKind::gaussian_pair_plus;
    if (name == "gaussian_pair_minus") return SynthKind::gaussian_pair_minus;
    if (name == "modulated_gaussian") return SynthKind::modulated_gaussian;
    throw std::invalid_argument("unknown synth kind: " + name);
}

} // namespace tfstab
