// tfstab: Gabor-transform stability toolkit.
//
// Subcommands cover the full pipeline: transform a signal to the
// time-frequency plane, estimate Cheeger constants of the spectrogram-
// weighted grid, partition unstable measurements into well-connected
// components, run the two-Gaussian instability sweep, invert noiseless
// spectrograms, and emit holomorphy/zero-count diagnostics.
//
// Every run writes a manifest.json echoing the resolved configuration; with
// identical manifests all outputs reproduce bitwise.

#include "tfstab/field_io.hpp"
#include "tfstab/gabor.hpp"
#include "tfstab/partition.hpp"
#include "tfstab/reconstruct.hpp"
#include "tfstab/signal.hpp"
#include "tfstab/spectral.hpp"
#include "tfstab/stability.hpp"
#include "tfstab/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace tfstab;

namespace {

struct GridFlags {
    double delta = 1.0 / 16.0;
    double xmax = 8.0;
    double ymax = 8.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--delta", delta, "lattice spacing (time and frequency)");
        cmd->add_option("--xmax", xmax, "half extent of the time axis");
        cmd->add_option("--ymax", ymax, "half extent of the frequency axis");
    }
    TfGrid grid() const { return TfGrid::centered(delta, xmax, ymax); }
    ordered_json manifest() const {
        return {{"delta", delta}, {"xmax", xmax}, {"ymax", ymax}};
    }
};

struct SignalFlags {
    std::string synth;
    double a = 0.0;
    double b = 0.0;
    int n = 512;
    double dt = 1.0 / 16.0;
    std::string in;
    std::string format = "csv";
    bool normalize = false;

    void attach(CLI::App* cmd, const std::string& prefix = "") {
        const std::string p = prefix.empty() ? "" : prefix + "-";
        cmd->add_option("--" + p + "synth", synth,
                        "synthetic signal: gaussian | gaussian_pair_plus | gaussian_pair_minus | "
                        "modulated_gaussian");
        cmd->add_option("--" + p + "a", a, "pair shift parameter");
        cmd->add_option("--" + p + "b", b, "modulation frequency");
        cmd->add_option("--" + p + "n", n, "synthetic sample count");
        cmd->add_option("--" + p + "dt", dt, "synthetic sample spacing");
        cmd->add_option("--" + p + "signal", in, "signal file to load instead of synthesizing");
        cmd->add_option("--" + p + "format", format, "input format: csv | wav");
        cmd->add_flag("--" + p + "normalize", normalize, "normalize loaded peak amplitude to 1");
    }

    Signal resolve() const {
        if (!in.empty()) {
            const SignalFormat f = format == "wav" ? SignalFormat::wav : SignalFormat::csv;
            return load_signal(in, f, normalize);
        }
        if (synth.empty()) throw std::runtime_error("no signal given: use --synth or --in");
        return synthesize(parse_synth_kind(synth), {a, b}, n, dt);
    }
    ordered_json manifest() const {
        return {{"synth", synth},   {"a", a},   {"b", b},
                {"n", n},           {"dt", dt}, {"in", in},
                {"format", format}, {"normalize", normalize}};
    }
};

fs::path prepare_outdir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const fs::path& dir, ordered_json manifest) {
    std::ofstream f(dir / "manifest.json");
    f << manifest.dump(2) << "\n";
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(std::stod(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (out.empty()) throw std::runtime_error("empty list");
    return out;
}

double parse_q(const std::string& s) {
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    return std::stod(s);
}

// ---------------------------------------------------------------- transform

struct TransformCmd {
    SignalFlags sig;
    GridFlags grid;
    bool ambiguity_kind = false;
    std::string out = "out";

    int run() const {
        const fs::path dir = prepare_outdir(out);
        const Signal f = sig.resolve();
        const GaborField field = ambiguity_kind ? ambiguity(f, grid.grid()) : dgt(f, grid.grid());
        write_field(field, dir / "field.tfc");
        write_heatmap_svg(field.abs(), field.grid, dir / "field.svg");
        write_manifest(dir, {{"subcommand", "transform"},
                             {"signal", sig.manifest()},
                             {"grid", grid.manifest()},
                             {"ambiguity", ambiguity_kind},
                             {"outputs", {"field.tfc", "field.svg"}}});
        return 0;
    }
};

// ------------------------------------------------------------------ cheeger

struct CheegerCmd {
    std::string in;
    SignalFlags sig;
    GridFlags grid;
    double p = 1.0;
    double radius = 0.0; // 0: full grid
    double tol = 1e-8;
    std::uint64_t seed = 42;
    std::string out = "out";

    int run() const {
        const fs::path dir = prepare_outdir(out);
        WeightField w;
        if (!in.empty() && probe_field_kind(in) == FieldKind::weight) {
            w = read_weight_field(in);
        } else if (!in.empty()) {
            w = weight_field(read_field(in), p);
        } else {
            w = weight_field(dgt(sig.resolve(), grid.grid()), p);
        }
        std::optional<Mask> mask;
        if (radius > 0.0) mask = disc_mask(w.grid, radius);
        const CheegerEstimate est = estimate_cheeger(w, mask ? &*mask : nullptr, tol, seed);
        std::ofstream(dir / "cheeger.json") << cheeger_estimate_json(est) << "\n";
        write_manifest(dir, {{"subcommand", "cheeger"},
                             {"in", in},
                             {"signal", sig.manifest()},
                             {"grid", grid.manifest()},
                             {"p", w.p},
                             {"radius", radius},
                             {"tol", tol},
                             {"seed", seed},
                             {"outputs", {"cheeger.json"}}});
        return 0;
    }
};

// ---------------------------------------------------------------- partition

struct PartitionCmd {
    std::string in;
    SignalFlags sig;
    GridFlags grid;
    double p = 1.0;
    double tau = 0.05;
    int max_depth = 6;
    int min_vertices = 64;
    std::uint64_t seed = 42;
    std::string out = "out";

    int run() const {
        const fs::path dir = prepare_outdir(out);
        const GaborField field = !in.empty() ? read_field(in) : dgt(sig.resolve(), grid.grid());
        const WeightField w = weight_field(field, p);
        const PartitionReport rep =
            recursive_partition(w, field, tau, max_depth, min_vertices, seed);
        std::ofstream(dir / "partition.json") << partition_report_json(rep) << "\n";
        write_partition_svg(field.abs(), field.grid, rep.leaves, dir / "partition.svg");
        write_manifest(dir, {{"subcommand", "partition"},
                             {"in", in},
                             {"signal", sig.manifest()},
                             {"grid", grid.manifest()},
                             {"p", p},
                             {"tau", tau},
                             {"max_depth", max_depth},
                             {"min_vertices", min_vertices},
                             {"seed", seed},
                             {"outputs", {"partition.json", "partition.svg"}}});
        return 0;
    }
};

// ---------------------------------------------------------------- stability

struct StabilityCmd {
    SignalFlags sig_f;
    SignalFlags sig_g;
    GridFlags grid;
    double p = 1.0;
    std::string q = "inf";
    std::uint64_t seed = 42;
    std::string out = "out";

    int run() const {
        const fs::path dir = prepare_outdir(out);
        const DNormParams params(p, parse_q(q));
        const Signal f = sig_f.resolve();
        const Signal g = sig_g.resolve();
        const TfGrid tf = grid.grid();
        const GaborField F1 = dgt(f, tf);
        const GaborField F2 = dgt(g, tf);
        const CheegerEstimate est = estimate_cheeger(weight_field(F1, p), nullptr, 1e-8, seed);

        ExperimentRow row;
        row.a = 0.0; // not an instability-sweep row
        row.h_cal = est.h_calibrated;
        row.mismatch = d_norm(F1.abs() - F2.abs(), tf, params);
        row.distance = phase_distance(F1, F2, p).distance;
        row.bound_rhs = (1.0 + 1.0 / row.h_cal) * row.mismatch;
        row.ratio = row.distance / row.bound_rhs;
        write_rows_csv({row}, dir / "stability.csv");
        write_manifest(dir, {{"subcommand", "stability"},
                             {"f", sig_f.manifest()},
                             {"g", sig_g.manifest()},
                             {"grid", grid.manifest()},
                             {"p", p},
                             {"q", q},
                             {"seed", seed},
                             {"outputs", {"stability.csv"}}});
        return 0;
    }
};

// -------------------------------------------------------------------- sweep

struct SweepCmd {
    std::string a_list = "1,1.5,2,2.5,3";
    double p = 1.0;
    std::string q = "inf";
    int n = 512;
    double dt = 1.0 / 16.0;
    GridFlags grid{1.0 / 8.0, 8.0, 8.0};
    std::uint64_t seed = 42;
    std::string out = "out";

    int run() const {
        const fs::path dir = prepare_outdir(out);
        ExperimentConfig cfg;
        cfg.n = n;
        cfg.dt = dt;
        cfg.grid = grid.grid();
        cfg.seed = seed;
        const std::vector<double> as = parse_list(a_list);
        const std::vector<ExperimentRow> rows =
            instability_experiment(as, DNormParams(p, parse_q(q)), cfg);
        write_rows_csv(rows, dir / "sweep.csv");

        LineSeries hs{"h_cal", {}, {}}, ratios{"ratio", {}, {}};
        for (const ExperimentRow& r : rows) {
            hs.x.push_back(r.a);
            hs.y.push_back(r.h_cal);
            ratios.x.push_back(r.a);
            ratios.y.push_back(r.ratio);
        }
        write_line_chart_svg({hs}, "a", "calibrated h", dir / "sweep_h.svg", true);
        write_line_chart_svg({ratios}, "a", "distance / ((1+1/h) mismatch)",
                             dir / "sweep_ratio.svg", false);
        write_manifest(dir, {{"subcommand", "sweep"},
                             {"a_list", a_list},
                             {"p", p},
                             {"q", q},
                             {"n", n},
                             {"dt", dt},
                             {"grid", grid.manifest()},
                             {"seed", seed},
                             {"outputs", {"sweep.csv", "sweep_h.svg", "sweep_ratio.svg"}}});
        return 0;
    }
};

// -------------------------------------------------------------- reconstruct

struct ReconstructCmd {
    std::string in;
    std::string reg = "threshold";
    double tau_reg = 1e-8;
    std::string out = "out";

    int run() const {
        const fs::path dir = prepare_outdir(out);
        Eigen::ArrayXXd S;
        TfGrid grid;
        if (probe_field_kind(in) == FieldKind::weight) {
            const WeightField w = read_weight_field(in);
            if (w.p != 2.0)
                throw std::runtime_error("reconstruct expects spectrogram weights with p = 2");
            S = w.w;
            grid = w.grid;
        } else {
            const GaborField f = read_field(in);
            S = f.values.array().abs2();
            grid = f.grid;
        }
        ReconstructionConfig cfg;
        cfg.regularization =
            reg == "tikhonov" ? RegularizationKind::tikhonov : RegularizationKind::threshold;
        cfg.tau_reg = tau_reg;
        const Signal rec = reconstruct_from_spectrogram(S, grid, cfg);
        save_signal_csv(rec, dir / "signal.csv");
        write_manifest(dir, {{"subcommand", "reconstruct"},
                             {"in", in},
                             {"regularization", reg},
                             {"tau_reg", tau_reg},
                             {"outputs", {"signal.csv"}}});
        return 0;
    }
};

// ----------------------------------------------------------------- diagnose

struct DiagnoseCmd {
    SignalFlags sig;
    GridFlags grid{1.0 / 16.0, 4.5, 4.5};
    std::string radius_list = "1,2,3,4";
    double r = 1.5;
    std::string out = "out";

    int run() const {
        const fs::path dir = prepare_outdir(out);
        const Signal f = sig.resolve();
        GaborField V = dgt(f, grid.grid());
        const double cr = cr_residual(V);
        const CenterShift shift = center_field(V);

        ordered_json report;
        report["cr_residual"] = cr;
        report["center_shift"] = {{"di", shift.di}, {"dj", shift.dj}};
        ordered_json zeros = ordered_json::array();
        ordered_json growth = ordered_json::array();
        for (double R : parse_list(radius_list)) {
            const int count = count_zeros(V, R);
            zeros.push_back(
                {{"R", R}, {"count", count}, {"jensen_bound", 2.0 * M_PI / std::log(2.0) * R * R}});
            const LogDerivativeNorm ld = log_derivative_norm(V, r, R);
            growth.push_back({{"R", R}, {"norm", ld.value}, {"ratio_to_R5", ld.growth_ratio}});
        }
        report["zero_counts"] = zeros;
        report["log_derivative"] = {{"r", r}, {"by_radius", growth}};
        std::ofstream(dir / "diagnose.json") << report.dump(2) << "\n";
        write_manifest(dir, {{"subcommand", "diagnose"},
                             {"signal", sig.manifest()},
                             {"grid", grid.manifest()},
                             {"radius_list", radius_list},
                             {"r", r},
                             {"outputs", {"diagnose.json"}}});
        return 0;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tfstab: Gabor-transform phase-retrieval stability toolkit"};
    app.require_subcommand(1);

    TransformCmd transform;
    auto* t = app.add_subcommand("transform", "signal -> Gabor field container + SVG heatmap");
    transform.sig.attach(t);
    transform.grid.attach(t);
    t->add_flag("--ambiguity", transform.ambiguity_kind, "compute the ambiguity function instead");
    t->add_option("-o,--out", transform.out, "output directory");

    CheegerCmd cheeger;
    auto* c = app.add_subcommand("cheeger", "field or signal -> Cheeger estimate JSON");
    c->add_option("--in", cheeger.in, "field container (complex or weights)");
    cheeger.sig.attach(c);
    cheeger.grid.attach(c);
    c->add_option("--p", cheeger.p, "weight exponent");
    c->add_option("--radius,-R", cheeger.radius, "disc mask radius (0 = full grid)");
    c->add_option("--tol", cheeger.tol, "eigensolver tolerance");
    c->add_option("--seed", cheeger.seed, "start-vector seed");
    c->add_option("-o,--out", cheeger.out, "output directory");

    PartitionCmd partition;
    auto* pa = app.add_subcommand("partition", "field -> recursive partition JSON + SVG overlay");
    pa->add_option("--in", partition.in, "complex field container");
    partition.sig.attach(pa);
    partition.grid.attach(pa);
    pa->add_option("--p", partition.p, "weight exponent");
    pa->add_option("--tau", partition.tau, "calibrated Cheeger stopping threshold");
    pa->add_option("--max-depth", partition.max_depth, "recursion depth limit");
    pa->add_option("--min-vertices", partition.min_vertices, "smallest splittable region");
    pa->add_option("--seed", partition.seed, "start-vector seed");
    pa->add_option("-o,--out", partition.out, "output directory");

    StabilityCmd stability;
    auto* st = app.add_subcommand("stability", "two signals -> stability row CSV");
    stability.sig_f.attach(st, "f");
    stability.sig_g.attach(st, "g");
    stability.grid.attach(st);
    st->add_option("--p", stability.p, "norm exponent p");
    st->add_option("--q", stability.q, "norm exponent q (number or 'inf')");
    st->add_option("--seed", stability.seed, "start-vector seed");
    st->add_option("-o,--out", stability.out, "output directory");

    SweepCmd sweep;
    auto* sw = app.add_subcommand("sweep", "two-gaussian instability sweep -> CSV + charts");
    sw->add_option("--a-list", sweep.a_list, "comma-separated separations");
    sw->add_option("--p", sweep.p, "norm exponent p");
    sw->add_option("--q", sweep.q, "norm exponent q (number or 'inf')");
    sw->add_option("--n", sweep.n, "synthetic sample count");
    sw->add_option("--dt", sweep.dt, "synthetic sample spacing");
    sweep.grid.attach(sw);
    sw->add_option("--seed", sweep.seed, "start-vector seed");
    sw->add_option("-o,--out", sweep.out, "output directory");

    ReconstructCmd reconstruct;
    auto* rc = app.add_subcommand("reconstruct", "spectrogram container -> signal CSV");
    rc->add_option("--in", reconstruct.in, "spectrogram weights (p=2) or complex field")->required();
    rc->add_option("--reg", reconstruct.reg, "regularization: threshold | tikhonov");
    rc->add_option("--tau-reg", reconstruct.tau_reg, "regularization cutoff (relative)");
    rc->add_option("-o,--out", reconstruct.out, "output directory");

    DiagnoseCmd diagnose;
    auto* dg =
        app.add_subcommand("diagnose", "holomorphy residual, zero counts, log-derivative growth");
    diagnose.sig.attach(dg);
    diagnose.grid.attach(dg);
    dg->add_option("--radius-list", diagnose.radius_list, "disc radii for the reports");
    dg->add_option("--r", diagnose.r, "log-derivative exponent in [1,2)");
    dg->add_option("-o,--out", diagnose.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (t->parsed()) return transform.run();
        if (c->parsed()) return cheeger.run();
        if (pa->parsed()) return partition.run();
        if (st->parsed()) return stability.run();
        if (sw->parsed()) return sweep.run();
        if (rc->parsed()) return reconstruct.run();
        if (dg->parsed()) return diagnose.run();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
