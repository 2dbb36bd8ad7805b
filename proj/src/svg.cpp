#include "tfstab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tfstab {

namespace {

constexpr int kMaxCells = 256; // downsample limit per axis
constexpr double kPixel = 3.0; // svg units per drawn cell

struct Downsampled {
    Eigen::ArrayXXd values;
    int bin = 1;
};

Downsampled downsample(const Eigen::ArrayXXd& a) {
    Downsampled d;
    const int nx = static_cast<int>(a.rows()), ny = static_cast<int>(a.cols());
    d.bin = std::max(1, (std::max(nx, ny) + kMaxCells - 1) / kMaxCells);
    const int mx = (nx + d.bin - 1) / d.bin, my = (ny + d.bin - 1) / d.bin;
    d.values.setZero(mx, my);
    Eigen::ArrayXXd count = Eigen::ArrayXXd::Zero(mx, my);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            d.values(i / d.bin, j / d.bin) += a(i, j);
            count(i / d.bin, j / d.bin) += 1.0;
        }
    d.values /= count;
    return d;
}

std::string gray(double level01) {
    const int v = std::clamp(static_cast<int>(std::lround(level01 * 255.0)), 0, 255);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", v, v, v);
    return buf;
}

/// map magnitudes to [0,1] via log scale with a dB floor
Eigen::ArrayXXd db_scale(const Eigen::ArrayXXd& m, double floor_db) {
    const double peak = m.maxCoeff();
    Eigen::ArrayXXd out(m.rows(), m.cols());
    if (!(peak > 0.0)) {
        out.setZero();
        return out;
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double db = 20.0 * std::log10(std::max(m(i, j), 1e-300) / peak);
            out(i, j) = std::clamp(1.0 + db / floor_db, 0.0, 1.0);
        }
    return out;
}

void emit_heatmap(std::ofstream& out, const Eigen::ArrayXXd& level, double cell) {
    // x axis (rows) drawn horizontally, y axis (cols) vertically with y up
    const int mx = static_cast<int>(level.rows()), my = static_cast<int>(level.cols());
    for (int i = 0; i < mx; ++i)
        for (int j = 0; j < my; ++j) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                          i * cell, (my - 1 - j) * cell, cell + 0.05, cell + 0.05,
                          gray(level(i, j)).c_str());
            out << buf;
        }
}

const char* kPalette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
                          "#ff7f00", "#f5e626", "#a65628", "#f781bf"};

} // namespace

void write_heatmap_svg(const Eigen::ArrayXXd& magnitudes, const TfGrid& grid,
                       const std::filesystem::path& path, double floor_db) {
    if (magnitudes.rows() != grid.nx || magnitudes.cols() != grid.ny)
        throw std::invalid_argument("write_heatmap_svg: shape mismatch");
    const Downsampled d = downsample(magnitudes);
    const Eigen::ArrayXXd level = db_scale(d.values, floor_db);
    const double w = level.rows() * kPixel, h = level.cols() * kPixel;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    emit_heatmap(out, level, kPixel);
    out << "</svg>\n";
}

void write_partition_svg(const Eigen::ArrayXXd& magnitudes, const TfGrid& grid,
                         const std::vector<Region>& leaves, const std::filesystem::path& path,
                         double floor_db) {
    if (magnitudes.rows() != grid.nx || magnitudes.cols() != grid.ny)
        throw std::invalid_argument("write_partition_svg: shape mismatch");
    const Downsampled d = downsample(magnitudes);
    const Eigen::ArrayXXd level = db_scale(d.values, floor_db);
    const double w = level.rows() * kPixel, h = level.cols() * kPixel;
    const int my = static_cast<int>(level.cols());

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    emit_heatmap(out, level, kPixel);

    // boundary cells: inside a leaf, with a 4-neighbor outside it
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        const Mask& m = leaves[k].mask;
        const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
        for (int i = 0; i < grid.nx; ++i)
            for (int j = 0; j < grid.ny; ++j) {
                if (!m(i, j)) continue;
                const bool boundary = (i == 0 || !m(i - 1, j)) || (i + 1 == grid.nx || !m(i + 1, j)) ||
                                      (j == 0 || !m(i, j - 1)) || (j + 1 == grid.ny || !m(i, j + 1));
                if (!boundary) continue;
                char buf[200];
                std::snprintf(buf, sizeof buf,
                              "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                              "fill=\"%s\" fill-opacity=\"0.8\"/>\n",
                              (i / d.bin) * kPixel, (my - 1 - j / d.bin) * kPixel, kPixel, kPixel,
                              color);
                out << buf;
            }
    }
    out << "</svg>\n";
}

void write_line_chart_svg(const std::vector<LineSeries>& series, const std::string& x_label,
                          const std::string& y_label, const std::filesystem::path& path,
                          bool log_y) {
    const double width = 480, height = 320, ml = 60, mb = 40, mt = 16, mr = 16;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            const double y = log_y ? std::log10(std::max(s.y[k], 1e-300)) : s.y[k];
            xmin = std::min(xmin, s.x[k]);
            xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double yv) {
        const double y = log_y ? std::log10(std::max(yv, 1e-300)) : yv;
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mb - mt);
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 8
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    out << "<text x=\"14\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
        << (mt + height - mb) / 2 << ")\">" << y_label << (log_y ? " (log10)" : "") << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof kPalette / sizeof *kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[s].x.size(); ++k)
            out << px(series[s].x[k]) << "," << py(series[s].y[k]) << " ";
        out << "\"/>\n";
        for (std::size_t k = 0; k < series[s].x.size(); ++k)
            out << "<circle cx=\"" << px(series[s].x[k]) << "\" cy=\"" << py(series[s].y[k])
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << width - mr - 4 << "\" y=\"" << mt + 14 * (s + 1)
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << series[s].label
            << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace tfstab
