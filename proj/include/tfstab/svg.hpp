#pragma once

#include "tfstab/grid.hpp"
#include "tfstab/partition.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace tfstab {

/// Log-magnitude grayscale heatmap with a fixed 60 dB floor. Grids wider
/// than 256 cells per axis are bin-averaged down before drawing.
void write_heatmap_svg(const Eigen::ArrayXXd& magnitudes, const TfGrid& grid,
                       const std::filesystem::path& path, double floor_db = 60.0);

/// Heatmap with colored leaf-region boundaries on top.
void write_partition_svg(const Eigen::ArrayXXd& magnitudes, const TfGrid& grid,
                         const std::vector<Region>& leaves, const std::filesystem::path& path,
                         double floor_db = 60.0);

struct LineSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Simple line chart (linear or log-y) for experiment sweeps.
void write_line_chart_svg(const std::vector<LineSeries>& series, const std::string& x_label,
                          const std::string& y_label, const std::filesystem::path& path,
                          bool log_y = false);

} // namespace tfstab
