#pragma once

#include "tfstab/grid.hpp"
#include "tfstab/spectral.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace tfstab {

/// Exact Euclidean distance transform in lattice units: distance from each
/// cell center to the nearest cell outside the set (cells beyond the grid
/// border count as outside).
Eigen::ArrayXXd distance_transform(const Mask& inside);

struct RegionStats {
    double kappa = 0.0;       // ||F||_{L^p(mask)} / ||F||_{L^inf(mask)}
    double delta_tilde = 0.0; // min{ largest half-max inscribed disc radius, 1 }
};

/// Concentration and variation statistics of a masked region. The half-max
/// disc radius comes from the distance transform of
/// { |F| >= max|F| / 2 } intersected with the mask.
RegionStats region_stats(const WeightField& w, const GaborField& F, const Mask& mask);

struct Region {
    Mask mask;
    CheegerEstimate h_est;
    double kappa = 0.0;
    double delta_tilde = 0.0;
    double volume = 0.0; // sum of w * delta^2 over the mask
    int depth = 0;
    bool indivisible = false; // stopped by size/depth limits with h below tau
    bool degenerate = false;  // zero weights; no estimate available
};

struct InterLeafCut {
    int leaf_a = 0;
    int leaf_b = 0;
    double weight = 0.0; // total graph edge weight crossing between the leaves
};

struct PartitionReport {
    std::vector<Region> leaves;
    std::vector<int> parent;            // tree structure over emitted nodes
    std::vector<std::array<int, 2>> children; // -1 -1 for leaves
    std::vector<int> leaf_node;         // node index of each leaf
    double tau = 0.0;
    int max_depth = 0;
    int min_vertices = 0;
    double p = 1.0;
    double bound = 0.0; // aggregate stability bound B
    bool bound_infinite = false;
    std::vector<InterLeafCut> inter_leaf_cuts;
};

/// Depth-first recursive spectral bipartitioning: a region splits along its
/// threshold cut while the calibrated Cheeger estimate stays below tau and
/// the region is large enough; children recurse larger volume first.
PartitionReport recursive_partition(const WeightField& w, const GaborField& F, double tau = 0.05,
                                    int max_depth = 6, int min_vertices = 64,
                                    std::uint64_t seed = 42);

struct StabilityBound {
    double bound = 0.0;
    bool infinite = false;
    std::vector<double> leaf_factors;
};

/// B = max over leaves of (1 + 1/h) (1 + kappa^p / delta_tilde^2), with h the
/// calibrated spectral upper estimate. A leaf with h = 0 makes B infinite.
StabilityBound stability_bound(const PartitionReport& report, double p);

} // namespace tfstab
