#pragma once

#include "tfstab/grid.hpp"

#include <vector>

namespace tfstab {

struct GridVertex {
    int i = 0;
    int j = 0;
    double x = 0.0;
    double y = 0.0;
};

/// Weighted 4-neighbor grid graph over the masked cells of a WeightField.
/// An edge joins lattice neighbors z, z' with weight (w(z) + w(z'))/2; zero
/// weights produce no edge. Vertices whose degree falls below
/// 1e-14 * max_degree are kept but flagged isolated; spectral routines skip
/// them and reattach them to their nearest live neighbor when reporting cuts.
struct WeightedGridGraph {
    std::vector<GridVertex> vertices;
    std::vector<int> cell_to_vertex; // nx*ny, -1 where masked out
    std::vector<int> adj_offset;     // CSR over vertices
    std::vector<int> adj_vertex;
    std::vector<double> adj_weight;
    std::vector<double> degree;
    std::vector<bool> isolated;
    double total_volume = 0.0;
    int nx = 0;
    int ny = 0;
    double delta = 0.0;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_nonisolated() const;
    int vertex_at(int i, int j) const { return cell_to_vertex[static_cast<std::size_t>(i) * ny + j]; }
};

WeightedGridGraph build_graph(const WeightField& w, const Mask* domain_mask = nullptr);

struct CutResult {
    std::vector<bool> subset;
    double cut_weight = 0.0;
    double vol_in = 0.0;
    double vol_out = 0.0;
    double ratio = 0.0;
};

/// Cheeger ratio cut(C) / min(vol(C), vol(V \ C)) of a nonempty proper subset.
CutResult cheeger_ratio(const WeightedGridGraph& g, const std::vector<bool>& subset);

/// Exact minimizer over all nonempty proper subsets (<= 22 vertices). Ties
/// break toward the lexicographically smallest vertex bitset.
CutResult brute_force_cheeger(const WeightedGridGraph& g);

/// Connected-component label per vertex over the non-isolated subgraph;
/// isolated vertices get -1. Second value: number of components.
std::pair<std::vector<int>, int> nonisolated_components(const WeightedGridGraph& g);

} // namespace tfstab
