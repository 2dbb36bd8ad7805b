#pragma once

#include "tfstab/graph.hpp"
#include "tfstab/grid.hpp"

#include <Eigen/Dense>

namespace tfstab {

/// Matrix-free normalized graph Laplacian L = I - D^{-1/2} W D^{-1/2} on the
/// non-isolated vertex set of a WeightedGridGraph. Applying L costs O(edges);
/// eigenvalues lie in [0, 2] and D^{1/2} 1 spans the kernel on a connected
/// graph.
class NormalizedLaplacian {
public:
    explicit NormalizedLaplacian(const WeightedGridGraph& g);

    int size() const { return static_cast<int>(local_to_graph_.size()); }
    void apply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

    /// D^{1/2} 1, normalized: the known eigenvector of eigenvalue 0.
    const Eigen::VectorXd& null_vector() const { return null_vector_; }
    /// Maps local (non-isolated) indices back to graph vertex ids.
    const std::vector<int>& vertex_ids() const { return local_to_graph_; }

private:
    std::vector<int> local_to_graph_;
    std::vector<int> adj_offset_;
    std::vector<int> adj_vertex_; // local ids
    std::vector<double> adj_weight_;
    Eigen::VectorXd dinv_sqrt_;
    Eigen::VectorXd null_vector_;
};

struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector;
    int iterations = 0;
    double residual = 0.0;
};

/// Second-smallest eigenpair of the normalized Laplacian, computed by a
/// locally optimal preconditioned CG iteration with the kernel vector
/// deflated explicitly at every step. The start vector comes from a fixed
/// seed so runs reproduce bitwise. max_iter < 0 means 10 * n.
/// Throws (with the last residual) on non-convergence.
EigenPair fiedler_vector(const NormalizedLaplacian& L, double tol = 1e-8, int max_iter = -1,
                         std::uint64_t seed = 42);

struct CheegerEstimate {
    double h_star = 0.0;       // achieved ratio of the best threshold cut
    double h_lower = 0.0;      // (h_star/2)^2; [h_lower, h_star] brackets h_G
    double h_calibrated = 0.0; // h_star / delta, comparable across lattices
    CutResult cut;
    double eigen_value = 0.0;
    int iterations = 0;
    int n_vertices = 0;
};

/// Sweep all thresholds between consecutive sorted entries of v (one entry
/// per non-isolated vertex, Laplacian ordering) and return the cut of minimal
/// Cheeger ratio. Ties prefer the smaller min-volume side, then the lower
/// threshold. Isolated vertices are reattached to the side of their nearest
/// non-isolated neighbor before the reported ratio is evaluated.
CheegerEstimate threshold_cut(const WeightedGridGraph& g, const Eigen::VectorXd& v);

/// Full pipeline: build_graph -> normalized_laplacian -> fiedler_vector ->
/// threshold_cut, with the certificate h_G <= h* <= 2 sqrt(h_G) attached.
/// A disconnected graph short-circuits to h* = 0 with a separating component
/// as the cut. graph_out, when given, receives the constructed graph (the
/// cut subset indexes its vertices).
CheegerEstimate estimate_cheeger(const WeightField& w, const Mask* domain_mask = nullptr,
                                 double tol = 1e-8, std::uint64_t seed = 42,
                                 WeightedGridGraph* graph_out = nullptr);

} // namespace tfstab
