#include "tfstab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tfstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// 1-D squared-distance lower envelope (Felzenszwalb-Huttenlocher).
void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n, 0);
    std::vector<double> z(n + 1, 0.0);
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (f[v[0]] == kInf) { // no finite site yet
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        if (f[v[0]] == kInf) {
            d[q] = kInf;
            continue;
        }
        while (z[k + 1] < q) ++k;
        d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
    }
}

} // namespace

Eigen::ArrayXXd distance_transform(const Mask& inside) {
    const int nx = static_cast<int>(inside.rows());
    const int ny = static_cast<int>(inside.cols());
    Eigen::ArrayXXd sq(nx, ny);

    // pass 1: along i (per column), sites at outside cells
    std::vector<double> f(nx), d(nx);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) f[i] = inside(i, j) ? kInf : 0.0;
        edt_1d(f, d);
        for (int i = 0; i < nx; ++i) sq(i, j) = d[i];
    }
    // pass 2: along j (per row)
    std::vector<double> g(ny), e(ny);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) g[j] = sq(i, j);
        edt_1d(g, e);
        for (int j = 0; j < ny; ++j) sq(i, j) = e[j];
    }
    // cells beyond the border count as outside
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double b = std::min(std::min(i + 1, nx - i), std::min(j + 1, ny - j));
            sq(i, j) = std::min(sq(i, j), b * b);
        }
    return sq.sqrt();
}

RegionStats region_stats(const WeightField& w, const GaborField& F, const Mask& mask) {
    const TfGrid& g = w.grid;
    if (!F.grid.same_geometry(g)) throw std::invalid_argument("region_stats: grid mismatch");
    if (mask.rows() != g.nx || mask.cols() != g.ny)
        throw std::invalid_argument("region_stats: mask shape mismatch");

    const Eigen::ArrayXXd absF = F.abs();
    double fmax = 0.0, mass = 0.0;
    bool any = false;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            if (!mask(i, j)) continue;
            any = true;
            fmax = std::max(fmax, absF(i, j));
            mass += w.w(i, j);
        }
    if (!any) throw std::invalid_argument("region_stats: empty mask");
    if (!(fmax > 0.0)) throw std::invalid_argument("region_stats: field vanishes on the region");

    RegionStats out;
    out.kappa = std::pow(mass * g.cell_area(), 1.0 / w.p) / fmax;

    Mask half = mask && (absF >= 0.5 * fmax);
    const Eigen::ArrayXXd dist = distance_transform(half);
    double rstar = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            if (half(i, j)) rstar = std::max(rstar, dist(i, j));
    out.delta_tilde = std::min(rstar * g.delta, 1.0);
    return out;
}

namespace {

struct BuildState {
    const WeightField& w;
    const GaborField& F;
    double tau;
    int max_depth;
    int min_vertices;
    std::uint64_t seed;
    PartitionReport report;
};

double mask_volume(const WeightField& w, const Mask& mask) {
    double v = 0.0;
    for (int i = 0; i < w.grid.nx; ++i)
        for (int j = 0; j < w.grid.ny; ++j)
            if (mask(i, j)) v += w.w(i, j);
    return v * w.grid.cell_area();
}

int emit_node(BuildState& st, int parent) {
    st.report.parent.push_back(parent);
    st.report.children.push_back({-1, -1});
    return static_cast<int>(st.report.parent.size()) - 1;
}

void emit_leaf(BuildState& st, int node, Mask mask, int depth, const CheegerEstimate* est,
               bool indivisible, bool degenerate) {
    Region leaf;
    leaf.depth = depth;
    leaf.indivisible = indivisible;
    leaf.degenerate = degenerate;
    leaf.volume = mask_volume(st.w, mask);
    if (est) leaf.h_est = *est;
    if (!degenerate) {
        const RegionStats rs = region_stats(st.w, st.F, mask);
        leaf.kappa = rs.kappa;
        leaf.delta_tilde = rs.delta_tilde;
    }
    leaf.mask = std::move(mask);
    st.report.leaf_node.push_back(node);
    st.report.leaves.push_back(std::move(leaf));
}

void partition_node(BuildState& st, const Mask& mask, int depth, int node) {
    int nvert = 0;
    for (int i = 0; i < st.w.grid.nx; ++i)
        for (int j = 0; j < st.w.grid.ny; ++j) nvert += mask(i, j) ? 1 : 0;

    CheegerEstimate est;
    WeightedGridGraph graph;
    try {
        est = estimate_cheeger(st.w, &mask, 1e-8, st.seed, &graph);
    } catch (const std::exception&) {
        emit_leaf(st, node, mask, depth, nullptr, true, true);
        return;
    }

    const bool splittable =
        est.h_calibrated < st.tau && depth < st.max_depth && nvert >= st.min_vertices;
    if (!splittable) {
        emit_leaf(st, node, mask, depth, &est, est.h_calibrated < st.tau, false);
        return;
    }

    Mask side = Mask::Constant(st.w.grid.nx, st.w.grid.ny, false);
    for (int u = 0; u < graph.num_vertices(); ++u)
        if (est.cut.subset[u]) side(graph.vertices[u].i, graph.vertices[u].j) = true;
    Mask a = mask && side;
    Mask b = mask && !side;
    if (!a.any() || !b.any()) { // cut failed to split the region
        emit_leaf(st, node, mask, depth, &est, true, false);
        return;
    }

    if (mask_volume(st.w, a) < mask_volume(st.w, b)) std::swap(a, b);
    const int ca = emit_node(st, node);
    partition_node(st, a, depth + 1, ca);
    const int cb = emit_node(st, node);
    partition_node(st, b, depth + 1, cb);
    st.report.children[node] = {ca, cb};
}

std::vector<InterLeafCut> inter_leaf_cuts(const WeightField& w, const std::vector<Region>& leaves) {
    const TfGrid& g = w.grid;
    Eigen::ArrayXXi label = Eigen::ArrayXXi::Constant(g.nx, g.ny, -1);
    for (std::size_t k = 0; k < leaves.size(); ++k)
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                if (leaves[k].mask(i, j)) label(i, j) = static_cast<int>(k);

    std::vector<std::vector<double>> acc(leaves.size(), std::vector<double>(leaves.size(), 0.0));
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const int la = label(i, j);
            if (la < 0) continue;
            if (i + 1 < g.nx && label(i + 1, j) >= 0 && label(i + 1, j) != la) {
                const int lb = label(i + 1, j);
                acc[std::min(la, lb)][std::max(la, lb)] += 0.5 * (w.w(i, j) + w.w(i + 1, j));
            }
            if (j + 1 < g.ny && label(i, j + 1) >= 0 && label(i, j + 1) != la) {
                const int lb = label(i, j + 1);
                acc[std::min(la, lb)][std::max(la, lb)] += 0.5 * (w.w(i, j) + w.w(i, j + 1));
            }
        }
    std::vector<InterLeafCut> cuts;
    for (std::size_t a = 0; a < leaves.size(); ++a)
        for (std::size_t b = a + 1; b < leaves.size(); ++b)
            if (acc[a][b] > 0.0)
                cuts.push_back({static_cast<int>(a), static_cast<int>(b), acc[a][b]});
    return cuts;
}

} // namespace

PartitionReport recursive_partition(const WeightField& w, const GaborField& F, double tau,
                                    int max_depth, int min_vertices, std::uint64_t seed) {
    if (!(tau >= 0.0)) throw std::invalid_argument("recursive_partition: tau must be >= 0");
    if (max_depth < 1) throw std::invalid_argument("recursive_partition: max_depth must be >= 1");
    if (!F.grid.same_geometry(w.grid))
        throw std::invalid_argument("recursive_partition: grid mismatch");

    BuildState st{w, F, tau, max_depth, min_vertices, seed, {}};
    st.report.tau = tau;
    st.report.max_depth = max_depth;
    st.report.min_vertices = min_vertices;
    st.report.p = w.p;

    const int root = emit_node(st, -1);
    partition_node(st, full_mask(w.grid), 0, root);

    st.report.inter_leaf_cuts = inter_leaf_cuts(w, st.report.leaves);
    const StabilityBound b = stability_bound(st.report, w.p);
    st.report.bound = b.bound;
    st.report.bound_infinite = b.infinite;
    return st.report;
}

StabilityBound stability_bound(const PartitionReport& report, double p) {
    if (report.leaves.empty()) throw std::invalid_argument("stability_bound: no leaves");
    StabilityBound out;
    for (const Region& leaf : report.leaves) {
        double factor;
        if (leaf.degenerate) {
            factor = 0.0; // zero-mass region contributes nothing
        } else if (!(leaf.h_est.h_calibrated > 0.0)) {
            factor = std::numeric_limits<double>::infinity();
            out.infinite = true;
        } else {
            factor = (1.0 + 1.0 / leaf.h_est.h_calibrated) *
                     (1.0 + std::pow(leaf.kappa, p) / (leaf.delta_tilde * leaf.delta_tilde));
        }
        out.leaf_factors.push_back(factor);
        out.bound = std::max(out.bound, factor);
    }
    return out;
}

} // namespace tfstab
