#include "tfstab/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace tfstab {

namespace {
constexpr double kIsolationFloor = 1e-14;
}

int WeightedGridGraph::num_nonisolated() const {
    int n = 0;
    for (bool b : isolated) n += b ? 0 : 1;
    return n;
}

WeightedGridGraph build_graph(const WeightField& w, const Mask* domain_mask) {
    const TfGrid& g = w.grid;
    if (domain_mask && (domain_mask->rows() != g.nx || domain_mask->cols() != g.ny))
        throw std::invalid_argument("build_graph: mask shape mismatch");

    WeightedGridGraph out;
    out.nx = g.nx;
    out.ny = g.ny;
    out.delta = g.delta;
    out.cell_to_vertex.assign(static_cast<std::size_t>(g.nx) * g.ny, -1);

    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            if (domain_mask && !(*domain_mask)(i, j)) continue;
            out.cell_to_vertex[static_cast<std::size_t>(i) * g.ny + j] = out.num_vertices();
            out.vertices.push_back({i, j, g.x(i), g.y(j)});
        }
    if (out.vertices.empty()) throw std::invalid_argument("build_graph: empty mask");

    const int n = out.num_vertices();
    out.degree.assign(n, 0.0);

    // two passes over the 4-neighbor stencil: count, then fill CSR
    auto weight_of = [&](const GridVertex& a, const GridVertex& b) {
        return 0.5 * (w.w(a.i, a.j) + w.w(b.i, b.j));
    };
    static constexpr int kDi[4] = {1, -1, 0, 0};
    static constexpr int kDj[4] = {0, 0, 1, -1};

    std::vector<int> count(n, 0);
    for (int u = 0; u < n; ++u) {
        const GridVertex& a = out.vertices[u];
        for (int d = 0; d < 4; ++d) {
            const int i2 = a.i + kDi[d], j2 = a.j + kDj[d];
            if (i2 < 0 || i2 >= g.nx || j2 < 0 || j2 >= g.ny) continue;
            const int v = out.vertex_at(i2, j2);
            if (v < 0) continue;
            if (weight_of(a, out.vertices[v]) > 0.0) ++count[u];
        }
    }
    out.adj_offset.assign(n + 1, 0);
    for (int u = 0; u < n; ++u) out.adj_offset[u + 1] = out.adj_offset[u] + count[u];
    out.adj_vertex.assign(out.adj_offset[n], 0);
    out.adj_weight.assign(out.adj_offset[n], 0.0);

    std::vector<int> fill(out.adj_offset.begin(), out.adj_offset.end() - 1);
    for (int u = 0; u < n; ++u) {
        const GridVertex& a = out.vertices[u];
        for (int d = 0; d < 4; ++d) {
            const int i2 = a.i + kDi[d], j2 = a.j + kDj[d];
            if (i2 < 0 || i2 >= g.nx || j2 < 0 || j2 >= g.ny) continue;
            const int v = out.vertex_at(i2, j2);
            if (v < 0) continue;
            const double ew = weight_of(a, out.vertices[v]);
            if (!(ew > 0.0)) continue;
            out.adj_vertex[fill[u]] = v;
            out.adj_weight[fill[u]] = ew;
            ++fill[u];
            out.degree[u] += ew;
        }
    }

    double max_degree = 0.0;
    for (double d : out.degree) max_degree = std::max(max_degree, d);
    if (!(max_degree > 0.0)) throw std::invalid_argument("build_graph: degenerate graph (all-zero weights)");

    out.isolated.assign(n, false);
    out.total_volume = 0.0;
    for (int u = 0; u < n; ++u) {
        out.isolated[u] = out.degree[u] < kIsolationFloor * max_degree;
        out.total_volume += out.degree[u];
    }
    return out;
}

CutResult cheeger_ratio(const WeightedGridGraph& g, const std::vector<bool>& subset) {
    const int n = g.num_vertices();
    if (static_cast<int>(subset.size()) != n)
        throw std::invalid_argument("cheeger_ratio: subset size mismatch");
    int inside = 0;
    for (bool b : subset) inside += b ? 1 : 0;
    if (inside == 0 || inside == n)
        throw std::invalid_argument("cheeger_ratio: subset must be nonempty and proper");

    CutResult r;
    r.subset = subset;
    for (int u = 0; u < n; ++u) {
        if (subset[u]) r.vol_in += g.degree[u];
        for (int e = g.adj_offset[u]; e < g.adj_offset[u + 1]; ++e) {
            const int v = g.adj_vertex[e];
            if (u < v && subset[u] != subset[v]) r.cut_weight += g.adj_weight[e];
        }
    }
    r.vol_out = g.total_volume - r.vol_in;
    const double mv = std::min(r.vol_in, r.vol_out);
    r.ratio = mv > 0.0 ? r.cut_weight / mv : std::numeric_limits<double>::infinity();
    return r;
}

namespace {

/// bitset lexicographic order with vertex 0 first: smaller iff the lowest
/// differing bit is 0.
bool lex_less(std::uint32_t a, std::uint32_t b) {
    if (a == b) return false;
    const int k = std::countr_zero(a ^ b);
    return ((a >> k) & 1u) == 0;
}

} // namespace

CutResult brute_force_cheeger(const WeightedGridGraph& g) {
    const int n = g.num_vertices();
    if (n > 22)
        throw std::invalid_argument("brute_force_cheeger: more than 22 vertices; use spectral estimator");
    if (n < 2) throw std::invalid_argument("brute_force_cheeger: need at least 2 vertices");

    // Enumerate subsets of {1..n-1}; vertex 0 stays outside, which covers every
    // cut exactly once (the ratio is complement-invariant). Cut and volume are
    // summed from scratch per subset so no rounding drift accumulates.
    const int bits = n - 1;
    const std::uint64_t total = 1ull << bits;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_volin = 0.0, best_cut = 0.0;
    std::uint32_t best_mask = 0;
    bool have_best = false;

    for (std::uint64_t t = 1; t < total; ++t) {
        const std::uint32_t mask = static_cast<std::uint32_t>(t) << 1; // bit v <-> vertex v
        double vol_in = 0.0, cut = 0.0;
        for (int v = 1; v < n; ++v) {
            if (!((mask >> v) & 1u)) continue;
            vol_in += g.degree[v];
            for (int e = g.adj_offset[v]; e < g.adj_offset[v + 1]; ++e) {
                const int u = g.adj_vertex[e];
                if (!((mask >> u) & 1u)) cut += g.adj_weight[e];
            }
        }
        const double mv = std::min(vol_in, g.total_volume - vol_in);
        if (!(mv > 0.0)) continue;
        const double r = cut / mv;
        if (!have_best || r < best_ratio || (r == best_ratio && lex_less(mask, best_mask))) {
            have_best = true;
            best_ratio = r;
            best_mask = mask;
            best_volin = vol_in;
            best_cut = cut;
        }
    }
    if (!have_best) throw std::runtime_error("brute_force_cheeger: no proper cut with positive volume");

    CutResult r;
    r.subset.assign(n, false);
    for (int v = 1; v < n; ++v) r.subset[v] = (best_mask >> v) & 1u;
    r.cut_weight = best_cut;
    r.vol_in = best_volin;
    r.vol_out = g.total_volume - best_volin;
    r.ratio = best_ratio;
    return r;
}

std::pair<std::vector<int>, int> nonisolated_components(const WeightedGridGraph& g) {
    const int n = g.num_vertices();
    std::vector<int> label(n, -1);
    int ncomp = 0;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (g.isolated[s] || label[s] >= 0) continue;
        label[s] = ncomp;
        stack.push_back(s);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int e = g.adj_offset[u]; e < g.adj_offset[u + 1]; ++e) {
                const int v = g.adj_vertex[e];
                if (g.isolated[v] || label[v] >= 0) continue;
                label[v] = ncomp;
                stack.push_back(v);
            }
        }
        ++ncomp;
    }
    return {label, ncomp};
}

} // namespace tfstab
