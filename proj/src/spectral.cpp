#include "tfstab/spectral.hpp"

#include "tfstab/prng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tfstab {

NormalizedLaplacian::NormalizedLaplacian(const WeightedGridGraph& g) {
    const int n = g.num_vertices();
    std::vector<int> graph_to_local(n, -1);
    for (int u = 0; u < n; ++u) {
        if (g.isolated[u]) continue;
        graph_to_local[u] = static_cast<int>(local_to_graph_.size());
        local_to_graph_.push_back(u);
    }
    const int m = size();
    if (m == 0) throw std::invalid_argument("NormalizedLaplacian: no non-isolated vertices");

    dinv_sqrt_.resize(m);
    null_vector_.resize(m);
    for (int a = 0; a < m; ++a) {
        const double d = g.degree[local_to_graph_[a]];
        if (!(d > 0.0)) throw std::logic_error("NormalizedLaplacian: zero-degree vertex reached");
        dinv_sqrt_[a] = 1.0 / std::sqrt(d);
        null_vector_[a] = std::sqrt(d);
    }
    null_vector_.normalize();

    adj_offset_.assign(m + 1, 0);
    for (int a = 0; a < m; ++a) {
        const int u = local_to_graph_[a];
        int cnt = 0;
        for (int e = g.adj_offset[u]; e < g.adj_offset[u + 1]; ++e)
            if (graph_to_local[g.adj_vertex[e]] >= 0) ++cnt;
        adj_offset_[a + 1] = adj_offset_[a] + cnt;
    }
    adj_vertex_.resize(adj_offset_[m]);
    adj_weight_.resize(adj_offset_[m]);
    for (int a = 0; a < m; ++a) {
        const int u = local_to_graph_[a];
        int at = adj_offset_[a];
        for (int e = g.adj_offset[u]; e < g.adj_offset[u + 1]; ++e) {
            const int b = graph_to_local[g.adj_vertex[e]];
            if (b < 0) continue;
            adj_vertex_[at] = b;
            adj_weight_[at] = g.adj_weight[e];
            ++at;
        }
    }
}

void NormalizedLaplacian::apply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
    const int m = size();
    if (v.size() != m) throw std::invalid_argument("NormalizedLaplacian::apply: size mismatch");
    out.resize(m);
    for (int a = 0; a < m; ++a) {
        double acc = 0.0;
        for (int e = adj_offset_[a]; e < adj_offset_[a + 1]; ++e)
            acc += adj_weight_[e] * dinv_sqrt_[adj_vertex_[e]] * v[adj_vertex_[e]];
        out[a] = v[a] - dinv_sqrt_[a] * acc;
    }
}

Eigen::VectorXd NormalizedLaplacian::apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out;
    apply(v, out);
    return out;
}

namespace {

void deflate(const Eigen::VectorXd& u0, Eigen::VectorXd& v) { v -= u0 * u0.dot(v); }

/// Orthonormalize the columns in `basis` (vectors assumed u0-deflated),
/// dropping near-dependent ones.
Eigen::MatrixXd orthonormalize(std::vector<Eigen::VectorXd> basis) {
    const double drop = 1e-12;
    std::vector<Eigen::VectorXd> kept;
    for (auto& b : basis) {
        for (const auto& k : kept) b -= k * k.dot(b);
        for (const auto& k : kept) b -= k * k.dot(b); // second pass for stability
        const double nrm = b.norm();
        if (nrm > drop) kept.push_back(b / nrm);
    }
    Eigen::MatrixXd out(kept.empty() ? 0 : kept[0].size(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = kept[c];
    return out;
}

} // namespace

EigenPair fiedler_vector(const NormalizedLaplacian& L, double tol, int max_iter, std::uint64_t seed) {
    if (!(tol > 0.0)) throw std::invalid_argument("fiedler_vector: tol must be positive");
    const int n = L.size();
    if (n < 2) throw std::invalid_argument("fiedler_vector: operator too small");
    if (max_iter < 0) max_iter = 10 * n;
    const Eigen::VectorXd& u0 = L.null_vector();

    Prng rng(seed);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.next_in(-0.5, 0.5);
    deflate(u0, x);
    double xn = x.norm();
    if (!(xn > 0.0)) {
        x.setZero();
        x[0] = 1.0;
        deflate(u0, x);
        xn = x.norm();
    }
    x /= xn;

    Eigen::VectorXd lx = L.apply(x);
    double lambda = x.dot(lx);
    Eigen::VectorXd p; // previous search direction
    double residual = (lx - lambda * x).norm();

    int it = 0;
    for (; it < max_iter; ++it) {
        Eigen::VectorXd r = lx - lambda * x;
        deflate(u0, r);
        residual = r.norm();
        if (residual <= tol) break;

        std::vector<Eigen::VectorXd> cand;
        cand.push_back(x);
        cand.push_back(r);
        if (p.size() == n) cand.push_back(p);
        Eigen::MatrixXd basis = orthonormalize(std::move(cand));
        const Eigen::Index k = basis.cols();
        if (k < 2) break; // search space collapsed; x is (numerically) converged

        Eigen::MatrixXd lbasis(n, k);
        for (Eigen::Index c = 0; c < k; ++c) lbasis.col(c) = L.apply(basis.col(c));
        const Eigen::MatrixXd small = basis.transpose() * lbasis;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (small + small.transpose()));
        const Eigen::VectorXd coef = es.eigenvectors().col(0);

        Eigen::VectorXd xnew = basis * coef;
        // keep the component orthogonal to the previous iterate as the next
        // conjugate direction
        p = xnew - x * x.dot(xnew);
        if (p.norm() > 0.0) p.normalize();

        deflate(u0, xnew);
        const double nn = xnew.norm();
        if (!(nn > 0.0)) break;
        x = xnew / nn;
        lx = L.apply(x);
        lambda = x.dot(lx);
    }

    // re-verify with one extra operator application
    lx = L.apply(x);
    lambda = x.dot(lx);
    Eigen::VectorXd r = lx - lambda * x;
    deflate(u0, r);
    residual = r.norm();
    if (residual > tol) {
        std::ostringstream msg;
        msg << "fiedler_vector: no convergence after " << it << " iterations, residual " << residual
            << " > tol " << tol;
        throw std::runtime_error(msg.str());
    }

    EigenPair out;
    out.value = lambda;
    out.vector = std::move(x);
    out.iterations = it;
    out.residual = residual;
    return out;
}

namespace {

/// Nearest non-isolated vertex for every isolated one, by multi-source BFS
/// over the masked grid lattice (deterministic expansion order).
std::vector<int> nearest_live_vertex(const WeightedGridGraph& g) {
    const int n = g.num_vertices();
    std::vector<int> nearest(n, -1);
    std::deque<int> queue;
    for (int u = 0; u < n; ++u)
        if (!g.isolated[u]) {
            nearest[u] = u;
            queue.push_back(u);
        }
    static constexpr int kDi[4] = {1, -1, 0, 0};
    static constexpr int kDj[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        const GridVertex& a = g.vertices[u];
        for (int d = 0; d < 4; ++d) {
            const int i2 = a.i + kDi[d], j2 = a.j + kDj[d];
            if (i2 < 0 || i2 >= g.nx || j2 < 0 || j2 >= g.ny) continue;
            const int v = g.vertex_at(i2, j2);
            if (v < 0 || nearest[v] >= 0) continue;
            nearest[v] = nearest[u];
            queue.push_back(v);
        }
    }
    return nearest;
}

CheegerEstimate finalize_cut(const WeightedGridGraph& g, std::vector<bool> live_side,
                             const std::vector<int>& local_to_graph) {
    const int n = g.num_vertices();
    std::vector<bool> side(n, false);
    for (std::size_t a = 0; a < local_to_graph.size(); ++a)
        side[local_to_graph[a]] = live_side[a];

    const std::vector<int> nearest = nearest_live_vertex(g);
    for (int u = 0; u < n; ++u)
        if (g.isolated[u]) side[u] = nearest[u] >= 0 ? side[nearest[u]] : false;

    CheegerEstimate est;
    est.cut = cheeger_ratio(g, side);
    est.h_star = est.cut.ratio;
    est.h_lower = 0.25 * est.h_star * est.h_star;
    est.h_calibrated = est.h_star / g.delta;
    est.n_vertices = n;
    return est;
}

} // namespace

namespace {

struct SweepResult {
    double ratio = std::numeric_limits<double>::infinity();
    double minvol = 0.0;
    int split = -1; // removing order[0..split] from C gives the best cut
    std::vector<int> order;
};

/// Evaluate every threshold cut C_t = {entries > t} of `vals` incrementally.
SweepResult sweep_thresholds(const std::vector<double>& deg, double total,
                             const std::vector<int>& adj_offset, const std::vector<int>& adj_vertex,
                             const std::vector<double>& adj_weight, const Eigen::VectorXd& vals) {
    const int m = static_cast<int>(deg.size());
    SweepResult res;
    res.order.resize(m);
    std::iota(res.order.begin(), res.order.end(), 0);
    std::stable_sort(res.order.begin(), res.order.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });

    std::vector<bool> in_c(m, true);
    double vol_c = total, cut = 0.0;
    for (int k = 0; k + 1 < m; ++k) {
        const int a = res.order[k];
        in_c[a] = false;
        vol_c -= deg[a];
        for (int e = adj_offset[a]; e < adj_offset[a + 1]; ++e)
            cut += in_c[adj_vertex[e]] ? adj_weight[e] : -adj_weight[e];
        if (!(vals[res.order[k]] < vals[res.order[k + 1]])) continue; // same threshold bucket
        const double mv = std::min(vol_c, total - vol_c);
        if (!(mv > 0.0)) continue;
        const double r = cut / mv;
        if (r < res.ratio || (r == res.ratio && mv < res.minvol)) {
            res.ratio = r;
            res.minvol = mv;
            res.split = k;
        }
    }
    return res;
}

} // namespace

CheegerEstimate threshold_cut(const WeightedGridGraph& g, const Eigen::VectorXd& v) {
    // canonical non-isolated ordering: graph vertex order, isolated skipped
    std::vector<int> ids;
    std::vector<int> graph_to_local(g.num_vertices(), -1);
    for (int u = 0; u < g.num_vertices(); ++u)
        if (!g.isolated[u]) {
            graph_to_local[u] = static_cast<int>(ids.size());
            ids.push_back(u);
        }
    const int m = static_cast<int>(ids.size());
    if (v.size() != m)
        throw std::invalid_argument("threshold_cut: vector must have one entry per non-isolated vertex");
    if ((v.array() == v[0]).all()) throw std::invalid_argument("threshold_cut: constant vector induces no cut");

    // degrees and adjacency restricted to the non-isolated subgraph
    std::vector<double> deg(m, 0.0);
    std::vector<int> adj_offset(m + 1, 0), adj_vertex;
    std::vector<double> adj_weight;
    double total = 0.0;
    for (int a = 0; a < m; ++a) {
        const int u = ids[a];
        for (int e = g.adj_offset[u]; e < g.adj_offset[u + 1]; ++e) {
            const int b = graph_to_local[g.adj_vertex[e]];
            if (b < 0) continue;
            adj_vertex.push_back(b);
            adj_weight.push_back(g.adj_weight[e]);
            deg[a] += g.adj_weight[e];
        }
        adj_offset[a + 1] = static_cast<int>(adj_vertex.size());
        total += deg[a];
    }

    // Sweep the eigenvector in both the symmetric and the degree-normalized
    // coordinates; the D^{-1/2}-scaled sweep carries the 2 sqrt(h) guarantee,
    // taking the better of the two can only lower the achieved ratio.
    Eigen::VectorXd scaled(m);
    for (int a = 0; a < m; ++a) scaled[a] = v[a] / std::sqrt(deg[a]);

    SweepResult raw = sweep_thresholds(deg, total, adj_offset, adj_vertex, adj_weight, v);
    SweepResult nrm = sweep_thresholds(deg, total, adj_offset, adj_vertex, adj_weight, scaled);
    const SweepResult& best =
        (nrm.ratio < raw.ratio || (nrm.ratio == raw.ratio && nrm.minvol <= raw.minvol)) ? nrm : raw;
    if (best.split < 0) throw std::runtime_error("threshold_cut: no admissible threshold");

    std::vector<bool> side(m, false);
    for (int k = best.split + 1; k < m; ++k) side[best.order[k]] = true;
    return finalize_cut(g, std::move(side), ids);
}

CheegerEstimate estimate_cheeger(const WeightField& w, const Mask* domain_mask, double tol,
                                 std::uint64_t seed, WeightedGridGraph* graph_out) {
    WeightedGridGraph owned;
    WeightedGridGraph& g = graph_out ? *graph_out : owned;
    g = build_graph(w, domain_mask);
    const auto [labels, ncomp] = nonisolated_components(g);

    if (ncomp == 0) throw std::runtime_error("estimate_cheeger: degenerate graph");
    if (ncomp > 1) {
        // disconnected measurements: h = 0 with a separating component as cut
        std::vector<double> vol(ncomp, 0.0);
        for (int u = 0; u < g.num_vertices(); ++u)
            if (labels[u] >= 0) vol[labels[u]] += g.degree[u];
        const int cmin = static_cast<int>(std::min_element(vol.begin(), vol.end()) - vol.begin());

        std::vector<int> ids;
        for (int u = 0; u < g.num_vertices(); ++u)
            if (!g.isolated[u]) ids.push_back(u);
        std::vector<bool> live(ids.size(), false);
        for (std::size_t a = 0; a < ids.size(); ++a) live[a] = labels[ids[a]] == cmin;
        CheegerEstimate est = finalize_cut(g, std::move(live), ids);
        est.h_star = 0.0; // exact: no edges cross between components
        est.h_lower = 0.0;
        est.h_calibrated = 0.0;
        est.eigen_value = 0.0;
        est.iterations = 0;
        return est;
    }

    NormalizedLaplacian L(g);
    const EigenPair pair = fiedler_vector(L, tol, -1, seed);
    CheegerEstimate est = threshold_cut(g, pair.vector);
    est.eigen_value = pair.value;
    est.iterations = pair.iterations;
    return est;
}

} // namespace tfstab
