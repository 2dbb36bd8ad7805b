#include "tfstab/field_io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "field container assumes a little-endian host");

namespace tfstab {

namespace {

constexpr char kMagic[4] = {'T', 'F', 'C', '1'};

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }

std::uint32_t get_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
double get_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

struct Header {
    TfGrid grid;
    FieldKind kind;
};

void write_header(std::ostream& out, const TfGrid& g, FieldKind kind) {
    out.write(kMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(g.nx));
    put_u32(out, static_cast<std::uint32_t>(g.ny));
    put_f64(out, g.delta);
    put_f64(out, g.x0);
    put_f64(out, g.y0);
    const char k = static_cast<char>(kind);
    out.write(&k, 1);
}

Header read_header(std::istream& in, const std::filesystem::path& path) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a TFC1 field file: " + path.string());
    const std::uint32_t nx = get_u32(in), ny = get_u32(in);
    const double delta = get_f64(in), x0 = get_f64(in), y0 = get_f64(in);
    char k = 0;
    in.read(&k, 1);
    if (!in) throw std::runtime_error("truncated field header: " + path.string());
    if (k < 0 || k > 3) throw std::runtime_error("unknown field kind: " + path.string());
    return {TfGrid(delta, static_cast<int>(nx), static_cast<int>(ny), x0, y0),
            static_cast<FieldKind>(k)};
}

} // namespace

void write_field(const GaborField& f, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_header(out, f.grid, f.kind);
    for (int i = 0; i < f.grid.nx; ++i)
        for (int j = 0; j < f.grid.ny; ++j) {
            put_f64(out, f.values(i, j).real());
            put_f64(out, f.values(i, j).imag());
        }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_weight_field(const WeightField& w, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_header(out, w.grid, FieldKind::weight);
    put_f64(out, w.p);
    for (int i = 0; i < w.grid.nx; ++i)
        for (int j = 0; j < w.grid.ny; ++j) put_f64(out, w.w(i, j));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

FieldKind probe_field_kind(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_header(in, path).kind;
}

GaborField read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const Header h = read_header(in, path);
    if (h.kind == FieldKind::weight)
        throw std::runtime_error("expected a complex field, found weights: " + path.string());
    GaborField f;
    f.grid = h.grid;
    f.kind = h.kind;
    f.values.resize(h.grid.nx, h.grid.ny);
    for (int i = 0; i < h.grid.nx; ++i)
        for (int j = 0; j < h.grid.ny; ++j) {
            const double re = get_f64(in), im = get_f64(in);
            f.values(i, j) = {re, im};
        }
    if (!in) throw std::runtime_error("truncated field payload: " + path.string());
    return f;
}

WeightField read_weight_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const Header h = read_header(in, path);
    if (h.kind != FieldKind::weight)
        throw std::runtime_error("expected weights, found a complex field: " + path.string());
    WeightField w;
    w.grid = h.grid;
    w.p = get_f64(in);
    w.w.resize(h.grid.nx, h.grid.ny);
    for (int i = 0; i < h.grid.nx; ++i)
        for (int j = 0; j < h.grid.ny; ++j) w.w(i, j) = get_f64(in);
    if (!in) throw std::runtime_error("truncated field payload: " + path.string());
    w.degenerate = !(w.w.maxCoeff() > 0.0);
    return w;
}

void field_to_csv(const GaborField& f, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    out << "x,y,re,im\n";
    for (int i = 0; i < f.grid.nx; ++i)
        for (int j = 0; j < f.grid.ny; ++j)
            out << f.grid.x(i) << "," << f.grid.y(j) << "," << f.values(i, j).real() << ","
                << f.values(i, j).imag() << "\n";
}

void weight_to_csv(const WeightField& w, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    out << "x,y,w\n";
    for (int i = 0; i < w.grid.nx; ++i)
        for (int j = 0; j < w.grid.ny; ++j)
            out << w.grid.x(i) << "," << w.grid.y(j) << "," << w.w(i, j) << "\n";
}

void export_graph(const WeightedGridGraph& g, const std::filesystem::path& edges_path,
                  const std::filesystem::path& vertices_path) {
    std::ofstream ev(vertices_path);
    if (!ev) throw std::runtime_error("cannot write " + vertices_path.string());
    ev.precision(17);
    ev << "# vertex i j x y degree isolated\n";
    for (int u = 0; u < g.num_vertices(); ++u) {
        const GridVertex& v = g.vertices[u];
        ev << u << " " << v.i << " " << v.j << " " << v.x << " " << v.y << " " << g.degree[u] << " "
           << (g.isolated[u] ? 1 : 0) << "\n";
    }
    std::ofstream ee(edges_path);
    if (!ee) throw std::runtime_error("cannot write " + edges_path.string());
    ee.precision(17);
    for (int u = 0; u < g.num_vertices(); ++u)
        for (int e = g.adj_offset[u]; e < g.adj_offset[u + 1]; ++e)
            if (u < g.adj_vertex[e]) ee << u << " " << g.adj_vertex[e] << " " << g.adj_weight[e] << "\n";
}

std::string cheeger_estimate_json(const CheegerEstimate& est) {
    nlohmann::ordered_json j;
    j["h_star"] = est.h_star;
    j["h_lower"] = est.h_lower;
    j["lambda2"] = est.eigen_value;
    j["cut_size"] = est.cut.cut_weight;
    j["vol_in"] = est.cut.vol_in;
    j["vol_out"] = est.cut.vol_out;
    j["n_vertices"] = est.n_vertices;
    j["iterations"] = est.iterations;
    j["h_star_calibrated"] = est.h_calibrated;
    return j.dump(2);
}

std::string partition_report_json(const PartitionReport& report) {
    nlohmann::ordered_json j;
    j["tau"] = report.tau;
    j["max_depth"] = report.max_depth;
    j["min_vertices"] = report.min_vertices;
    j["p"] = report.p;
    j["n_leaves"] = report.leaves.size();
    if (report.bound_infinite)
        j["B"] = "inf";
    else
        j["B"] = report.bound;

    nlohmann::ordered_json tree = nlohmann::ordered_json::array();
    for (std::size_t n = 0; n < report.parent.size(); ++n)
        tree.push_back({{"node", n},
                        {"parent", report.parent[n]},
                        {"children", {report.children[n][0], report.children[n][1]}}});
    j["tree"] = tree;

    nlohmann::ordered_json leaves = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < report.leaves.size(); ++k) {
        const Region& r = report.leaves[k];
        nlohmann::ordered_json leaf;
        leaf["node"] = report.leaf_node[k];
        leaf["depth"] = r.depth;
        leaf["cells"] = static_cast<long long>(r.mask.count());
        leaf["volume"] = r.volume;
        leaf["indivisible"] = r.indivisible;
        leaf["degenerate"] = r.degenerate;
        if (!r.degenerate) {
            leaf["h_star"] = r.h_est.h_star;
            leaf["h_star_calibrated"] = r.h_est.h_calibrated;
            leaf["h_lower"] = r.h_est.h_lower;
            leaf["lambda2"] = r.h_est.eigen_value;
            leaf["kappa"] = r.kappa;
            leaf["delta_tilde"] = r.delta_tilde;
        }
        leaves.push_back(leaf);
    }
    j["leaves"] = leaves;

    nlohmann::ordered_json cuts = nlohmann::ordered_json::array();
    for (const InterLeafCut& c : report.inter_leaf_cuts)
        cuts.push_back({{"leaf_a", c.leaf_a}, {"leaf_b", c.leaf_b}, {"weight", c.weight}});
    j["inter_leaf_cut_weight"] = cuts;
    return j.dump(2);
}

} // namespace tfstab
