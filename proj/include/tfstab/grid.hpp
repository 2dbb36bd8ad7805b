#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>

namespace tfstab {

/// Rectangular time-frequency sampling lattice with equal spacing in both
/// directions. Sample (i, j) sits at (x0 + i*delta, y0 + j*delta); the x axis
/// is time, the y axis frequency.
struct TfGrid {
    double delta = 0.0;
    int nx = 0;
    int ny = 0;
    double x0 = 0.0;
    double y0 = 0.0;

    TfGrid() = default;
    TfGrid(double delta_, int nx_, int ny_, double x0_, double y0_)
        : delta(delta_), nx(nx_), ny(ny_), x0(x0_), y0(y0_) {
        if (!(delta > 0.0)) throw std::invalid_argument("TfGrid: delta must be positive");
        if (nx < 1 || ny < 1) throw std::invalid_argument("TfGrid: empty grid");
    }

    double x(int i) const { return x0 + i * delta; }
    double y(int j) const { return y0 + j * delta; }
    int size() const { return nx * ny; }
    double cell_area() const { return delta * delta; }

    bool same_geometry(const TfGrid& o) const {
        return delta == o.delta && nx == o.nx && ny == o.ny && x0 == o.x0 && y0 == o.y0;
    }

    /// Symmetric grid covering [-xmax, xmax] x [-ymax, ymax]; the origin is a
    /// sample point.
    static TfGrid centered(double delta, double xmax, double ymax) {
        int hx = static_cast<int>(std::llround(xmax / delta));
        int hy = static_cast<int>(std::llround(ymax / delta));
        return TfGrid(delta, 2 * hx + 1, 2 * hy + 1, -hx * delta, -hy * delta);
    }

    /// Default analysis lattice: 257x257 over [-8, 8]^2 at delta = 1/16.
    static TfGrid standard() { return centered(1.0 / 16.0, 8.0, 8.0); }
};

enum class FieldKind : std::uint8_t {
    gabor = 0,
    ambiguity = 1,
    generic = 2,
    weight = 3,
};

/// Complex matrix sampled on a TfGrid. values(i, j) belongs to the point
/// (grid.x(i), grid.y(j)).
struct GaborField {
    TfGrid grid;
    Eigen::MatrixXcd values;
    FieldKind kind = FieldKind::generic;

    Eigen::ArrayXXd abs() const { return values.array().abs(); }
};

/// Nonnegative weight |V_phi f|^p on a TfGrid, the conformal factor for all
/// Cheeger machinery.
struct WeightField {
    TfGrid grid;
    Eigen::ArrayXXd w;
    double p = 1.0;
    bool degenerate = false;

    double total_mass() const { return w.sum() * grid.cell_area(); }
};

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline Mask full_mask(const TfGrid& g) { return Mask::Constant(g.nx, g.ny, true); }

inline Mask disc_mask(const TfGrid& g, double radius, double cx = 0.0, double cy = 0.0) {
    Mask m(g.nx, g.ny);
    const double r2 = radius * radius;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double dx = g.x(i) - cx, dy = g.y(j) - cy;
            m(i, j) = dx * dx + dy * dy <= r2;
        }
    return m;
}

} // namespace tfstab
