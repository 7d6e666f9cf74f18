#include "aronsson/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace aronsson {

bool Grid2::cell_active(int ci, int cj) const {
    return active(ci, cj) && active(ci + 1, cj) && active(ci, cj + 1) && active(ci + 1, cj + 1);
}

namespace {

struct CellCoord {
    int ci, cj;
    double fx, fy;
    bool ok;
};

CellCoord locate(const Grid2& g, const Vec2& x) {
    CellCoord c{};
    double gx = (x[0] - g.origin[0]) / g.h;
    double gy = (x[1] - g.origin[1]) / g.h;
    // Snap to node lines so interpolation is exact on nodes despite the
    // roundoff in position arithmetic.
    if (std::abs(gx - std::round(gx)) < 1e-9) gx = std::round(gx);
    if (std::abs(gy - std::round(gy)) < 1e-9) gy = std::round(gy);
    int ci = static_cast<int>(std::floor(gx));
    int cj = static_cast<int>(std::floor(gy));
    // Points on the outermost node lines belong to the last cell.
    if (ci == g.nx - 1 && gx <= g.nx - 1 + 1e-12) ci = g.nx - 2;
    if (cj == g.ny - 1 && gy <= g.ny - 1 + 1e-12) cj = g.ny - 2;
    c.ci = ci;
    c.cj = cj;
    c.fx = gx - ci;
    c.fy = gy - cj;
    c.ok = ci >= 0 && cj >= 0 && ci + 1 < g.nx && cj + 1 < g.ny && g.cell_active(ci, cj);
    return c;
}

}  // namespace

bool Grid2::can_eval(const Vec2& x) const { return locate(*this, x).ok; }

double Grid2::interp(const Vec2& x) const {
    const CellCoord c = locate(*this, x);
    if (!c.ok) throw std::domain_error("Grid2::interp: point outside active cells");
    const double v00 = u[idx(c.ci, c.cj)];
    const double v10 = u[idx(c.ci + 1, c.cj)];
    const double v01 = u[idx(c.ci, c.cj + 1)];
    const double v11 = u[idx(c.ci + 1, c.cj + 1)];
    return v00 * (1 - c.fx) * (1 - c.fy) + v10 * c.fx * (1 - c.fy) + v01 * (1 - c.fx) * c.fy +
           v11 * c.fx * c.fy;
}

Vec2 Grid2::node_gradient(int i, int j) const {
    auto diff = [&](int di, int dj) -> double {
        const bool plus = active(i + di, j + dj);
        const bool minus = active(i - di, j - dj);
        const double v = u[idx(i, j)];
        if (plus && minus) return (u[idx(i + di, j + dj)] - u[idx(i - di, j - dj)]) / (2.0 * h);
        if (plus) return (u[idx(i + di, j + dj)] - v) / h;
        if (minus) return (v - u[idx(i - di, j - dj)]) / h;
        return 0.0;
    };
    return {diff(1, 0), diff(0, 1)};
}

Vec2 Grid2::interp_gradient(const Vec2& x) const {
    const CellCoord c = locate(*this, x);
    if (!c.ok) throw std::domain_error("Grid2::interp_gradient: point outside active cells");
    const Vec2 g00 = node_gradient(c.ci, c.cj);
    const Vec2 g10 = node_gradient(c.ci + 1, c.cj);
    const Vec2 g01 = node_gradient(c.ci, c.cj + 1);
    const Vec2 g11 = node_gradient(c.ci + 1, c.cj + 1);
    return g00 * (1 - c.fx) * (1 - c.fy) + g10 * c.fx * (1 - c.fy) + g01 * (1 - c.fx) * c.fy +
           g11 * c.fx * c.fy;
}

void Grid2::fill(const std::function<double(const Vec2&)>& f) {
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (active(i, j)) u[idx(i, j)] = f(pos(i, j));
}

Grid2 make_grid(const Vec2& origin, double h, int nx, int ny,
                const std::function<bool(const Vec2&)>& inside) {
    if (!(h > 0.0) || nx < 2 || ny < 2) throw std::invalid_argument("make_grid: bad grid spec");
    Grid2 g;
    g.origin = origin;
    g.h = h;
    g.nx = nx;
    g.ny = ny;
    g.u.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    g.cls.assign(static_cast<std::size_t>(nx) * ny, NodeClass::Exterior);

    std::vector<char> act(static_cast<std::size_t>(nx) * ny, 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) act[g.idx(i, j)] = (!inside || inside(g.pos(i, j))) ? 1 : 0;

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!act[g.idx(i, j)]) continue;
            bool interior = true;
            for (int dj = -1; dj <= 1 && interior; ++dj)
                for (int di = -1; di <= 1 && interior; ++di) {
                    const int ii = i + di, jj = j + dj;
                    if (!g.in_range(ii, jj) || !act[g.idx(ii, jj)]) interior = false;
                }
            g.cls[g.idx(i, j)] = interior ? NodeClass::Interior : NodeClass::Rim;
        }
    }
    return g;
}

int nearest_node(const Grid2& g, const Vec2& x) {
    const int i = std::clamp(static_cast<int>(std::lround((x[0] - g.origin[0]) / g.h)), 0, g.nx - 1);
    const int j = std::clamp(static_cast<int>(std::lround((x[1] - g.origin[1]) / g.h)), 0, g.ny - 1);
    return g.idx(i, j);
}

}  // namespace aronsson
