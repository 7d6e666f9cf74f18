#pragma once

#include "aronsson/common.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace aronsson {

enum class NodeClass : unsigned char { Exterior = 0, Rim = 1, Interior = 2 };

/// Uniform 2-D grid of node values. Nodes are classified once at
/// construction: a node is active when the membership predicate holds at
/// its position, Interior when all eight neighbours are active too, Rim
/// otherwise. Rim nodes carry Dirichlet data; Exterior nodes are unused.
struct Grid2 {
    Vec2 origin{0.0, 0.0};
    double h = 1.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> u;
    std::vector<NodeClass> cls;
    std::optional<int> pinned;  // node index held at pinned_value
    double pinned_value = 0.0;

    int idx(int i, int j) const { return j * nx + i; }
    bool in_range(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
    Vec2 pos(int i, int j) const { return {origin[0] + i * h, origin[1] + j * h}; }
    NodeClass node_class(int i, int j) const {
        return in_range(i, j) ? cls[idx(i, j)] : NodeClass::Exterior;
    }
    bool active(int i, int j) const { return node_class(i, j) != NodeClass::Exterior; }

    /// All four corners of cell (ci, cj) are active.
    bool cell_active(int ci, int cj) const;

    bool can_eval(const Vec2& x) const;

    /// Bilinear interpolation; exact on nodes. Throws std::domain_error
    /// when x falls outside the active cells.
    double interp(const Vec2& x) const;

    /// Centered differences where both neighbours are active, one-sided at
    /// the rim.
    Vec2 node_gradient(int i, int j) const;

    /// Bilinear interpolation of node gradients.
    Vec2 interp_gradient(const Vec2& x) const;

    void fill(const std::function<double(const Vec2&)>& f);
};

/// Builds and classifies a grid over [origin, origin + (nx-1, ny-1) h].
/// A null predicate makes every node active (rectangle domain).
Grid2 make_grid(const Vec2& origin, double h, int nx, int ny,
                const std::function<bool(const Vec2&)>& inside = nullptr);

/// Nearest node to x; used for pinning punctures.
int nearest_node(const Grid2& g, const Vec2& x);

}  // namespace aronsson
