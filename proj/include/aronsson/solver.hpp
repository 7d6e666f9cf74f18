#pragma once

#include "aronsson/field.hpp"
#include "aronsson/grid.hpp"
#include "aronsson/hamiltonian.hpp"

#include <optional>

namespace aronsson {

struct ResidualStats {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    int evaluated = 0;
    int excluded = 0;
};

struct ResidualOptions {
    std::function<bool(const Vec2&)> exclude;  // extra nodes to skip
};

/// Discrete Aronsson residual D^2u q . q with q = H_p(grad u), centered
/// differences, at interior nodes with a full 3x3 stencil. Nodes within
/// stencil radius of the pinned node or inside the exclusion set are
/// skipped and counted. Residual is defined as 0 where |grad u| < 1e-12
/// (there H_p vanishes in the continuum).
ResidualStats residual(const Grid2& g, const Hamiltonian& H, const ResidualOptions& opts = {});

struct RelaxOptions {
    int max_iters = 400000;
    double stop_tol = 1e-10;     // on the max nodal update per sweep
    double tau_epsilon = 1e-12;  // cap = h^2 / (4 max|q|^2 + epsilon)
    double tau = 0.0;            // requested step; 0 or above the cap uses the cap
    int log_every = 1000;
};

struct RelaxResult {
    Grid2 grid;
    int iterations = 0;
    double final_update = 0.0;
    bool converged = false;
    double tau_last = 0.0;
    std::vector<std::pair<int, double>> update_log;
};

/// Pseudo-time Jacobi relaxation u <- u + tau * residual with the adaptive
/// step cap recomputed from the current iterate every sweep. Rim nodes hold
/// boundary_data evaluated at the node position; the optional puncture pins
/// the nearest interior node. The update is simultaneous (double buffered),
/// so results are independent of sweep order and thread count. Divergence
/// (50 consecutive sweeps of growing updates) aborts with diagnostics.
RelaxResult relax(const std::function<double(const Vec2&)>& boundary_data, const Hamiltonian& H,
                  const Grid2& domain, std::optional<std::pair<Vec2, double>> pinned = std::nullopt,
                  const RelaxOptions& opts = {});

/// Midpoint-scheme cross-check for isotropic H: fixed-point iteration of
/// u(x) = (max + min)/2 of the bilinear interpolant on the circle of radius
/// h around x. Same grid conventions as relax.
RelaxResult relax_oberman(const std::function<double(const Vec2&)>& boundary_data,
                          const Grid2& domain,
                          std::optional<std::pair<Vec2, double>> pinned = std::nullopt,
                          const RelaxOptions& opts = {}, int ring_samples = 32);

struct ProblemSpec {
    std::string name;
    Hamiltonian H;
    std::function<bool(const Vec2&)> inside;  // null = full rectangle
    Vec2 bbox_lo{-1.0, -1.0};
    Vec2 bbox_hi{1.0, 1.0};
    std::function<double(const Vec2&)> boundary;
    std::optional<std::pair<Vec2, double>> pinned;
    std::function<double(const Vec2&)> exact;  // optional reference solution
    std::function<bool(const Vec2&)> exclude;  // residual exclusion set
};

struct RefineRow {
    double h = 0.0;
    int iterations = 0;
    double final_update = 0.0;
    double residual_max = 0.0;
    double residual_mean = 0.0;
    double err_max = std::numeric_limits<double>::quiet_NaN();
};

struct RefineTable {
    std::vector<RefineRow> rows;
    std::vector<double> res_orders;  // log2 ratios between consecutive rows
    std::vector<double> err_orders;
};

Grid2 grid_for(const ProblemSpec& spec, double h);

/// Solves the problem over a ladder of spacings and reports residual and
/// error norms with empirical orders.
RefineTable refine_study(const ProblemSpec& spec, const std::vector<double>& h_list,
                         const RelaxOptions& opts = {});

/// Max abs difference against a reference on evaluated nodes (interior and
/// rim), optionally restricted by an exclusion predicate.
double grid_error_max(const Grid2& g, const std::function<double(const Vec2&)>& exact,
                      const std::function<bool(const Vec2&)>& exclude = nullptr);

}  // namespace aronsson
