#include "aronsson/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace aronsson {

namespace {

struct Stencil {
    double ux, uy, uxx, uyy, uxy;
};

inline Stencil stencil_at(const Grid2& g, int i, int j) {
    const double h = g.h;
    const double c = g.u[g.idx(i, j)];
    const double e = g.u[g.idx(i + 1, j)], w = g.u[g.idx(i - 1, j)];
    const double n = g.u[g.idx(i, j + 1)], s = g.u[g.idx(i, j - 1)];
    const double ne = g.u[g.idx(i + 1, j + 1)], sw = g.u[g.idx(i - 1, j - 1)];
    const double nw = g.u[g.idx(i - 1, j + 1)], se = g.u[g.idx(i + 1, j - 1)];
    Stencil st;
    st.ux = (e - w) / (2 * h);
    st.uy = (n - s) / (2 * h);
    st.uxx = (e - 2 * c + w) / (h * h);
    st.uyy = (n - 2 * c + s) / (h * h);
    st.uxy = (ne + sw - nw - se) / (4 * h * h);
    return st;
}

inline double aronsson_residual(const Stencil& st, const std::function<Vec2(const Vec2&)>& grad2) {
    const Vec2 du{st.ux, st.uy};
    if (du.norm() < 1e-12) return 0.0;
    const Vec2 q = grad2(du);
    return st.uxx * q[0] * q[0] + 2.0 * st.uxy * q[0] * q[1] + st.uyy * q[1] * q[1];
}

std::function<Vec2(const Vec2&)> planar_gradient(const Hamiltonian& H) {
    if (H.dim != 2) throw std::invalid_argument("solver: Hamiltonian must be 2-dimensional");
    if (H.grad2) return H.grad2;
    auto g = H.grad;
    return [g](const Vec2& p) {
        Vec v(2);
        v << p[0], p[1];
        const Vec out = g(v);
        return Vec2{out[0], out[1]};
    };
}

bool near_pinned(const Grid2& g, int i, int j) {
    if (!g.pinned) return false;
    const int pi = *g.pinned % g.nx;
    const int pj = *g.pinned / g.nx;
    return std::abs(i - pi) <= 1 && std::abs(j - pj) <= 1;
}

void apply_dirichlet(Grid2& g, const std::function<double(const Vec2&)>& data,
                     const std::optional<std::pair<Vec2, double>>& pinned) {
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.active(i, j)) g.u[g.idx(i, j)] = data(g.pos(i, j));
    if (pinned) {
        const int node = nearest_node(g, pinned->first);
        if (g.cls[node] != NodeClass::Interior)
            throw std::invalid_argument("relax: pinned node must be interior");
        g.pinned = node;
        g.pinned_value = pinned->second;
        g.u[node] = pinned->second;
    }
}

// Rows are processed in fixed-size batches; writes are node-owned and the
// reductions are max, so the outcome is bitwise independent of threads.
template <typename NodeFn>
double sweep_max(const Grid2& g, NodeFn&& fn) {
    const int ny = g.ny;
    std::vector<double> row_max(ny, -std::numeric_limits<double>::infinity());
    parallel_for(ny, [&](std::size_t j) {
        double m = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < g.nx; ++i) m = std::max(m, fn(i, static_cast<int>(j)));
        row_max[j] = m;
    });
    double m = -std::numeric_limits<double>::infinity();
    for (double v : row_max) m = std::max(m, v);
    return m;
}

}  // namespace

ResidualStats residual(const Grid2& g, const Hamiltonian& H, const ResidualOptions& opts) {
    if (g.nx < 5 || g.ny < 5) throw std::invalid_argument("residual: grid must be at least 5x5");
    const auto grad2 = planar_gradient(H);
    ResidualStats st;
    double sum = 0.0;
    for (int j = 1; j + 1 < g.ny; ++j) {
        for (int i = 1; i + 1 < g.nx; ++i) {
            if (g.node_class(i, j) != NodeClass::Interior) continue;
            if (near_pinned(g, i, j) || (opts.exclude && opts.exclude(g.pos(i, j)))) {
                ++st.excluded;
                continue;
            }
            const double r = aronsson_residual(stencil_at(g, i, j), grad2);
            st.max_abs = std::max(st.max_abs, std::abs(r));
            sum += std::abs(r);
            ++st.evaluated;
        }
    }
    st.mean_abs = st.evaluated > 0 ? sum / st.evaluated : 0.0;
    return st;
}

RelaxResult relax(const std::function<double(const Vec2&)>& boundary_data, const Hamiltonian& H,
                  const Grid2& domain, std::optional<std::pair<Vec2, double>> pinned,
                  const RelaxOptions& opts) {
    const auto grad2 = planar_gradient(H);

    RelaxResult res;
    res.grid = domain;
    Grid2& g = res.grid;
    apply_dirichlet(g, boundary_data, pinned);

    const double h2 = g.h * g.h;
    std::vector<double> rbuf(g.u.size(), 0.0);
    std::vector<double> next = g.u;

    double prev_update = std::numeric_limits<double>::infinity();
    int growth_streak = 0;

    for (int it = 1; it <= opts.max_iters; ++it) {
        // Pass 1: residuals and the step cap.
        const double max_q2 = sweep_max(g, [&](int i, int j) {
            if (g.node_class(i, j) != NodeClass::Interior || g.idx(i, j) == g.pinned.value_or(-1))
                return -std::numeric_limits<double>::infinity();
            const Stencil st = stencil_at(g, i, j);
            const Vec2 du{st.ux, st.uy};
            double q2 = 0.0;
            double r = 0.0;
            if (du.norm() >= 1e-12) {
                const Vec2 q = grad2(du);
                q2 = q.squaredNorm();
                r = st.uxx * q[0] * q[0] + 2.0 * st.uxy * q[0] * q[1] + st.uyy * q[1] * q[1];
            }
            rbuf[g.idx(i, j)] = r;
            return q2;
        });
        double tau = h2 / (4.0 * std::max(max_q2, 0.0) + opts.tau_epsilon);
        if (opts.tau > 0.0) tau = std::min(opts.tau, tau);
        res.tau_last = tau;

        // Pass 2: simultaneous update.
        const double update = sweep_max(g, [&](int i, int j) {
            const int id = g.idx(i, j);
            if (g.node_class(i, j) != NodeClass::Interior || id == g.pinned.value_or(-1)) {
                next[id] = g.u[id];
                return -std::numeric_limits<double>::infinity();
            }
            const double du = tau * rbuf[id];
            next[id] = g.u[id] + du;
            return std::abs(du);
        });
        g.u.swap(next);
        res.iterations = it;
        res.final_update = update;

        if (!std::isfinite(update)) {
            if (update == -std::numeric_limits<double>::infinity()) {
                // No interior nodes at all; nothing to relax.
                res.converged = true;
                return res;
            }
            throw std::runtime_error("relax: non-finite update at sweep " + std::to_string(it));
        }
        if (opts.log_every > 0 && (it % opts.log_every == 0 || it == 1))
            res.update_log.emplace_back(it, update);

        if (update < opts.stop_tol) {
            res.converged = true;
            return res;
        }
        if (update > prev_update) {
            if (++growth_streak >= 50) {
                std::ostringstream os;
                os << "relax: diverging, update grew over 50 consecutive sweeps (last " << update
                   << " at sweep " << it << ", tau " << tau << ")";
                throw std::runtime_error(os.str());
            }
        } else {
            growth_streak = 0;
        }
        prev_update = update;
    }
    res.converged = false;
    return res;
}

RelaxResult relax_oberman(const std::function<double(const Vec2&)>& boundary_data,
                          const Grid2& domain, std::optional<std::pair<Vec2, double>> pinned,
                          const RelaxOptions& opts, int ring_samples) {
    RelaxResult res;
    res.grid = domain;
    Grid2& g = res.grid;
    apply_dirichlet(g, boundary_data, pinned);

    std::vector<double> cosv(ring_samples), sinv(ring_samples);
    for (int s = 0; s < ring_samples; ++s) {
        cosv[s] = std::cos(2.0 * M_PI * s / ring_samples);
        sinv[s] = std::sin(2.0 * M_PI * s / ring_samples);
    }

    std::vector<double> next = g.u;
    double prev_update = std::numeric_limits<double>::infinity();
    int growth_streak = 0;

    for (int it = 1; it <= opts.max_iters; ++it) {
        const double update = sweep_max(g, [&](int i, int j) {
            const int id = g.idx(i, j);
            if (g.node_class(i, j) != NodeClass::Interior || id == g.pinned.value_or(-1)) {
                next[id] = g.u[id];
                return -std::numeric_limits<double>::infinity();
            }
            const Vec2 x = g.pos(i, j);
            // Ring radius slightly under h keeps every sample strictly
            // inside the 3x3 neighbourhood's cells.
            const double rho = 0.9 * g.h;
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (int s = 0; s < ring_samples; ++s) {
                const double v = g.interp(Vec2{x[0] + rho * cosv[s], x[1] + rho * sinv[s]});
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double target = 0.5 * (lo + hi);
            next[id] = target;
            return std::abs(target - g.u[id]);
        });
        g.u.swap(next);
        res.iterations = it;
        res.final_update = update;
        if (opts.log_every > 0 && (it % opts.log_every == 0 || it == 1))
            res.update_log.emplace_back(it, update);
        if (update < opts.stop_tol) {
            res.converged = true;
            return res;
        }
        if (update > prev_update) {
            if (++growth_streak >= 50)
                throw std::runtime_error("relax_oberman: diverging updates");
        } else {
            growth_streak = 0;
        }
        prev_update = update;
    }
    res.converged = false;
    return res;
}

Grid2 grid_for(const ProblemSpec& spec, double h) {
    const int nx = static_cast<int>(std::lround((spec.bbox_hi[0] - spec.bbox_lo[0]) / h)) + 1;
    const int ny = static_cast<int>(std::lround((spec.bbox_hi[1] - spec.bbox_lo[1]) / h)) + 1;
    return make_grid(spec.bbox_lo, h, nx, ny, spec.inside);
}

double grid_error_max(const Grid2& g, const std::function<double(const Vec2&)>& exact,
                      const std::function<bool(const Vec2&)>& exclude) {
    double m = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (!g.active(i, j)) continue;
            const Vec2 x = g.pos(i, j);
            if (exclude && exclude(x)) continue;
            m = std::max(m, std::abs(g.u[g.idx(i, j)] - exact(x)));
        }
    }
    return m;
}

RefineTable refine_study(const ProblemSpec& spec, const std::vector<double>& h_list,
                         const RelaxOptions& opts) {
    RefineTable table;
    for (double h : h_list) {
        const Grid2 domain = grid_for(spec, h);
        const RelaxResult rr = relax(spec.boundary, spec.H, domain, spec.pinned, opts);
        ResidualOptions ro;
        ro.exclude = spec.exclude;
        const ResidualStats rs = residual(rr.grid, spec.H, ro);
        RefineRow row;
        row.h = h;
        row.iterations = rr.iterations;
        row.final_update = rr.final_update;
        row.residual_max = rs.max_abs;
        row.residual_mean = rs.mean_abs;
        if (spec.exact) row.err_max = grid_error_max(rr.grid, spec.exact, spec.exclude);
        table.rows.push_back(row);
    }
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const auto& a = table.rows[i - 1];
        const auto& b = table.rows[i];
        table.res_orders.push_back(std::log2(a.residual_max / b.residual_max));
        if (spec.exact) {
            // errors at the rounding floor make the order meaningless
            if (a.err_max < 1e-12 || b.err_max < 1e-12)
                table.err_orders.push_back(std::numeric_limits<double>::quiet_NaN());
            else
                table.err_orders.push_back(std::log2(a.err_max / b.err_max));
        }
    }
    return table;
}

}  // namespace aronsson
