#include "aronsson/comparison.hpp"

#include <cmath>
#include <limits>

namespace aronsson {

std::string to_string(Property p) {
    switch (p) {
        case Property::CGCA: return "cgca";
        case Property::CGCB: return "cgcb";
        case Property::AMLE: return "amle";
        case Property::KComparison: return "kcomp";
        case Property::Segment: return "segment";
        case Property::Harnack: return "harnack";
        case Property::MaxPrinciple: return "maxprin";
    }
    return "?";
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Violation: return "violation";
        case CheckStatus::Vacuous: return "vacuous";
        case CheckStatus::PreconditionFailed: return "precondition_failed";
    }
    return "?";
}

namespace {

double default_tol(const Field& u, const CheckOptions& opts) {
    if (opts.tol) return *opts.tol;
    if (u.is_grid()) {
        const double h = u.grid()->h;
        return std::max(1e-8, 10.0 * h * h);
    }
    return 1e-8;
}

std::vector<Vec2> circle_points(const Vec2& c, double r, int N) {
    std::vector<Vec2> pts(N);
    for (int j = 0; j < N; ++j) {
        const double t = 2.0 * M_PI * j / N;
        pts[j] = Vec2{c[0] + r * std::cos(t), c[1] + r * std::sin(t)};
    }
    return pts;
}

std::vector<Vec2> boundary_samples(const DomainDesc& region, int N) {
    std::vector<Vec2> pts = circle_points(region.center, region.r_outer, N);
    if (region.is_annulus()) {
        const auto inner = circle_points(region.center, region.r_inner, N);
        pts.insert(pts.end(), inner.begin(), inner.end());
    }
    return pts;
}

std::vector<Vec2> interior_lattice(const DomainDesc& region, const Field& u, int nx, int ny) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(nx) * ny / 2);
    const double R = region.r_outer;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Vec2 x{region.center[0] - R + 2.0 * R * (i + 0.5) / nx,
                         region.center[1] - R + 2.0 * R * (j + 0.5) / ny};
            if (region.contains_point(x, 1e-9) && u.can_eval(x)) pts.push_back(x);
        }
    }
    return pts;
}

std::vector<Vec2> interior_polar(const DomainDesc& region, const Field& u, int total) {
    const int ntheta = 60;
    const int nr = std::max(3, total / ntheta);
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(ntheta) * nr);
    const double lo = region.r_inner, hi = region.r_outer;
    for (int a = 0; a < ntheta; ++a) {
        const double t = 2.0 * M_PI * a / ntheta;
        for (int s = 0; s < nr; ++s) {
            const double r = lo + (hi - lo) * (s + 1.0) / (nr + 1.0);
            const Vec2 x{region.center[0] + r * std::cos(t), region.center[1] + r * std::sin(t)};
            if (region.contains_point(x, 1e-9) && u.can_eval(x)) pts.push_back(x);
        }
    }
    return pts;
}

void validate_vertices(const DomainDesc& region, const std::vector<Vec2>& vertices) {
    if (vertices.empty()) throw std::invalid_argument("comparison: empty vertex set");
    for (const Vec2& v : vertices)
        if (region.contains_point(v, 1e-12))
            throw std::invalid_argument("comparison: vertex lies inside the test region");
}

struct ScanBest {
    double value = -std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();
    bool found() const { return index != std::numeric_limits<std::size_t>::max(); }
};

ScanBest scan_max(std::size_t n, const std::function<double(std::size_t)>& f) {
    ScanBest b;
    b.index = parallel_argmax(n, f, &b.value);
    return b;
}

// Shared driver for the two cone comparison checks.
ComparisonReport cone_comparison(const Field& u, const Hamiltonian& H, const DomainDesc& region,
                                 const std::vector<Vec2>& vertices,
                                 const std::vector<double>& k_grid, int N,
                                 const CheckOptions& opts, bool from_above) {
    if (H.dim != 2) throw std::invalid_argument("comparison: Hamiltonian must be 2-dimensional");
    if (k_grid.empty()) throw std::invalid_argument("comparison: empty level grid");
    validate_vertices(region, vertices);

    const Hamiltonian Hc = from_above ? H : reflect(H);
    const double tol = default_tol(u, opts);
    const auto bd = boundary_samples(region, N);
    const auto in = interior_lattice(region, u, opts.interior_nx, opts.interior_ny);
    if (in.empty()) throw std::invalid_argument("comparison: no interior samples in region");

    std::vector<double> u_bd(bd.size()), u_in(in.size());
    for (std::size_t i = 0; i < bd.size(); ++i) u_bd[i] = u(bd[i]);
    for (std::size_t i = 0; i < in.size(); ++i) u_in[i] = u(in[i]);

    ComparisonReport rep;
    rep.property = from_above ? Property::CGCA : Property::CGCB;
    rep.tolerance = tol;
    rep.max_margin = -std::numeric_limits<double>::infinity();

    for (const Vec2& x0 : vertices) {
        for (double k : k_grid) {
            double b;
            if (from_above) {
                double m = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < bd.size(); ++i)
                    m = std::max(m, u_bd[i] - eval_cone(Hc, k, to_vec(bd[i] - x0)).value);
                b = m;
            } else {
                double m = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < bd.size(); ++i)
                    m = std::min(m, u_bd[i] + eval_cone(Hc, k, to_vec(bd[i] - x0)).value);
                b = m;
            }
            const ScanBest best = scan_max(in.size(), [&](std::size_t i) {
                const double cone = eval_cone(Hc, k, to_vec(in[i] - x0)).value;
                return from_above ? u_in[i] - (b + cone) : (b - cone) - u_in[i];
            });
            if (!best.found()) continue;
            if (best.value > rep.max_margin) {
                rep.max_margin = best.value;
                if (best.value > tol) {
                    Witness w;
                    w.vertex = x0;
                    w.k = k;
                    w.b = b;
                    w.x = in[best.index];
                    w.violation = best.value;
                    rep.witness = w;
                }
            }
        }
    }
    rep.status = rep.witness ? CheckStatus::Violation : CheckStatus::Pass;
    rep.passed = rep.status == CheckStatus::Pass;
    return rep;
}

}  // namespace

std::vector<Vec2> default_vertices(const DomainDesc& region) {
    std::vector<Vec2> v;
    if (region.is_annulus()) v.push_back(region.center);  // the hole keeps it outside
    const double R = 2.0 * region.r_outer;
    for (int a = 0; a < 4; ++a) {
        const double t = M_PI_2 * a;
        v.push_back(Vec2{region.center[0] + R * std::cos(t), region.center[1] + R * std::sin(t)});
    }
    return v;
}

ComparisonReport check_cgca(const Field& u, const Hamiltonian& H, const DomainDesc& region,
                            const std::vector<Vec2>& vertices, const std::vector<double>& k_grid,
                            int N, const CheckOptions& opts) {
    return cone_comparison(u, H, region, vertices, k_grid, N, opts, true);
}

ComparisonReport check_cgcb(const Field& u, const Hamiltonian& H, const DomainDesc& region,
                            const std::vector<Vec2>& vertices, const std::vector<double>& k_grid,
                            int N, const CheckOptions& opts) {
    return cone_comparison(u, H, region, vertices, k_grid, N, opts, false);
}

ComparisonReport check_amle(const Field& u, const Hamiltonian& H, const DomainDesc& region,
                            double lambda, int boundary_n, int interior_n,
                            const CheckOptions& opts) {
    if (H.dim != 2) throw std::invalid_argument("comparison: Hamiltonian must be 2-dimensional");
    if (!(lambda > 0.0)) throw std::invalid_argument("check_amle: lambda must be > 0");
    const double tol = default_tol(u, opts);

    ComparisonReport rep;
    rep.property = Property::AMLE;
    rep.tolerance = tol;

    const auto bd = boundary_samples(region, boundary_n);
    std::vector<double> u_bd(bd.size());
    for (std::size_t i = 0; i < bd.size(); ++i) u_bd[i] = u(bd[i]);

    auto pair_defect = [&](const std::vector<Vec2>& pts, const std::vector<double>& vals,
                           std::size_t idx) {
        const std::size_t n = pts.size();
        const std::size_t i = idx / n, j = idx % n;
        if (i == j) return std::numeric_limits<double>::quiet_NaN();
        const Vec2 d = pts[i] - pts[j];
        return vals[i] - vals[j] - eval_cone(H, lambda, to_vec(d)).value;
    };

    const ScanBest bd_best = scan_max(bd.size() * bd.size(),
                                      [&](std::size_t idx) { return pair_defect(bd, u_bd, idx); });
    if (bd_best.found() && bd_best.value > tol) {
        Witness w;
        w.k = lambda;
        w.x = bd[bd_best.index % bd.size()];
        w.y = bd[bd_best.index / bd.size()];
        w.violation = bd_best.value;
        rep.witness = w;
        rep.status = CheckStatus::Vacuous;
        rep.passed = false;
        rep.max_margin = bd_best.value;
        rep.note = "boundary cone-Lipschitz precondition fails at the given level; nothing to test";
        return rep;
    }

    const auto in = interior_polar(region, u, interior_n);
    std::vector<double> u_in(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) u_in[i] = u(in[i]);

    const ScanBest in_best = scan_max(in.size() * in.size(),
                                      [&](std::size_t idx) { return pair_defect(in, u_in, idx); });
    rep.max_margin = in_best.found() ? in_best.value : 0.0;
    if (in_best.found() && in_best.value > tol) {
        Witness w;
        w.k = lambda;
        w.x = in[in_best.index % in.size()];
        w.y = in[in_best.index / in.size()];
        w.violation = in_best.value;
        rep.witness = w;
        rep.status = CheckStatus::Violation;
        rep.passed = false;
        return rep;
    }

    // Discrete gradient bound on grid fields; follows from the pair bound
    // in the continuum.
    if (u.is_grid()) {
        const Grid2& g = *u.grid();
        const double gtol = opts.gradient_tol ? *opts.gradient_tol : std::max(1e-8, 10.0 * g.h * g.h);
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                if (g.node_class(i, j) != NodeClass::Interior) continue;
                const Vec2 x = g.pos(i, j);
                if (!region.contains_point(x, 1e-9)) continue;
                const double hval = H.eval(to_vec(g.node_gradient(i, j)));
                if (hval > lambda + gtol) {
                    Witness w;
                    w.k = lambda;
                    w.x = x;
                    w.violation = hval - lambda;
                    rep.witness = w;
                    rep.status = CheckStatus::Violation;
                    rep.passed = false;
                    rep.note = "discrete gradient bound H(Du) <= lambda fails";
                    return rep;
                }
            }
        }
    }

    rep.status = CheckStatus::Pass;
    rep.passed = true;
    return rep;
}

ComparisonReport check_kcomparison(const Field& u, const Hamiltonian& H, const DomainDesc& region,
                                   const std::vector<Vec2>& vertices,
                                   const std::vector<double>& a_grid, int N,
                                   const CheckOptions& opts) {
    validate_vertices(region, vertices);
    if (a_grid.empty()) throw std::invalid_argument("check_kcomparison: empty slope grid");
    const double K = ratio_constant(H);
    const double tol = default_tol(u, opts);

    const auto bd = boundary_samples(region, N);
    const auto in = interior_lattice(region, u, opts.interior_nx, opts.interior_ny);
    std::vector<double> u_bd(bd.size()), u_in(in.size());
    for (std::size_t i = 0; i < bd.size(); ++i) u_bd[i] = u(bd[i]);
    for (std::size_t i = 0; i < in.size(); ++i) u_in[i] = u(in[i]);

    ComparisonReport rep;
    rep.property = Property::KComparison;
    rep.tolerance = tol;
    rep.max_margin = -std::numeric_limits<double>::infinity();
    rep.needed_k_factor = 0.0;

    // Both halves of the property: a boundary bound u <= a|x-x0| + b must
    // dilate to u <= K a|x-x0| + b inside, and the mirrored bound
    // u >= b' - a|x-x0| must dilate to u >= b' - K a|x-x0|.
    for (const Vec2& x0 : vertices) {
        for (double a : a_grid) {
            if (!(a > 0.0)) throw std::invalid_argument("check_kcomparison: slopes must be > 0");
            double b_above = -std::numeric_limits<double>::infinity();
            double b_below = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < bd.size(); ++i) {
                const double d = (bd[i] - x0).norm();
                b_above = std::max(b_above, u_bd[i] - a * d);
                b_below = std::min(b_below, u_bd[i] + a * d);
            }

            for (std::size_t i = 0; i < in.size(); ++i) {
                const double dist = (in[i] - x0).norm();
                if (!(dist > 0.0)) continue;
                const double excess_above = u_in[i] - b_above;
                const double excess_below = b_below - u_in[i];
                const double excess = std::max(excess_above, excess_below);
                if (excess > 0.0)
                    rep.needed_k_factor = std::max(rep.needed_k_factor, excess / (a * dist));
                const double v_above = excess_above - K * a * dist;
                const double v_below = excess_below - K * a * dist;
                const double v = std::max(v_above, v_below);
                if (v > rep.max_margin) {
                    rep.max_margin = v;
                    if (v > tol) {
                        Witness w;
                        w.vertex = x0;
                        w.a = a;
                        w.b = v_above >= v_below ? b_above : b_below;
                        w.k = v_above >= v_below ? 1.0 : -1.0;  // side flag
                        w.x = in[i];
                        w.violation = v;
                        rep.witness = w;
                    }
                }
            }
        }
    }
    rep.status = rep.witness ? CheckStatus::Violation : CheckStatus::Pass;
    rep.passed = rep.status == CheckStatus::Pass;
    return rep;
}

ComparisonReport check_segment(const Field& u, const Hamiltonian& H, double k0,
                               const std::vector<std::pair<Vec2, Vec2>>& pairs,
                               const CheckOptions& opts) {
    if (!(k0 > 0.0)) throw std::invalid_argument("check_segment: k0 must be > 0");
    if (!u.is_grid()) throw std::invalid_argument("check_segment: field must be grid-backed");
    const Grid2& g = *u.grid();
    const double tol = default_tol(u, opts);
    const double gtol = opts.gradient_tol ? *opts.gradient_tol : std::max(1e-8, 10.0 * g.h * g.h);

    ComparisonReport rep;
    rep.property = Property::Segment;
    rep.tolerance = tol;

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (g.node_class(i, j) != NodeClass::Interior) continue;
            const double hval = H.eval(to_vec(g.node_gradient(i, j)));
            if (hval > k0 + gtol) {
                Witness w;
                w.k = k0;
                w.x = g.pos(i, j);
                w.violation = hval - k0;
                rep.witness = w;
                rep.status = CheckStatus::PreconditionFailed;
                rep.passed = false;
                rep.note = "discrete gradient bound H(Du) <= k0 fails; segment inequality not applicable";
                return rep;
            }
        }
    }

    rep.max_margin = -std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : pairs) {
        for (int t = 0; t <= 64; ++t) {
            const Vec2 z = x + (y - x) * (t / 64.0);
            if (!u.can_eval(z))
                throw std::invalid_argument("check_segment: segment leaves the grid's active cells");
        }
        for (int dir = 0; dir < 2; ++dir) {
            const Vec2& from = dir == 0 ? x : y;
            const Vec2& to = dir == 0 ? y : x;
            const double v = u(to) - u(from) - eval_cone(H, k0, to_vec(to - from)).value;
            if (v > rep.max_margin) {
                rep.max_margin = v;
                if (v > tol) {
                    Witness w;
                    w.k = k0;
                    w.x = from;
                    w.y = to;
                    w.violation = v;
                    rep.witness = w;
                }
            }
        }
    }
    rep.status = rep.witness ? CheckStatus::Violation : CheckStatus::Pass;
    rep.passed = rep.status == CheckStatus::Pass;
    return rep;
}

ComparisonReport check_harnack(const Field& u, const Hamiltonian& H,
                               const std::vector<double>& radii, int N,
                               const CheckOptions& opts) {
    const DomainDesc& dom = u.domain();
    if (!dom.is_annulus())
        throw std::invalid_argument("check_harnack: field must live on a punctured disk (annulus)");
    const double R = dom.r_outer;
    const double Ktil = std::exp(ratio_constant(H) * M_PI);
    const double tol = default_tol(u, opts);

    ComparisonReport rep;
    rep.property = Property::Harnack;
    rep.tolerance = tol;
    rep.max_margin = -std::numeric_limits<double>::infinity();
    rep.note = "K_tilde = " + format_double(Ktil);

    for (double r : radii) {
        if (!(r < R / 2.0))
            throw std::invalid_argument("check_harnack: radii must stay below half the outer radius");
        const auto pts = circle_points(dom.center, r, N);
        double m = std::numeric_limits<double>::infinity(), M = -m;
        Vec2 xmin = pts[0], xmax = pts[0];
        for (const Vec2& x : pts) {
            const double v = u(x);
            if (v < 0.0)
                throw std::invalid_argument("check_harnack: field is negative at a sample; nonnegativity required");
            if (v < m) {
                m = v;
                xmin = x;
            }
            if (v > M) {
                M = v;
                xmax = x;
            }
        }
        const double viol = M - Ktil * m;
        if (viol > rep.max_margin) {
            rep.max_margin = viol;
            if (viol > tol) {
                Witness w;
                w.radius = r;
                w.x = xmax;
                w.y = xmin;
                w.violation = viol;
                rep.witness = w;
            }
        }
    }
    rep.status = rep.witness ? CheckStatus::Violation : CheckStatus::Pass;
    rep.passed = rep.status == CheckStatus::Pass;
    return rep;
}

ComparisonReport check_extremum_principle(const Field& u, const DomainDesc& region, int boundary_n,
                                          int interior_n, const CheckOptions& opts) {
    const double tol = default_tol(u, opts);
    const auto bd = boundary_samples(region, boundary_n);
    const auto in = interior_lattice(region, u, interior_n, interior_n);
    if (in.empty()) throw std::invalid_argument("check_extremum_principle: no interior samples");

    double bd_min = std::numeric_limits<double>::infinity(), bd_max = -bd_min;
    for (const Vec2& x : bd) {
        const double v = u(x);
        bd_min = std::min(bd_min, v);
        bd_max = std::max(bd_max, v);
    }

    ComparisonReport rep;
    rep.property = Property::MaxPrinciple;
    rep.tolerance = tol;
    rep.max_margin = -std::numeric_limits<double>::infinity();
    for (const Vec2& x : in) {
        const double v = u(x);
        const double over = v - bd_max;
        const double under = bd_min - v;
        const double worst = std::max(over, under);
        if (worst > rep.max_margin) {
            rep.max_margin = worst;
            if (worst > tol) {
                Witness w;
                w.x = x;
                w.a = over >= under ? 1.0 : -1.0;
                w.b = over >= under ? bd_max : bd_min;
                w.violation = worst;
                rep.witness = w;
            }
        }
    }
    rep.status = rep.witness ? CheckStatus::Violation : CheckStatus::Pass;
    rep.passed = rep.status == CheckStatus::Pass;
    return rep;
}

double replay_witness(const Field& u, const Hamiltonian& H, const ComparisonReport& report) {
    if (!report.witness) throw std::invalid_argument("replay_witness: report has no witness");
    const Witness& w = *report.witness;
    switch (report.property) {
        case Property::CGCA:
            return u(w.x) - (w.b + eval_cone(H, w.k, to_vec(w.x - w.vertex)).value);
        case Property::CGCB:
            return (w.b - eval_cone(reflect(H), w.k, to_vec(w.x - w.vertex)).value) - u(w.x);
        case Property::AMLE: {
            if (w.y) {
                const Vec2 d = *w.y - w.x;
                return u(*w.y) - u(w.x) - eval_cone(H, w.k, to_vec(d)).value;
            }
            return H.eval(to_vec(u.gradient(w.x))) - w.k;
        }
        case Property::KComparison: {
            const double Kd = ratio_constant(H) * w.a * (w.x - w.vertex).norm();
            return w.k >= 0 ? u(w.x) - (w.b + Kd) : (w.b - Kd) - u(w.x);
        }
        case Property::Segment:
            return u(*w.y) - u(w.x) - eval_cone(H, w.k, to_vec(*w.y - w.x)).value;
        case Property::Harnack:
            return u(w.x) - std::exp(ratio_constant(H) * M_PI) * u(*w.y);
        case Property::MaxPrinciple:
            return w.a > 0 ? u(w.x) - w.b : w.b - u(w.x);
    }
    throw std::logic_error("replay_witness: unknown property");
}

}  // namespace aronsson
