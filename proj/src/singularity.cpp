#include "aronsson/singularity.hpp"

#include <cmath>
#include <limits>

namespace aronsson {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Removable: return "removable";
        case Verdict::ConePlus: return "cone_plus";
        case Verdict::ConeMinus: return "cone_minus";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

LimitResult limit_at_center(const Field& u, const Vec2& x0, const std::vector<double>& radii,
                            int N) {
    if (radii.size() < 3) throw std::invalid_argument("limit_at_center: need at least 3 radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] < radii[i - 1]))
            throw std::invalid_argument("limit_at_center: radii must decrease");

    LimitResult res;
    res.evidence.radii = radii;
    for (double r : radii) {
        const auto vals = sample_circle(u, x0, r, N);
        double lo = vals[0], hi = vals[0];
        for (double v : vals) {
            if (v < 0.0)
                throw std::invalid_argument("limit_at_center: field is negative on a sampled circle");
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        res.evidence.m.push_back(lo);
        res.evidence.M.push_back(hi);
    }

    // Count monotone rungs walking outward from the smallest radius.
    auto monotone_rungs = [](const std::vector<double>& ladder) {
        const int n = static_cast<int>(ladder.size());
        if (n < 2) return n;
        int sign = 0;  // +1 increasing with radius, -1 decreasing
        int rungs = 1;
        for (int i = n - 1; i-- > 0;) {
            const double step = ladder[i] - ladder[i + 1];  // toward larger radius
            const double slack = 1e-11 * std::max(1.0, std::abs(ladder[i]));
            int s = 0;
            if (step > slack) s = 1;
            else if (step < -slack) s = -1;
            if (s != 0 && sign == 0) sign = s;
            if (s != 0 && s != sign) break;
            ++rungs;
        }
        return rungs;
    };
    res.evidence.monotone_rungs_m = monotone_rungs(res.evidence.m);
    res.evidence.monotone_rungs_M = monotone_rungs(res.evidence.M);

    // The circle midpoints carry the radial trend of the profile,
    // b + mean-slope * r to first order; extrapolating the last two
    // midpoints to r = 0 removes it, so exact cones and planes return b
    // without bias.
    const std::size_t last = radii.size() - 1;
    const double mid_last = 0.5 * (res.evidence.m[last] + res.evidence.M[last]);
    const double mid_prev = 0.5 * (res.evidence.m[last - 1] + res.evidence.M[last - 1]);
    const double rho = radii[last - 1] / radii[last];
    res.b = (rho * mid_last - mid_prev) / (rho - 1.0);
    res.evidence.last_gap = res.evidence.M[last] - res.evidence.m[last];
    res.evidence.cauchy = res.evidence.last_gap <= 1e-3 * std::max(1.0, std::abs(res.b));

    const int need = std::min<int>(4, static_cast<int>(radii.size()));
    res.ok = res.evidence.cauchy && res.evidence.monotone_rungs_m >= need &&
             res.evidence.monotone_rungs_M >= need;
    return res;
}

std::vector<Vec2> PolarMesh::points() const {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(nr) * ntheta);
    for (int s = 0; s < nr; ++s) {
        const double r = r0 + (r1 - r0) * s / (nr - 1.0);
        for (int a = 0; a < ntheta; ++a) {
            const double t = 2.0 * M_PI * a / ntheta;
            pts.push_back(Vec2{r * std::cos(t), r * std::sin(t)});
        }
    }
    return pts;
}

std::vector<BlowupField> blowup_sequence(const Field& u, const Vec2& x0, double b,
                                         const std::vector<double>& scales,
                                         const PolarMesh& mesh) {
    const auto pts = mesh.points();
    std::vector<BlowupField> out;
    for (double h : scales) {
        if (!(h > 0.0)) throw std::invalid_argument("blowup_sequence: scales must be positive");
        BlowupField bf;
        bf.scale = h;

        bool fits = true;
        for (const Vec2& x : pts) {
            if (!u.can_eval(x0 + h * x)) {
                fits = false;
                break;
            }
        }
        if (!fits) {
            bf.truncated = true;
            out.push_back(std::move(bf));
            continue;
        }

        // The center value must stay consistent with the rescaled field:
        // any error in b becomes a constant offset of size (b_true - b)/h,
        // and the slope functionals difference against w(0).
        const bool center_ok = u.can_eval(x0);
        auto eval = [&u, x0, b, h, center_ok](const Vec2& x) {
            if (x[0] == 0.0 && x[1] == 0.0 && !center_ok) return 0.0;
            return (u(Vec2(x0 + h * x)) - b) / h;
        };
        const double R = u.domain().r_outer / h;
        bf.field = Field::from_callable(disk(Vec2{0.0, 0.0}, R), eval);
        bf.mesh_values.resize(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) bf.mesh_values[i] = eval(pts[i]);
        out.push_back(std::move(bf));
    }
    return out;
}

ClassifyConfig default_classify_config() {
    ClassifyConfig cfg;
    for (int j = 0; j <= 8; ++j) cfg.limit_radii.push_back(0.1 * std::pow(2.0, -j));
    for (int j = 0; j <= 6; ++j) cfg.scales.push_back(0.05 * std::pow(4.0, -j));
    return cfg;
}

namespace {

// last value below the threshold and the whole ladder non-increasing up to
// 5 percent slack
bool decreases_below(const std::vector<double>& seq, double threshold) {
    if (seq.empty()) return false;
    if (!(seq.back() <= threshold)) return false;
    for (std::size_t i = 1; i < seq.size(); ++i)
        if (seq[i] > seq[i - 1] * 1.05 + 1e-9) return false;
    return true;
}

Vec2 affine_fit(const std::vector<Vec2>& pts, const std::vector<double>& vals) {
    double sxx = 0, sxy = 0, syy = 0, bx = 0, by = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        sxx += pts[i][0] * pts[i][0];
        sxy += pts[i][0] * pts[i][1];
        syy += pts[i][1] * pts[i][1];
        bx += pts[i][0] * vals[i];
        by += pts[i][1] * vals[i];
    }
    const double det = sxx * syy - sxy * sxy;
    if (std::abs(det) < 1e-14) return Vec2{0.0, 0.0};
    return Vec2{(syy * bx - sxy * by) / det, (sxx * by - sxy * bx) / det};
}

// Least squares of vals ~ c + p . x. The rescaled fields carry a constant
// offset of size (b_true - b_estimate) / h, so every profile fit gets an
// intercept; the slope functionals are difference-based and unaffected.
void affine_fit_intercept(const std::vector<Vec2>& pts, const std::vector<double>& vals,
                          Vec2& p, double& c) {
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Eigen::Vector3d row{1.0, pts[i][0], pts[i][1]};
        A += row * row.transpose();
        rhs += vals[i] * row;
    }
    const Eigen::Vector3d sol = A.ldlt().solve(rhs);
    c = sol[0];
    p = Vec2{sol[1], sol[2]};
}

}  // namespace

SingularityReport classify(const Field& u, const Hamiltonian& H, const Vec2& x0,
                           const ClassifyConfig& cfg) {
    SingularityReport rep;
    rep.center = x0;

    const LimitResult lim = limit_at_center(u, x0, cfg.limit_radii, cfg.limit_samples);
    rep.limit_evidence = lim.evidence;
    rep.limit_ok = lim.ok;
    rep.b = lim.b;
    if (!lim.ok) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "limit at the center did not certify (non-Cauchy gap or non-monotone ladders)";
        return rep;
    }

    const auto pts = cfg.mesh.points();
    const auto ladder = blowup_sequence(u, x0, lim.b, cfg.scales, cfg.mesh);
    const Hamiltonian Hhat = reflect(H);

    std::vector<Vec2> p_fits;
    std::vector<double> aff_offsets, cp_offsets, cm_offsets;
    for (const BlowupField& bf : ladder) {
        if (bf.truncated) {
            rep.note = "scale ladder truncated by the field domain";
            continue;
        }
        rep.scales.push_back(bf.scale);

        Vec2 p;
        double c_aff = 0.0;
        affine_fit_intercept(pts, bf.mesh_values, p, c_aff);
        p_fits.push_back(p);
        aff_offsets.push_back(c_aff);
        double ares = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            ares = std::max(ares, std::abs(bf.mesh_values[i] - c_aff - p.dot(pts[i])));
        rep.affine_residuals.push_back(ares / std::max(1.0, p.norm()));

        const double kp = slope_plus(bf.field, H, Vec2{0.0, 0.0}, 1.0, cfg.slope_samples);
        rep.k_plus_ladder.push_back(kp);
        if (kp > 1e-12) {
            std::vector<double> cone_vals(pts.size());
            double scale = 0.0, mean_off = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                cone_vals[i] = eval_cone(H, kp, to_vec(pts[i])).value;
                scale = std::max(scale, std::abs(cone_vals[i]));
                mean_off += bf.mesh_values[i] - cone_vals[i];
            }
            mean_off /= static_cast<double>(pts.size());
            double res = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i)
                res = std::max(res, std::abs(bf.mesh_values[i] - cone_vals[i] - mean_off));
            rep.cone_plus_residuals.push_back(res / std::max(scale, 1e-12));
            cp_offsets.push_back(mean_off);
        } else {
            rep.cone_plus_residuals.push_back(std::numeric_limits<double>::infinity());
            cp_offsets.push_back(0.0);
        }

        const double km = slope_minus(bf.field, H, Vec2{0.0, 0.0}, 1.0, cfg.slope_samples);
        rep.k_minus_ladder.push_back(km);
        if (km > 1e-12) {
            std::vector<double> cone_vals(pts.size());
            double scale = 0.0, mean_off = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                cone_vals[i] = eval_cone(Hhat, km, to_vec(pts[i])).value;
                scale = std::max(scale, std::abs(cone_vals[i]));
                mean_off += bf.mesh_values[i] + cone_vals[i];
            }
            mean_off /= static_cast<double>(pts.size());
            double res = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i)
                res = std::max(res, std::abs(bf.mesh_values[i] + cone_vals[i] - mean_off));
            rep.cone_minus_residuals.push_back(res / std::max(scale, 1e-12));
            cm_offsets.push_back(mean_off);
        } else {
            rep.cone_minus_residuals.push_back(std::numeric_limits<double>::infinity());
            cm_offsets.push_back(0.0);
        }
    }

    if (rep.scales.size() < 2) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "fewer than two usable scales";
        return rep;
    }

    const std::size_t last = rep.scales.size() - 1;

    const Vec2 p_last = p_fits[last];
    const bool affine_stable =
        (p_last - p_fits[last - 1]).norm() <= cfg.affine_stab_tol * std::max(1.0, p_last.norm());
    const bool removable_ok =
        decreases_below(rep.affine_residuals, cfg.affine_res_threshold) && affine_stable;

    auto cone_ok = [&](const std::vector<double>& kladder, const std::vector<double>& resladder) {
        const double klast = kladder[last];
        if (!(klast > 1e-10)) return false;
        if (!decreases_below(resladder, cfg.cone_res_threshold)) return false;
        return std::abs(klast - kladder[last - 1]) <= cfg.k_stab_rel * klast;
    };
    const bool coneplus_ok = cone_ok(rep.k_plus_ladder, rep.cone_plus_residuals);
    const bool coneminus_ok = cone_ok(rep.k_minus_ladder, rep.cone_minus_residuals);

    const int hits = int(removable_ok) + int(coneplus_ok) + int(coneminus_ok);
    if (hits != 1) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = hits == 0 ? "no branch stabilized" : "conflicting branches stabilized";
        rep.affine_p = p_last;
        return rep;
    }
    // The fitted intercept at the finest scale refines the limit value:
    // b_true = b_estimate + h * offset.
    if (removable_ok) {
        rep.verdict = Verdict::Removable;
        rep.affine_p = p_last;
        rep.b = lim.b + rep.scales[last] * aff_offsets[last];
    } else if (coneplus_ok) {
        rep.verdict = Verdict::ConePlus;
        rep.k = rep.k_plus_ladder[last];
        rep.b = lim.b + rep.scales[last] * cp_offsets[last];
    } else {
        rep.verdict = Verdict::ConeMinus;
        rep.k = rep.k_minus_ladder[last];
        rep.b = lim.b + rep.scales[last] * cm_offsets[last];
    }
    return rep;
}

GrowthReport detect_strict_growth(const Field& u, const Vec2& x0, const Hamiltonian& H,
                                  const std::vector<double>& probe_radii, int N) {
    (void)H;  // the detector is purely metric; H enters through the callers
    if (probe_radii.empty()) throw std::invalid_argument("detect_strict_growth: need probe radii");
    double rmin = probe_radii[0];
    for (double r : probe_radii) rmin = std::min(rmin, r);

    const double u0 = u(x0);
    GrowthReport rep;

    // Plane through the smallest circle.
    std::vector<Vec2> xs;
    std::vector<double> dv;
    for (int j = 0; j < N; ++j) {
        const double t = 2.0 * M_PI * j / N;
        const Vec2 x{rmin * std::cos(t), rmin * std::sin(t)};
        xs.push_back(x);
        dv.push_back(u(x0 + x) - u0);
    }
    rep.p = affine_fit(xs, dv);

    double inf_g = std::numeric_limits<double>::infinity();
    double sup_g = -inf_g;
    for (double r : probe_radii) {
        for (int j = 0; j < N; ++j) {
            const double t = 2.0 * M_PI * j / N;
            const Vec2 x{r * std::cos(t), r * std::sin(t)};
            const double g = (u(x0 + x) - u0 - rep.p.dot(x)) / r;
            inf_g = std::min(inf_g, g);
            sup_g = std::max(sup_g, g);
        }
    }
    rep.inf_ratio = inf_g;
    rep.sup_ratio = sup_g;

    for (int j = 1; j <= 20; ++j) {
        const double eps = std::pow(2.0, -j);
        if (inf_g >= eps) {
            rep.found = GrowthCase::CaseII;
            rep.epsilon = eps;
            return rep;
        }
        if (sup_g <= -eps) {
            rep.found = GrowthCase::CaseIII;
            rep.epsilon = eps;
            return rep;
        }
    }
    rep.found = GrowthCase::Neither;
    return rep;
}

RayReport ray_equality_check(const Field& u, const Hamiltonian& H, const Vec2& x0, const Vec2& e,
                             const std::vector<double>& t_grid) {
    if (std::abs(e.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("ray_equality_check: e must be a unit vector");
    const double c1 = eval_cone(H, 1.0, to_vec(e)).value;
    const double u0 = u(x0);
    RayReport rep;
    for (double t : t_grid) {
        if (t > 0.0) throw std::invalid_argument("ray_equality_check: t grid must be <= 0");
        const Vec2 x = x0 + t * e;
        const double d = u(x) - u0 - t * c1;
        rep.t_values.push_back(t);
        rep.deviation.push_back(d);
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(d));
    }
    return rep;
}

FlowTrace flow_trace(const Field& u, const Hamiltonian& H, const Vec2& start, const Vec2& x0,
                     double step, int max_steps) {
    if (!(step > 0.0)) throw std::invalid_argument("flow_trace: step must be > 0");
    const auto grad2 = [&H](const Vec2& p) {
        if (H.grad2) return H.grad2(p);
        const Vec g = H.grad(to_vec(p));
        return Vec2{g[0], g[1]};
    };

    FlowTrace tr;
    auto du_at = [&](const Vec2& x) { return u.gradient(x); };

    Vec2 xi = start;
    {
        const Vec2 g0 = du_at(xi);
        if (g0.norm() <= 1e-10)
            throw std::invalid_argument("flow_trace: |Du| vanishes at the start point");
    }

    double t = 0.0;
    auto record = [&](const Vec2& x) {
        tr.states.push_back(x);
        tr.times.push_back(t);
        tr.levels.push_back(H.eval(to_vec(du_at(x))));
    };
    record(xi);

    // Time step scaled so one step moves about `step` in space.
    for (int n = 0; n < max_steps; ++n) {
        if ((xi - x0).norm() <= step) {
            tr.stop = FlowStop::ReachedCenter;
            break;
        }
        const Vec2 g = du_at(xi);
        if (g.norm() < 1e-12) {
            tr.stop = FlowStop::GradientVanished;
            break;
        }
        const Vec2 v1 = -grad2(g);
        const double speed = v1.norm();
        if (speed < 1e-14) {
            tr.stop = FlowStop::GradientVanished;
            break;
        }
        const double dt = step / speed;

        auto vel = [&](const Vec2& x, Vec2& out) {
            if (!u.can_eval(x)) return false;
            out = -grad2(du_at(x));
            return true;
        };
        Vec2 k1 = v1, k2, k3, k4;
        bool ok = vel(xi + 0.5 * dt * k1, k2) && vel(xi + 0.5 * dt * k2, k3) &&
                  vel(xi + dt * k3, k4);
        if (!ok) {
            tr.stop = FlowStop::LeftDomain;
            break;
        }
        const Vec2 xn = xi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!u.can_eval(xn)) {
            tr.stop = FlowStop::LeftDomain;
            break;
        }
        xi = xn;
        t += dt;
        record(xi);
        if (n + 1 == max_steps) tr.stop = FlowStop::MaxSteps;
    }

    // Drift measures conservation while the flow is running; the terminal
    // state inside the stopping disk stays in `levels` but is not folded
    // in, since grid gradients are unresolved that close to a vertex.
    for (std::size_t i = 0; i < tr.levels.size(); ++i) {
        if (i + 1 == tr.levels.size() && tr.stop == FlowStop::ReachedCenter &&
            (tr.states[i] - x0).norm() <= step)
            break;
        tr.level_drift = std::max(tr.level_drift, std::abs(tr.levels[i] - tr.levels[0]));
    }
    return tr;
}

DomainCheckReport corollary_domain_check(const Hamiltonian& H, double k, const Vec2& x0,
                                         const std::vector<Vec2>& boundary_pts, double tol,
                                         double tol_k) {
    if (!(k > 0.0)) throw std::invalid_argument("corollary_domain_check: k must be > 0");
    if (boundary_pts.empty())
        throw std::invalid_argument("corollary_domain_check: need boundary samples");

    DomainCheckReport rep;
    for (const Vec2& x : boundary_pts)
        rep.max_boundary_deviation = std::max(
            rep.max_boundary_deviation, std::abs(eval_cone(H, k, to_vec(x - x0)).value - 1.0));

    // k0 = inf { k : C_k >= 1 on the samples }; the predicate is monotone.
    auto covered = [&](double kk) {
        for (const Vec2& x : boundary_pts)
            if (eval_cone(H, kk, to_vec(x - x0)).value < 1.0) return false;
        return true;
    };
    double hi = 1e-6;
    while (!covered(hi)) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("corollary_domain_check: no covering level found");
    }
    double lo = hi / 2.0;
    for (int it = 0; it < 100 && (hi - lo) > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (covered(mid))
            hi = mid;
        else
            lo = mid;
    }
    rep.k0 = hi;
    rep.passed = rep.max_boundary_deviation <= tol && std::abs(rep.k0 - k) <= tol_k;
    return rep;
}

}  // namespace aronsson
