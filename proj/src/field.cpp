#include "aronsson/field.hpp"

#include <cmath>

namespace aronsson {

bool DomainDesc::contains_point(const Vec2& x, double margin) const {
    const double d = (x - center).norm();
    if (d >= r_outer - margin) return false;
    return r_inner == 0.0 || d > r_inner + margin;
}

bool DomainDesc::contains_circle(const Vec2& c, double r) const {
    if (!(r > 0.0)) return false;
    const double d = (c - center).norm();
    const double lo = std::abs(d - r);  // closest circle point to the domain center
    const double hi = d + r;
    return lo > r_inner && hi < r_outer;
}

DomainDesc disk(const Vec2& center, double radius) { return {center, 0.0, radius}; }

DomainDesc annulus(const Vec2& center, double r_inner, double r_outer) {
    return {center, r_inner, r_outer};
}

Field Field::from_callable(const DomainDesc& d, std::function<double(const Vec2&)> f,
                           std::function<Vec2(const Vec2&)> grad) {
    Field u;
    u.domain_ = d;
    u.eval_ = std::move(f);
    u.grad_ = std::move(grad);
    return u;
}

Field Field::from_grid(std::shared_ptr<const Grid2> g, const DomainDesc& d) {
    Field u;
    u.domain_ = d;
    u.grid_ = std::move(g);
    const Grid2* gp = u.grid_.get();
    u.eval_ = [gp](const Vec2& x) { return gp->interp(x); };
    return u;
}

Vec2 Field::gradient(const Vec2& x) const {
    if (grad_) return grad_(x);
    if (grid_) return grid_->interp_gradient(x);
    const double h = 1e-6 * std::max(1.0, x.norm());
    const Vec2 ex{h, 0.0}, ey{0.0, h};
    return {(eval_(x + ex) - eval_(x - ex)) / (2 * h), (eval_(x + ey) - eval_(x - ey)) / (2 * h)};
}

bool Field::can_eval(const Vec2& x) const {
    if (grid_) return grid_->can_eval(x);
    return domain_.contains_point(x, -1e-12);
}

std::vector<double> sample_circle(const Field& u, const Vec2& x0, double r, int N) {
    if (N < 16) throw std::invalid_argument("sample_circle: need N >= 16");
    if (!u.domain().contains_circle(x0, r))
        throw std::invalid_argument("sample_circle: circle leaves the field domain");
    std::vector<double> out(N);
    for (int j = 0; j < N; ++j) {
        const double t = 2.0 * M_PI * j / N;
        out[j] = u(Vec2{x0[0] + r * std::cos(t), x0[1] + r * std::sin(t)});
    }
    return out;
}

namespace {

// Shared bisection for both slope signs. deltas[j] are the increments that
// must be dominated by r * C_k(e_j).
double slope_bisect(const Hamiltonian& H, const std::vector<Vec>& dirs,
                    const std::vector<double>& deltas, double r) {
    auto pred = [&](double k) {
        for (std::size_t j = 0; j < dirs.size(); ++j) {
            if (deltas[j] <= 0.0) continue;
            if (deltas[j] > r * eval_cone(H, k, dirs[j]).value) return false;
        }
        return true;
    };

    double k_hi = 1e-12;
    if (pred(k_hi)) return 0.0;
    bool bounded = false;
    for (int d = 0; d < 60; ++d) {
        k_hi *= 2.0;
        if (pred(k_hi)) {
            bounded = true;
            break;
        }
    }
    if (!bounded) throw UnboundedSlopeError("slope: no cone level below 2^60 * 1e-12 dominates the circle");

    double k_lo = 0.5 * k_hi;
    while (k_hi - k_lo > 1e-10) {
        const double mid = 0.5 * (k_lo + k_hi);
        if (pred(mid))
            k_hi = mid;
        else
            k_lo = mid;
    }
    return k_hi;
}

std::vector<Vec> circle_directions(int N) {
    std::vector<Vec> dirs(N);
    for (int j = 0; j < N; ++j) {
        const double t = 2.0 * M_PI * j / N;
        Vec e(2);
        e << std::cos(t), std::sin(t);
        dirs[j] = e;
    }
    return dirs;
}

void check_planar(const Hamiltonian& H) {
    if (H.dim != 2) throw std::invalid_argument("slope: Hamiltonian must be 2-dimensional");
}

}  // namespace

double slope_plus(const Field& u, const Hamiltonian& H, const Vec2& x0, double r, int N) {
    check_planar(H);
    const std::vector<double> vals = sample_circle(u, x0, r, N);
    const double u0 = u(x0);
    std::vector<double> deltas(N);
    for (int j = 0; j < N; ++j) deltas[j] = vals[j] - u0;
    return slope_bisect(H, circle_directions(N), deltas, r);
}

double slope_minus(const Field& u, const Hamiltonian& H, const Vec2& x0, double r, int N) {
    check_planar(H);
    const std::vector<double> vals = sample_circle(u, x0, r, N);
    const double u0 = u(x0);
    // u(x) - u(x0) >= -C_k^{H^}(x - x0) is -delta <= C_k^{H^}(x - x0).
    std::vector<double> deltas(N);
    for (int j = 0; j < N; ++j) deltas[j] = u0 - vals[j];
    return slope_bisect(reflect(H), circle_directions(N), deltas, r);
}

SlopeEstimate slope_ladder(const Field& u, const Hamiltonian& H, const Vec2& x0,
                           const std::vector<double>& radii, int N) {
    SlopeEstimate est;
    est.center = x0;
    est.radii = radii;
    est.angular_samples = N;
    for (double r : radii) {
        est.s_plus.push_back(slope_plus(u, H, x0, r, N));
        est.s_minus.push_back(slope_minus(u, H, x0, r, N));
    }
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (est.s_plus[i] < est.s_plus[i - 1] - 1e-8) est.plus_monotone = false;
        if (est.s_minus[i] < est.s_minus[i - 1] - 1e-8) est.minus_monotone = false;
    }
    return est;
}

SlopeLimit slope_limit(const Field& u, const Hamiltonian& H, const Vec2& x0,
                       const std::vector<double>& radii, int N) {
    if (radii.size() < 2) throw std::invalid_argument("slope_limit: need at least two radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] < radii[i - 1]))
            throw std::invalid_argument("slope_limit: radii must decrease");

    const std::size_t last = radii.size() - 1;
    SlopeLimit lim;
    const double sp_prev = slope_plus(u, H, x0, radii[last - 1], N);
    const double sm_prev = slope_minus(u, H, x0, radii[last - 1], N);
    lim.s_plus = slope_plus(u, H, x0, radii[last], N);
    lim.s_minus = slope_minus(u, H, x0, radii[last], N);
    const bool cp = std::abs(lim.s_plus - sp_prev) <= 1e-4 * std::max(1.0, std::abs(lim.s_plus));
    const bool cm = std::abs(lim.s_minus - sm_prev) <= 1e-4 * std::max(1.0, std::abs(lim.s_minus));
    lim.cauchy = cp && cm;
    return lim;
}

RadialExtremes radial_extremes(const Field& u, const Vec2& x0, const std::vector<double>& radii,
                               int N) {
    RadialExtremes ext;
    ext.radii = radii;
    for (double r : radii) {
        const auto vals = sample_circle(u, x0, r, N);
        double lo = vals[0], hi = vals[0];
        for (double v : vals) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        ext.m.push_back(lo);
        ext.M.push_back(hi);
    }
    auto trend = [](const std::vector<double>& s) {
        Monotonicity t;
        for (std::size_t i = 1; i < s.size(); ++i) {
            const double slack = 1e-12 * std::max(1.0, std::abs(s[i]));
            if (s[i] < s[i - 1] - slack) t.nondecreasing = false;
            if (s[i] > s[i - 1] + slack) t.nonincreasing = false;
        }
        return t;
    };
    ext.m_trend = trend(ext.m);
    ext.M_trend = trend(ext.M);
    return ext;
}

}  // namespace aronsson
