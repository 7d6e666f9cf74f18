#pragma once

#include "aronsson/cone.hpp"
#include "aronsson/grid.hpp"

#include <memory>

namespace aronsson {

/// Disk (r_inner = 0) or annulus around a center. Membership is open on
/// both sides.
struct DomainDesc {
    Vec2 center{0.0, 0.0};
    double r_inner = 0.0;
    double r_outer = 1.0;

    bool is_annulus() const { return r_inner > 0.0; }
    bool contains_point(const Vec2& x, double margin = 0.0) const;
    /// The circle |x - c| = r (the curve itself) lies inside the domain.
    bool contains_circle(const Vec2& c, double r) const;
};

DomainDesc disk(const Vec2& center, double radius);
DomainDesc annulus(const Vec2& center, double r_inner, double r_outer);

/// A scalar function on a planar domain, either callable-backed or backed
/// by a bilinear grid interpolant.
class Field {
public:
    Field() = default;

    static Field from_callable(const DomainDesc& d, std::function<double(const Vec2&)> f,
                               std::function<Vec2(const Vec2&)> grad = nullptr);
    static Field from_grid(std::shared_ptr<const Grid2> g, const DomainDesc& d);

    double operator()(const Vec2& x) const { return eval_(x); }

    /// Analytic gradient when provided, the interpolated node-gradient
    /// field for grids, central differences otherwise.
    Vec2 gradient(const Vec2& x) const;

    bool has_analytic_gradient() const { return static_cast<bool>(grad_); }
    bool is_grid() const { return static_cast<bool>(grid_); }
    const Grid2* grid() const { return grid_.get(); }
    const DomainDesc& domain() const { return domain_; }

    /// True when evaluation at x is meaningful (inside the domain, and on
    /// an active interpolation cell for grid fields).
    bool can_eval(const Vec2& x) const;

private:
    DomainDesc domain_;
    std::function<double(const Vec2&)> eval_;
    std::function<Vec2(const Vec2&)> grad_;
    std::shared_ptr<const Grid2> grid_;
};

/// u sampled at x0 + r (cos(2 pi j / N), sin(2 pi j / N)), j = 0..N-1.
/// Requires N >= 16 and the circle inside the domain.
std::vector<double> sample_circle(const Field& u, const Vec2& x0, double r, int N);

class UnboundedSlopeError : public std::runtime_error {
public:
    explicit UnboundedSlopeError(const std::string& what) : std::runtime_error(what) {}
};

/// S_r^+(H, u, x0): the smallest k such that u(x) - u(x0) <= C_k^H(x - x0)
/// on the sampled circle of radius r. Found by doubling then bisection on
/// the monotone predicate; absolute tolerance 1e-10 on k. Returns 0 when
/// every sample is dominated at arbitrarily small k. Throws
/// UnboundedSlopeError if no level below ~1e6 suffices.
double slope_plus(const Field& u, const Hamiltonian& H, const Vec2& x0, double r, int N = 720);

/// Mirror case with reflected cones: smallest k such that
/// u(x) - u(x0) >= -C_k^{H^}(x - x0) on the circle.
double slope_minus(const Field& u, const Hamiltonian& H, const Vec2& x0, double r, int N = 720);

struct SlopeEstimate {
    Vec2 center{0.0, 0.0};
    std::vector<double> radii;
    std::vector<double> s_plus;
    std::vector<double> s_minus;
    int angular_samples = 0;
    // Nondecreasing within 1e-8; a false flag is a comparison-with-cones
    // violation certificate for the sampled field.
    bool plus_monotone = true;
    bool minus_monotone = true;
};

/// Slopes over an increasing ladder of radii.
SlopeEstimate slope_ladder(const Field& u, const Hamiltonian& H, const Vec2& x0,
                           const std::vector<double>& radii, int N = 720);

struct SlopeLimit {
    double s_plus = 0.0;
    double s_minus = 0.0;
    bool cauchy = false;  // last two rungs differ by <= 1e-4 * max(1, value)
};

/// Values at the smallest radius of a decreasing ladder plus a Cauchy flag.
SlopeLimit slope_limit(const Field& u, const Hamiltonian& H, const Vec2& x0,
                       const std::vector<double>& radii, int N = 720);

struct Monotonicity {
    bool nondecreasing = true;
    bool nonincreasing = true;
};

struct RadialExtremes {
    std::vector<double> radii;
    std::vector<double> m;  // circle minima
    std::vector<double> M;  // circle maxima
    Monotonicity m_trend;
    Monotonicity M_trend;
};

/// Circle minima and maxima over a ladder of radii with monotonicity report.
RadialExtremes radial_extremes(const Field& u, const Vec2& x0, const std::vector<double>& radii,
                               int N = 720);

inline Vec to_vec(const Vec2& x) {
    Vec v(2);
    v << x[0], x[1];
    return v;
}

}  // namespace aronsson
