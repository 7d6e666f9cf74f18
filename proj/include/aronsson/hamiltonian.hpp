#pragma once

#include "aronsson/common.hpp"

#include <functional>
#include <stdexcept>
#include <string>

namespace aronsson {

/// A nonnegative uniformly convex Hamiltonian H with H(0) = 0. The Hessian
/// eigenvalues lie in [alpha, beta] at every point; alpha and beta are
/// analytic for the builtins and estimated otherwise.
struct Hamiltonian {
    int dim = 2;
    double alpha = 1.0;
    double beta = 1.0;
    std::string spec;  // config-text form, e.g. "anisotropic:1,0,4"

    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> grad;
    std::function<Mat(const Vec&)> hess;

    /// Allocation-free planar gradient for dim == 2; set for all builtins
    /// and preserved by reflect/scale_level. Grid sweeps use it when
    /// present.
    std::function<Vec2(const Vec2&)> grad2;
};

/// H(p) = |p|^2 / 2, alpha = beta = 1.
Hamiltonian make_isotropic(int dim = 2);

/// H(p) = p . A p / 2 for symmetric positive definite A;
/// alpha = lambda_min(A), beta = lambda_max(A). Rejects non-SPD input.
Hamiltonian make_anisotropic(const Mat& A);
Hamiltonian make_anisotropic(double a11, double a12, double a22);

/// H(p) = |p|^2 / 2 + c (sin p1 - p1). Not symmetric under p -> -p, so its
/// reflection differs from it. Requires |c| <= 0.2 to keep the Hessian
/// eigenvalues inside [1 - |c|, 1 + |c|]; the bound is also probed at
/// construction.
Hamiltonian make_shifted_smooth(double c, int dim = 2);

/// Parses "isotropic" | "anisotropic:a11,a12,a22" | "shifted:c".
Hamiltonian make_builtin(const std::string& spec, int dim = 2);

/// Reflected Hamiltonian p -> H(-p). Same convexity bounds.
Hamiltonian reflect(const Hamiltonian& H);

/// factor * H, factor > 0. Rescales alpha and beta accordingly.
Hamiltonian scale_level(const Hamiltonian& H, double factor);

/// K = sqrt(beta / alpha) >= 1.
double ratio_constant(const Hamiltonian& H);

struct Bounds {
    double alpha = 0.0;
    double beta = 0.0;
};

/// Min and max Hessian eigenvalue over `samples` points drawn uniformly
/// from the ball of the given radius. Deterministic for a fixed seed.
/// Throws if a sampled eigenvalue is not strictly positive.
Bounds estimate_bounds(const Hamiltonian& H, double radius = 10.0, int samples = 10000,
                       std::uint64_t seed = 1);

struct LevelExtremes {
    double k = 0.0;
    double a_k = 0.0;  // min |p| on {H = k}
    double A_k = 0.0;  // max |p| on {H = k}
    Vec arg_min;
    Vec arg_max;
};

/// Constrained extremization of |p| on the level set {H = k} by Newton on
/// the Lagrange system, multi-started from the coordinate directions plus
/// eight deterministic extra directions. Asserts A_k / a_k <= K + 1e-9.
LevelExtremes level_extremes(const Hamiltonian& H, double k);

/// Radius t > 0 with H(t e) = k for the unit direction e = dir/|dir|.
/// The root is unique and bracketed by sqrt(2k/beta) <= t <= sqrt(2k/alpha).
double level_radius(const Hamiltonian& H, double k, const Vec& dir);

/// level_radius(...) * dir/|dir|.
Vec level_point(const Hamiltonian& H, double k, const Vec& dir);

/// Thrown when an iterative solve fails; carries the best residual seen.
class NonconvergenceError : public std::runtime_error {
public:
    NonconvergenceError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual(best_residual) {}
    double best_residual;
};

}  // namespace aronsson
