#pragma once

#include "aronsson/hamiltonian.hpp"

#include <optional>
#include <vector>

namespace aronsson {

/// Value of the general cone C_k^H(x) = max { p . x : H(p) = k } together
/// with the unique maximizer and the Lagrange multiplier of the active
/// constraint. At the maximizer, H_p(p) = multiplier * x with
/// multiplier >= 0, so H_p(p) points along x.
struct ConeValue {
    double value = 0.0;
    std::optional<Vec> maximizer;  // absent for x = 0
    double multiplier = 0.0;
    double kkt_residual = 0.0;
};

/// Solves the stationarity system H_p(p) = lambda x, H(p) = k by Newton,
/// initialized at sqrt(2k/beta) x/|x| with deterministic fallback restarts.
/// The scaled KKT residual is driven below 1e-12.
/// x = 0 returns value 0 with no maximizer. Throws on k <= 0 and on
/// nonconvergence after 100 iterations and 8 restarts.
ConeValue eval_cone(const Hamiltonian& H, double k, const Vec& x);

/// D C_k^H(x) = p_x^k, the maximizer of eval_cone. Requires x != 0.
Vec cone_gradient(const Hamiltonian& H, double k, const Vec& x);

/// C_k^{H^} for the reflected Hamiltonian H^(p) = H(-p). Convenience
/// wrapper; hot paths should reflect(H) once and reuse it.
ConeValue eval_cone_hat(const Hamiltonian& H, double k, const Vec& x);

/// Reverse spherical image Y_k(e) = p_e^k for |e| = 1.
Vec reverse_spherical_image(const Hamiltonian& H, double k, const Vec& e);

/// Y_x along an increasing grid of levels: the path k -> p_x^k.
std::vector<ConeValue> level_path(const Hamiltonian& H, const Vec& x,
                                  const std::vector<double>& k_grid);

struct LevelForSlope {
    double k = 0.0;
    bool degenerate = false;  // a = 0
    Vec arg_max;              // maximizer of H on {|p| <= a}
};

/// k_a = max { H(p) : |p| <= a }, realized on the sphere |p| = a. The
/// returned level satisfies a = min { |p| : H(p) = k_a }, which is checked
/// to 1e-8 before returning. a = 0 yields level 0 with the degenerate flag.
LevelForSlope level_for_slope(const Hamiltonian& H, double a);

}  // namespace aronsson
