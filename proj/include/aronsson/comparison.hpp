#pragma once

#include "aronsson/field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aronsson {

enum class Property { CGCA, CGCB, AMLE, KComparison, Segment, Harnack, MaxPrinciple };

enum class CheckStatus {
    Pass,                // no violation above tolerance on the sample set
    Violation,           // witness attached
    Vacuous,             // AMLE boundary precondition fails; nothing to test
    PreconditionFailed,  // e.g. the segment gradient bound does not hold
};

std::string to_string(Property p);
std::string to_string(CheckStatus s);

/// Everything needed to re-evaluate a reported violation from scratch.
struct Witness {
    Vec2 vertex{0.0, 0.0};
    double k = 0.0;  // cone level (lambda for AMLE, k0 for segments)
    double b = 0.0;  // offset computed from the boundary
    double a = 0.0;  // slope (K-comparison), sign flag (max principle)
    Vec2 x{0.0, 0.0};
    std::optional<Vec2> y;  // second point for pair-based properties
    double radius = 0.0;    // circle radius (Harnack)
    double violation = 0.0;
};

struct ComparisonReport {
    Property property = Property::CGCA;
    CheckStatus status = CheckStatus::Pass;
    bool passed = false;  // status == Pass
    std::optional<Witness> witness;
    double max_margin = 0.0;        // largest (u - bound) seen, violation or not
    double needed_k_factor = 0.0;   // K-comparison: max dilation the samples demand
    double tolerance = 0.0;
    std::string note;
};

struct CheckOptions {
    int interior_nx = 128;  // lattice for point scans
    int interior_ny = 128;
    std::optional<double> tol;           // default 1e-8, or max(1e-8, 10 h^2) for grids
    std::optional<double> gradient_tol;  // discrete H(Du) checks on grids
};

/// Default vertex set for a region: the center plus four points on the
/// circle of radius 2 r_outer.
std::vector<Vec2> default_vertices(const DomainDesc& region);

/// Comparison with general cones from above. For each vertex and level,
/// b is the largest boundary value of u - C_k(. - x0); the interior scan
/// then looks for u > b + C_k(. - x0) + tol.
ComparisonReport check_cgca(const Field& u, const Hamiltonian& H, const DomainDesc& region,
                            const std::vector<Vec2>& vertices, const std::vector<double>& k_grid,
                            int N = 720, const CheckOptions& opts = {});

/// Mirror case from below with reflected cones.
ComparisonReport check_cgcb(const Field& u, const Hamiltonian& H, const DomainDesc& region,
                            const std::vector<Vec2>& vertices, const std::vector<double>& k_grid,
                            int N = 720, const CheckOptions& opts = {});

/// General AMLE property at level lambda: if the boundary satisfies
/// sup { u(y) - u(x) - C_lambda(y - x) } <= 0, the same must hold over
/// interior pairs, and grid fields must satisfy H(Du) <= lambda discretely.
ComparisonReport check_amle(const Field& u, const Hamiltonian& H, const DomainDesc& region,
                            double lambda, int boundary_n = 240, int interior_n = 360,
                            const CheckOptions& opts = {});

/// K-comparison with Euclidean cones, K = ratio_constant(H): a boundary
/// bound u <= a |x - x0| + b must propagate to u <= K a |x - x0| + b.
ComparisonReport check_kcomparison(const Field& u, const Hamiltonian& H, const DomainDesc& region,
                                   const std::vector<Vec2>& vertices,
                                   const std::vector<double>& a_grid, int N = 720,
                                   const CheckOptions& opts = {});

/// Segment inequality u(y) - u(x) <= C_k0(y - x) for grid-backed fields
/// whose discrete gradient satisfies H(Du) <= k0; that bound is verified
/// first and its failure is reported as a distinct status.
ComparisonReport check_segment(const Field& u, const Hamiltonian& H, double k0,
                               const std::vector<std::pair<Vec2, Vec2>>& pairs,
                               const CheckOptions& opts = {});

/// Harnack bound M(r) <= e^{K pi} m(r) on circles of a punctured disk.
/// The field must be nonnegative on the sampled set and radii must stay
/// below half the outer radius; violations of either are input errors.
ComparisonReport check_harnack(const Field& u, const Hamiltonian& H,
                               const std::vector<double>& radii, int N = 720,
                               const CheckOptions& opts = {});

/// Interior extrema must not beat the boundary extrema.
ComparisonReport check_extremum_principle(const Field& u, const DomainDesc& region,
                                          int boundary_n = 720, int interior_n = 128,
                                          const CheckOptions& opts = {});

/// Recomputes the violation magnitude of a report's witness from the field.
double replay_witness(const Field& u, const Hamiltonian& H, const ComparisonReport& report);

}  // namespace aronsson
