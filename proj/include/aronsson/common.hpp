#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace aronsson {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;

inline constexpr const char* kVersion = "0.1.0";

/// Number of worker threads used by the data-parallel helpers below.
/// Results are bitwise independent of this setting.
void set_threads(int n);
int threads();

/// Deterministic seeded RNG. Uniform doubles are produced from the raw
/// 64-bit stream directly so sequences do not depend on the standard
/// library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Log-uniform over [lo, hi], lo > 0.
    double log_uniform(double lo, double hi);

    /// Standard normal via Box-Muller on the raw stream.
    double normal();

    /// Uniform direction on the unit sphere in R^n.
    Vec unit_vector(int n);

    /// Uniform point in the ball of given radius.
    Vec ball_point(int n, double radius);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Static-partition parallel loop over [0, n). Worker f(i) must only write
/// to index-owned locations.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

/// Parallel argmax with deterministic tie-breaking (lowest index wins).
/// score(i) may be NaN to skip an index. Returns index of the maximum or
/// SIZE_MAX if every index was skipped. The reduction is exact, so the
/// result does not depend on the thread count.
std::size_t parallel_argmax(std::size_t n, const std::function<double(std::size_t)>& score,
                            double* max_value = nullptr);

/// Shortest round-trip decimal formatting (std::to_chars).
std::string format_double(double v);

/// FNV-1a hash of a string, used for config fingerprints.
std::uint64_t fnv1a(const std::string& s);

}  // namespace aronsson
