#include "aronsson/common.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aronsson {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) {
    if (n < 1) throw std::invalid_argument("set_threads: n must be >= 1");
    g_threads.store(n);
}

int threads() { return g_threads.load(); }

std::uint64_t Rng::next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::log_uniform(double lo, double hi) {
    if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("log_uniform: need 0 < lo <= hi");
    return lo * std::exp(uniform() * std::log(hi / lo));
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

Vec Rng::unit_vector(int n) {
    Vec v(n);
    double norm = 0.0;
    do {
        for (int i = 0; i < n; ++i) v[i] = normal();
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

Vec Rng::ball_point(int n, double radius) {
    const Vec dir = unit_vector(n);
    const double r = radius * std::pow(uniform(), 1.0 / n);
    return r * dir;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    const int nt = std::min<std::size_t>(threads(), std::max<std::size_t>(n, 1));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::atomic<std::size_t> next{0};
    constexpr std::size_t kBlock = 256;
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t begin = next.fetch_add(kBlock);
                if (begin >= n) return;
                const std::size_t end = std::min(begin + kBlock, n);
                for (std::size_t i = begin; i < end; ++i) f(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

std::size_t parallel_argmax(std::size_t n, const std::function<double(std::size_t)>& score,
                            double* max_value) {
    // Fixed chunking, then a serial combine in chunk order. max is exact,
    // ties resolve to the lowest index, so partitioning cannot change the
    // result.
    constexpr std::size_t kChunk = 1024;
    const std::size_t nchunks = (n + kChunk - 1) / kChunk;
    std::vector<double> best(nchunks, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> arg(nchunks, std::numeric_limits<std::size_t>::max());
    parallel_for(nchunks, [&](std::size_t c) {
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(lo + kChunk, n);
        double b = -std::numeric_limits<double>::infinity();
        std::size_t a = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = lo; i < hi; ++i) {
            const double s = score(i);
            if (std::isnan(s)) continue;
            if (s > b) {
                b = s;
                a = i;
            }
        }
        best[c] = b;
        arg[c] = a;
    });
    double b = -std::numeric_limits<double>::infinity();
    std::size_t a = std::numeric_limits<std::size_t>::max();
    for (std::size_t c = 0; c < nchunks; ++c) {
        if (arg[c] == std::numeric_limits<std::size_t>::max()) continue;
        if (a == std::numeric_limits<std::size_t>::max() || best[c] > b) {
            b = best[c];
            a = arg[c];
        }
    }
    if (max_value) *max_value = b;
    return a;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace aronsson
