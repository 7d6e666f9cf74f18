#include "aronsson/cone.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

using namespace aronsson;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

const Hamiltonian kIso = make_isotropic(2);
const Hamiltonian kAniso = make_anisotropic(1, 0, 4);
const Hamiltonian kShifted = make_shifted_smooth(0.1);

const std::vector<const Hamiltonian*> kAll{&kIso, &kAniso, &kShifted};

}  // namespace

TEST_CASE("isotropic closed forms") {
    const ConeValue cv = eval_cone(kIso, 2.0, vec2(3, 4));
    CHECK(cv.value == doctest::Approx(10.0).epsilon(1e-12));
    REQUIRE(cv.maximizer.has_value());
    CHECK((*cv.maximizer)[0] == doctest::Approx(1.2).epsilon(1e-12));
    CHECK((*cv.maximizer)[1] == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(cv.kkt_residual <= 1e-12);
}

TEST_CASE("zero point and bad level") {
    const ConeValue cv = eval_cone(kShifted, 1.0, vec2(0, 0));
    CHECK(cv.value == 0.0);
    CHECK(!cv.maximizer.has_value());
    CHECK_THROWS_AS(eval_cone(kIso, 0.0, vec2(1, 0)), std::invalid_argument);
    CHECK_THROWS_AS(eval_cone(kIso, -1.0, vec2(1, 0)), std::invalid_argument);
}

TEST_CASE("anisotropic axis value") {
    const ConeValue cv = eval_cone(kAniso, 0.5, vec2(0, 1));
    CHECK(cv.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK((*cv.maximizer)[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK((*cv.maximizer)[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("shifted Hamiltonian against the sampling oracle") {
    // Frozen from the 1e6-point level-set oracle: max p.x over H(p) = 1
    // equals the positive root of p^2/2 + 0.1 (sin p - p) = 1.
    const double frozen = 1.445940884323404;
    const ConeValue cv = eval_cone(kShifted, 1.0, vec2(1, 0));
    CHECK(std::abs(cv.value - frozen) / frozen <= 1e-6);
    CHECK(std::abs(cv.value - frozen) / frozen <= 1e-9);

    // Off-axis probe, frozen from a 2e5-point run of the same oracle.
    const double frozen_off = 1.250798049783882;
    const ConeValue off = eval_cone(kShifted, 0.5, vec2(-0.6, 1.1));
    CHECK(std::abs(off.value - frozen_off) / frozen_off <= 1e-6);

    // Fresh oracle comparison at a third point.
    const Vec x = vec2(0.8, -0.35);
    const double brute = oracle::cone_value(kShifted, 2.5, x, 200000);
    CHECK(eval_cone(kShifted, 2.5, x).value == doctest::Approx(brute).epsilon(1e-6));
}

TEST_CASE("KKT invariants on randomized inputs") {
    Rng rng(2024);
    for (int c = 0; c < 300; ++c) {
        const Hamiltonian& H = *kAll[c % kAll.size()];
        const double k = rng.log_uniform(0.05, 20.0);
        Vec x = rng.ball_point(2, 5.0);
        if (x.norm() < 1e-3) x = vec2(1, 0);
        const ConeValue cv = eval_cone(H, k, x);
        REQUIRE(cv.maximizer.has_value());
        const Vec& p = *cv.maximizer;
        CHECK(std::abs(H.eval(p) - k) <= 1e-10 * std::max(1.0, k));
        CHECK(std::abs(cv.value - p.dot(x)) <= 1e-12 * std::max(1.0, std::abs(cv.value)));
        const Vec g = H.grad(p);
        CHECK((g / g.norm() - x / x.norm()).norm() <= 1e-8);
        CHECK(cv.multiplier >= 0.0);
        CHECK(cv.kkt_residual <= 1e-12);
    }
}

TEST_CASE("cone_gradient") {
    // unit-circle level set, radial gradient
    const Vec g = cone_gradient(kIso, 0.5, vec2(0, 3));
    CHECK(g[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(cone_gradient(kIso, 0.5, vec2(0, 0)), std::invalid_argument);

    Rng rng(5);
    for (int c = 0; c < 100; ++c) {
        const Hamiltonian& H = *kAll[c % kAll.size()];
        const double k = rng.log_uniform(0.1, 10.0);
        Vec x = rng.ball_point(2, 4.0);
        if (x.norm() < 1e-3) x = vec2(0, 1);

        // gradient of the level as a function of x, by central differences
        const Vec p = cone_gradient(H, k, x);
        for (int i = 0; i < 2; ++i) {
            const double h = 1e-6 * std::max(1.0, x.norm());
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (eval_cone(H, k, xp).value - eval_cone(H, k, xm).value) / (2 * h);
            CHECK(std::abs(fd - p[i]) <= 1e-6 * std::max(1.0, std::abs(p[i])));
        }

        // depends on the direction only
        CHECK((cone_gradient(H, k, Vec(2.0 * x)) - p).norm() <= 1e-10 * std::max(1.0, p.norm()));

        // the gradient sits on the level set
        CHECK(H.eval(p) == doctest::Approx(k).epsilon(1e-8));
    }
}

TEST_CASE("reflected cones: C_k^{H^}(x) = C_k^H(-x)") {
    Rng rng(99);
    for (const Hamiltonian* H : kAll) {
        for (int c = 0; c < 1000; ++c) {
            const double k = rng.log_uniform(0.05, 20.0);
            Vec x = rng.ball_point(2, 5.0);
            if (x.norm() < 1e-6) continue;
            const double lhs = eval_cone_hat(*H, k, x).value;
            const double rhs = eval_cone(*H, k, Vec(-x)).value;
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        }
    }

    // even Hamiltonian: identical cones
    Rng rng2(17);
    for (int c = 0; c < 200; ++c) {
        const double k = rng2.log_uniform(0.1, 5.0);
        const Vec x = rng2.ball_point(2, 3.0);
        if (x.norm() < 1e-6) continue;
        CHECK(eval_cone_hat(kIso, k, x).value ==
              doctest::Approx(eval_cone(kIso, k, x).value).epsilon(1e-13));
    }

    // asymmetric Hamiltonian: some probe separates them
    bool differs = false;
    for (int j = 0; j < 64 && !differs; ++j) {
        const double t = 2.0 * M_PI * j / 64;
        const Vec x = vec2(std::cos(t), std::sin(t));
        if (std::abs(eval_cone_hat(kShifted, 1.0, x).value - eval_cone(kShifted, 1.0, x).value) >
            1e-6)
            differs = true;
    }
    CHECK(differs);
}

TEST_CASE("reverse spherical image") {
    CHECK((reverse_spherical_image(kIso, 0.5, vec2(0, 1)) - vec2(0, 1)).norm() <= 1e-12);
    CHECK_THROWS_AS(reverse_spherical_image(kIso, 0.5, vec2(0, 2)), std::invalid_argument);

    // injectivity and feasibility on a 360-point mesh, asymmetric H
    std::vector<Vec> images;
    for (int j = 0; j < 360; ++j) {
        const double t = 2.0 * M_PI * j / 360;
        const Vec y = reverse_spherical_image(kShifted, 1.0, vec2(std::cos(t), std::sin(t)));
        CHECK(kShifted.eval(y) == doctest::Approx(1.0).epsilon(1e-10));
        images.push_back(y);
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        const Vec& a = images[i];
        const Vec& b = images[(i + 1) % images.size()];
        CHECK((a - b).norm() > 1e-6);             // distinct neighbours
        CHECK((a - b).norm() < 10.0 * 2 * M_PI / 360);  // discrete continuity
    }
}

TEST_CASE("level_path") {
    std::vector<double> ks;
    for (int i = 0; i <= 40; ++i) ks.push_back(0.2 + i * 0.1);
    const auto path = level_path(kIso, vec2(1, 0), ks);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        CHECK((*path[i].maximizer)[0] == doctest::Approx(std::sqrt(2 * ks[i])).epsilon(1e-12));
        CHECK(std::abs((*path[i].maximizer)[1]) <= 1e-12);
        if (i > 0) CHECK(path[i].value >= path[i - 1].value - 1e-12);
    }

    // coarse vs refined grids: the largest consecutive jump shrinks with
    // the level spacing (empirical Lipschitz continuity of Y_x)
    const Vec x = vec2(0.3, -1.2);
    auto max_jump = [&](int steps) {
        std::vector<double> grid;
        for (int i = 0; i <= steps; ++i) grid.push_back(0.5 + 1.5 * i / steps);
        const auto p = level_path(kShifted, x, grid);
        double m = 0.0;
        for (std::size_t i = 1; i < p.size(); ++i)
            m = std::max(m, (*p[i].maximizer - *p[i - 1].maximizer).norm());
        return m;
    };
    const double coarse = max_jump(20);
    const double fine = max_jump(40);
    CHECK(fine <= 0.7 * coarse);
    CHECK(fine >= 0.3 * coarse);

    CHECK_THROWS_AS(level_path(kIso, vec2(1, 0), {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("level_for_slope") {
    const LevelForSlope iso = level_for_slope(kIso, 3.0);
    CHECK(iso.k == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(!iso.degenerate);

    const LevelForSlope an = level_for_slope(kAniso, 1.0);
    CHECK(an.k == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(an.arg_max[0]) <= 1e-8);
    CHECK(std::abs(std::abs(an.arg_max[1]) - 1.0) <= 1e-10);
    CHECK(an.k == doctest::Approx(oracle::ball_max(kAniso, 1.0, 20000, 32)).epsilon(1e-7));

    const LevelForSlope sh = level_for_slope(kShifted, 1.7);
    CHECK(sh.k == doctest::Approx(oracle::ball_max(kShifted, 1.7, 20000, 32)).epsilon(1e-7));

    const LevelForSlope zero = level_for_slope(kIso, 0.0);
    CHECK(zero.degenerate);
    CHECK(zero.k == 0.0);

    // B_a(0) inside the sublevel set: C_{k_a}(x) >= a |x|
    Rng rng(31);
    for (int c = 0; c < 100; ++c) {
        const Hamiltonian& H = *kAll[c % kAll.size()];
        const double a = rng.uniform(0.2, 3.0);
        const double ka = level_for_slope(H, a).k;
        const Vec x = rng.ball_point(2, 4.0);
        if (x.norm() < 1e-6) continue;
        CHECK(eval_cone(H, ka, x).value >= a * x.norm() - 1e-9);
    }
}

TEST_CASE("cone calculus properties") {
    Rng rng(777);
    for (int c = 0; c < 400; ++c) {
        const Hamiltonian& H = *kAll[c % kAll.size()];
        const double k = rng.log_uniform(0.05, 20.0);
        Vec x = rng.ball_point(2, 5.0);
        Vec y = rng.ball_point(2, 5.0);
        if (x.norm() < 1e-3 || y.norm() < 1e-3) continue;
        const double cx = eval_cone(H, k, x).value;
        const double cy = eval_cone(H, k, y).value;

        // positive homogeneity
        const double lam = rng.uniform(0.1, 10.0);
        CHECK(std::abs(eval_cone(H, k, Vec(lam * x)).value - lam * cx) <=
              1e-10 * std::max(1.0, lam * cx));

        // nonnegativity and the triangle inequality
        CHECK(cx >= 0.0);
        CHECK(eval_cone(H, k, Vec(x + y)).value <= cx + cy + 1e-10 * std::max(1.0, cx + cy));

        // convexity on a random pair
        const double t = rng.uniform(0.0, 1.0);
        CHECK(eval_cone(H, k, Vec(t * x + (1 - t) * y)).value <=
              t * cx + (1 - t) * cy + 1e-10 * std::max(1.0, cx + cy));

        // sandwich between the level-set radius bounds
        CHECK(cx >= std::sqrt(2 * k / H.beta) * x.norm() - 1e-9);
        CHECK(cx <= std::sqrt(2 * k / H.alpha) * x.norm() + 1e-9);

        // monotone and continuous in k
        const double k2 = k * rng.uniform(1.0, 1.5);
        const double cx2 = eval_cone(H, k2, x).value;
        CHECK(cx2 >= cx - 1e-12);
        const double k3 = k * (1 + 1e-9);
        CHECK(std::abs(eval_cone(H, k3, x).value - cx) <= 1e-6 * std::max(1.0, cx));
    }
}

TEST_CASE("strict additivity iff collinear in the same direction") {
    Rng rng(4242);
    for (int c = 0; c < 300; ++c) {
        const Hamiltonian& H = *kAll[c % kAll.size()];
        const double k = rng.log_uniform(0.1, 10.0);

        // collinear pairs achieve equality
        Vec x = rng.ball_point(2, 4.0);
        if (x.norm() < 1e-3) continue;
        const double lam = rng.uniform(0.1, 5.0);
        const Vec y = lam * x;
        const double defect = eval_cone(H, k, Vec(x + y)).value - eval_cone(H, k, x).value -
                              eval_cone(H, k, y).value;
        CHECK(std::abs(defect) <= 1e-10 * std::max(1.0, eval_cone(H, k, Vec(x + y)).value));

        // near-equality forces near-collinearity
        Vec w = rng.ball_point(2, 4.0);
        if (w.norm() < 1e-3) continue;
        const double d2 = eval_cone(H, k, x).value + eval_cone(H, k, w).value -
                          eval_cone(H, k, Vec(x + w)).value;
        const double scale = std::max(1.0, eval_cone(H, k, x).value + eval_cone(H, k, w).value);
        if (d2 <= 1e-10 * scale) {
            const double cosang = x.dot(w) / (x.norm() * w.norm());
            const double angle = std::acos(std::clamp(cosang, -1.0, 1.0));
            CHECK(angle <= 1e-4);
        }
    }
}

TEST_CASE("cones in three dimensions") {
    const Hamiltonian iso3 = make_isotropic(3);
    Vec x(3);
    x << 1, 2, 2;
    const ConeValue cv = eval_cone(iso3, 2.0, x);
    CHECK(cv.value == doctest::Approx(6.0).epsilon(1e-12));  // 2 * |x|

    Mat A = Mat::Identity(3, 3);
    A(1, 1) = 4.0;
    A(2, 2) = 9.0;
    const Hamiltonian an3 = make_anisotropic(A);
    // closed form sqrt(2k x . A^{-1} x)
    const double expect = std::sqrt(2.0 * 1.5 * (1.0 + 4.0 / 4.0 + 4.0 / 9.0));
    CHECK(eval_cone(an3, 1.5, x).value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("one-dimensional cones") {
    const Hamiltonian sh1 = make_shifted_smooth(0.1, 1);
    Vec xp(1), xm(1);
    xp << 2.0;
    xm << -2.0;
    const ConeValue a = eval_cone(sh1, 1.0, xp);
    const ConeValue b = eval_cone(sh1, 1.0, xm);
    CHECK(a.value > 0.0);
    CHECK(b.value > 0.0);
    // positive root 1.44594..., negative root differs for the asymmetric H
    CHECK(a.value == doctest::Approx(2.0 * 1.445940884323404).epsilon(1e-9));
    CHECK(std::abs(a.value - b.value) > 1e-3);
    CHECK(a.multiplier >= 0.0);
    CHECK(b.multiplier >= 0.0);
}
