#include "aronsson/hamiltonian.hpp"

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

// Central-difference checks of grad and hess against eval.
void check_derivatives(const Hamiltonian& H, Rng& rng, int cases) {
    for (int c = 0; c < cases; ++c) {
        const Vec p = rng.ball_point(H.dim, 5.0);
        const Vec g = H.grad(p);
        const Mat M = H.hess(p);
        const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
        for (int i = 0; i < H.dim; ++i) {
            const double h = 1e-6;
            Vec pp = p, pm = p;
            pp[i] += h;
            pm[i] -= h;
            const double gi = (H.eval(pp) - H.eval(pm)) / (2 * h);
            CHECK(std::abs(gi - g[i]) <= 1e-6 * scale);
            const Vec dg = (H.grad(pp) - H.grad(pm)) / (2 * h);
            for (int j = 0; j < H.dim; ++j)
                CHECK(std::abs(dg[j] - M(j, i)) <= 1e-6 * std::max(1.0, std::abs(M(j, i))));
        }
    }
}

}  // namespace

TEST_CASE("builtin constructors and analytic bounds") {
    const Hamiltonian iso = make_isotropic(2);
    CHECK(iso.alpha == 1.0);
    CHECK(iso.beta == 1.0);
    CHECK(iso.eval(vec2(1, 1)) == doctest::Approx(1.0));

    const Hamiltonian aniso = make_anisotropic(1, 0, 4);
    CHECK(aniso.alpha == doctest::Approx(1.0));
    CHECK(aniso.beta == doctest::Approx(4.0));

    const Hamiltonian sh = make_shifted_smooth(0.1);
    CHECK(sh.alpha == doctest::Approx(0.9));
    CHECK(sh.beta == doctest::Approx(1.1));
    CHECK(sh.eval(Vec::Zero(2)) == 0.0);

    CHECK_THROWS_AS(make_anisotropic(1, 3, 1), std::invalid_argument);   // indefinite
    CHECK_THROWS_AS(make_anisotropic(-1, 0, 2), std::invalid_argument);  // negative
    CHECK_THROWS_AS(make_shifted_smooth(0.3), std::invalid_argument);

    CHECK(make_builtin("anisotropic:1,0,4").beta == doctest::Approx(4.0));
    CHECK(make_builtin("shifted:0.05").alpha == doctest::Approx(0.95));
    CHECK_THROWS_AS(make_builtin("anisotropic:1,0"), std::invalid_argument);
    CHECK_THROWS_AS(make_builtin("quartic"), std::invalid_argument);
}

TEST_CASE("shifted with c = 0 matches the isotropic Hamiltonian") {
    const Hamiltonian a = make_shifted_smooth(0.0);
    const Hamiltonian b = make_isotropic(2);
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const Vec p = rng.ball_point(2, 8.0);
        CHECK(a.eval(p) == doctest::Approx(b.eval(p)).epsilon(1e-15));
    }
}

TEST_CASE("quadratic growth envelope and derivative consistency") {
    Rng rng(42);
    for (const char* spec : {"isotropic", "anisotropic:1,0,4", "shifted:0.1"}) {
        const Hamiltonian H = make_builtin(spec);
        for (int i = 0; i < 1000; ++i) {
            const Vec p = rng.ball_point(2, 6.0);
            const double v = H.eval(p);
            const double n2 = p.squaredNorm();
            CHECK(v >= 0.5 * H.alpha * n2 - 1e-9);
            CHECK(v <= 0.5 * H.beta * n2 + 1e-9);
            CHECK(v >= -1e-15);  // nonnegativity
        }
        Rng drng(7);
        check_derivatives(H, drng, 20);
    }
}

TEST_CASE("estimate_bounds") {
    const Bounds iso = estimate_bounds(make_isotropic(2));
    CHECK(iso.alpha == 1.0);
    CHECK(iso.beta == 1.0);

    const Bounds an = estimate_bounds(make_anisotropic(1, 0, 4));
    CHECK(an.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(an.beta == doctest::Approx(4.0).epsilon(1e-12));

    const double c = 0.1;
    const Hamiltonian sh = make_shifted_smooth(c);
    const Bounds est = estimate_bounds(sh);
    const auto [olo, ohi] = oracle::eig_bounds(sh, 10.0, 100000);
    CHECK(est.alpha < 1.0);
    CHECK(est.beta > 1.0);
    CHECK(est.beta - est.alpha <= 2.0 * c + 1e-9);
    CHECK(std::abs(est.alpha - olo) <= 1e-3 * c);
    CHECK(std::abs(est.beta - ohi) <= 1e-3 * c);

    // deterministic for a fixed seed
    const Bounds again = estimate_bounds(sh);
    CHECK(again.alpha == est.alpha);
    CHECK(again.beta == est.beta);

    CHECK_THROWS_AS(estimate_bounds(make_isotropic(2), 10.0, 50), std::invalid_argument);
}

TEST_CASE("level_radius brackets and solves") {
    const Hamiltonian iso = make_isotropic(2);
    CHECK(level_radius(iso, 2.0, vec2(1, 0)) == doctest::Approx(2.0).epsilon(1e-14));
    const Hamiltonian an = make_anisotropic(1, 0, 4);
    // H(t e2) = 2 t^2 = 0.5 at t = 0.5
    CHECK(level_radius(an, 0.5, vec2(0, 1)) == doctest::Approx(0.5).epsilon(1e-14));
    const Hamiltonian sh = make_shifted_smooth(0.1);
    const Vec e = vec2(std::cos(0.7), std::sin(0.7));
    const double t = level_radius(sh, 1.3, e);
    CHECK(sh.eval(Vec(t * e)) == doctest::Approx(1.3).epsilon(1e-13));
}

TEST_CASE("level_extremes on the isotropic circle") {
    const LevelExtremes ext = level_extremes(make_isotropic(2), 2.0);
    CHECK(ext.a_k == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ext.A_k == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("level_extremes on the ellipse, against dense sampling") {
    const Hamiltonian an = make_anisotropic(1, 0, 4);
    const LevelExtremes ext = level_extremes(an, 0.5);
    // p1^2 + 4 p2^2 = 1: min radius 1/2 along e2, max radius 1 along e1
    CHECK(ext.a_k == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(ext.A_k == doctest::Approx(1.0).epsilon(1e-10));
    const auto [lo, hi] = oracle::level_set_radius_extremes(an, 0.5);
    CHECK(ext.a_k == doctest::Approx(lo).epsilon(1e-8));
    CHECK(ext.A_k == doctest::Approx(hi).epsilon(1e-8));
}

TEST_CASE("ratio bound A_k/a_k <= sqrt(beta/alpha) over a log level grid") {
    for (const char* spec : {"isotropic", "anisotropic:1,0,4", "shifted:0.1"}) {
        const Hamiltonian H = make_builtin(spec);
        const double K = ratio_constant(H);
        for (int i = 0; i < 20; ++i) {
            const double k = 1e-2 * std::pow(1e4, i / 19.0);
            const LevelExtremes ext = level_extremes(H, k);
            CHECK(ext.A_k / ext.a_k <= K + 1e-9);
        }
    }
}

TEST_CASE("ratio_constant") {
    CHECK(ratio_constant(make_isotropic(2)) == 1.0);
    CHECK(ratio_constant(make_anisotropic(1, 0, 4)) == doctest::Approx(2.0));
    CHECK(ratio_constant(make_anisotropic(2, 0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("reflect") {
    Rng rng(3);
    const Hamiltonian iso = make_isotropic(2);
    const Hamiltonian iso_hat = reflect(iso);
    for (int i = 0; i < 1000; ++i) {
        const Vec p = rng.ball_point(2, 5.0);
        CHECK(iso_hat.eval(p) == iso.eval(p));
    }

    const Hamiltonian sh = make_shifted_smooth(0.1);
    const Hamiltonian sh_hat = reflect(sh);
    CHECK(sh_hat.alpha == sh.alpha);
    CHECK(sh_hat.beta == sh.beta);
    bool differs = false;
    for (int i = 0; i < 100 && !differs; ++i) {
        const Vec p = rng.ball_point(2, 5.0);
        if (std::abs(sh_hat.eval(p) - sh.eval(p)) > 1e-8) differs = true;
    }
    CHECK(differs);

    const Hamiltonian twice = reflect(sh_hat);
    for (int i = 0; i < 1000; ++i) {
        const Vec p = rng.ball_point(2, 5.0);
        CHECK(twice.eval(p) == doctest::Approx(sh.eval(p)).epsilon(1e-15));
        CHECK((twice.grad(p) - sh.grad(p)).norm() <= 1e-14 * std::max(1.0, sh.grad(p).norm()));
    }
}

TEST_CASE("scale_level") {
    const Hamiltonian H = make_anisotropic(1, 0, 4);
    const Hamiltonian S = scale_level(H, 0.5);
    CHECK(S.alpha == doctest::Approx(0.5));
    CHECK(S.beta == doctest::Approx(2.0));
    const Vec p = vec2(0.3, -0.8);
    CHECK(S.eval(p) == doctest::Approx(0.5 * H.eval(p)).epsilon(1e-15));
    CHECK_THROWS_AS(scale_level(H, 0.0), std::invalid_argument);
}

TEST_CASE("higher dimensions") {
    const Hamiltonian iso3 = make_isotropic(3);
    Vec p(3);
    p << 1, 2, 2;
    CHECK(iso3.eval(p) == doctest::Approx(4.5));
    const LevelExtremes ext = level_extremes(iso3, 2.0);
    CHECK(ext.a_k == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(ext.A_k == doctest::Approx(2.0).epsilon(1e-10));

    Mat A = Mat::Identity(3, 3);
    A(2, 2) = 9.0;
    const Hamiltonian an3 = make_anisotropic(A);
    CHECK(ratio_constant(an3) == doctest::Approx(3.0));
    const LevelExtremes e3 = level_extremes(an3, 0.5);
    CHECK(e3.a_k == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(e3.A_k == doctest::Approx(1.0).epsilon(1e-9));
}
