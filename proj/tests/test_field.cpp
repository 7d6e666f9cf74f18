#include "aronsson/field.hpp"

#include "doctest.h"

#include <cmath>

using namespace aronsson;

namespace {

const Hamiltonian kIso = make_isotropic(2);
const Hamiltonian kAniso = make_anisotropic(1, 0, 4);

Field plane(const Vec2& p, double b = 0.0, double R = 4.0) {
    return Field::from_callable(disk({0.0, 0.0}, R),
                                [p, b](const Vec2& x) { return b + p.dot(x); },
                                [p](const Vec2&) { return p; });
}

Field cone_field(const Hamiltonian& H, double k, double b = 0.0, double R = 4.0) {
    return Field::from_callable(disk({0.0, 0.0}, R), [&H, k, b](const Vec2& x) {
        if (x.norm() == 0.0) return b;
        return b + eval_cone(H, k, to_vec(x)).value;
    });
}

}  // namespace

TEST_CASE("sample_circle basics") {
    const Field c = Field::from_callable(disk({0.0, 0.0}, 2.0), [](const Vec2&) { return 3.5; });
    for (double v : sample_circle(c, {0.0, 0.0}, 1.0, 32)) CHECK(v == 3.5);

    const Vec2 p{2.0, -1.0};
    const Field lin = plane(p);
    const auto vals = sample_circle(lin, {0.0, 0.0}, 0.7, 64);
    for (int j = 0; j < 64; ++j) {
        const double t = 2.0 * M_PI * j / 64;
        const Vec2 e{std::cos(t), std::sin(t)};
        CHECK(vals[j] == doctest::Approx(0.7 * p.dot(e)).epsilon(1e-14));
    }

    CHECK_THROWS_AS(sample_circle(c, {0.0, 0.0}, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(sample_circle(c, {1.5, 0.0}, 1.0, 32), std::invalid_argument);  // exits domain
}

TEST_CASE("grid-backed field is exact on nodes and second order off-node") {
    auto f = [](const Vec2& x) { return std::sin(x[0]) * std::cos(x[1]); };
    auto err_at = [&](double h) {
        const int n = static_cast<int>(std::lround(2.4 / h)) + 1;
        Grid2 g = make_grid({-1.2, -1.2}, h, n, n);
        g.fill(f);
        // exactness on nodes
        CHECK(g.interp(g.pos(3, 5)) == g.u[g.idx(3, 5)]);
        const Field u = Field::from_grid(std::make_shared<Grid2>(std::move(g)), disk({0.0, 0.0}, 1.1));
        double e = 0.0;
        const auto approx = sample_circle(u, {0.1, 0.05}, 0.8, 256);
        for (int j = 0; j < 256; ++j) {
            const double t = 2.0 * M_PI * j / 256;
            const Vec2 x{0.1 + 0.8 * std::cos(t), 0.05 + 0.8 * std::sin(t)};
            e = std::max(e, std::abs(approx[j] - f(x)));
        }
        return e;
    };
    const double e1 = err_at(0.04);
    const double e2 = err_at(0.02);
    CHECK(e2 < e1);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.5));  // bilinear is O(h^2)
}

TEST_CASE("slope_plus on exact profiles") {
    const Field cone = cone_field(kIso, 1.0);
    for (double r : {0.25, 0.5, 1.0, 2.0})
        CHECK(slope_plus(cone, kIso, {0.0, 0.0}, r) == doctest::Approx(1.0).epsilon(1e-9));

    const Field lin = plane({1.0, 0.0});
    for (double r : {0.3, 1.0, 2.5})
        CHECK(slope_plus(lin, kIso, {0.0, 0.0}, r) == doctest::Approx(0.5).epsilon(1e-8));

    // u = |x|^2: the dominating level solves sqrt(2k) r = r^2
    const Field quad =
        Field::from_callable(disk({0.0, 0.0}, 4.0), [](const Vec2& x) { return x.squaredNorm(); });
    for (double r : {0.5, 1.0, 2.0})
        CHECK(slope_plus(quad, kIso, {0.0, 0.0}, r) == doctest::Approx(r * r / 2.0).epsilon(1e-8));

    // constant field: zero slope at every radius
    const Field c = Field::from_callable(disk({0.0, 0.0}, 2.0), [](const Vec2&) { return 7.0; });
    CHECK(slope_plus(c, kIso, {0.0, 0.0}, 1.0) == 0.0);
}

TEST_CASE("slope_minus mirrors slope_plus") {
    const Hamiltonian sh = make_shifted_smooth(0.1);
    const Hamiltonian sh_hat = reflect(sh);

    const Field negcone = Field::from_callable(disk({0.0, 0.0}, 4.0), [&](const Vec2& x) {
        if (x.norm() == 0.0) return 0.0;
        return -eval_cone(sh_hat, 1.0, to_vec(x)).value;
    });
    CHECK(slope_minus(negcone, sh, {0.0, 0.0}, 0.8) == doctest::Approx(1.0).epsilon(1e-9));

    const Field lin = plane({1.0, 0.0});
    CHECK(slope_minus(lin, kIso, {0.0, 0.0}, 1.0) == doctest::Approx(0.5).epsilon(1e-8));

    // S_r^-(H, u, 0) = S_r^+(H, v, 0) with v(x) = -u(-x)
    auto uf = [](const Vec2& x) { return std::sin(x[0] + 0.3 * x[1]) + 0.2 * x[1]; };
    const Field u = Field::from_callable(disk({0.0, 0.0}, 3.0), uf);
    const Field v = Field::from_callable(disk({0.0, 0.0}, 3.0),
                                         [uf](const Vec2& x) { return -uf(Vec2(-x)); });
    for (double r : {0.4, 1.1})
        CHECK(slope_minus(u, sh, {0.0, 0.0}, r) ==
              doctest::Approx(slope_plus(v, sh, {0.0, 0.0}, r)).epsilon(1e-10));
}

TEST_CASE("slope stability in the angular resolution") {
    const Field cone = cone_field(kAniso, 0.5);
    const double a = slope_plus(cone, kAniso, {0.0, 0.0}, 1.0, 720);
    const double b = slope_plus(cone, kAniso, {0.0, 0.0}, 1.0, 1440);
    CHECK(std::abs(a - b) <= 1e-6);
}

TEST_CASE("slope ladder monotone for exact solutions") {
    const std::vector<double> radii{0.2, 0.4, 0.8, 1.6};
    for (const Field& u : {cone_field(kIso, 2.0), cone_field(kAniso, 0.5), plane({0.6, -0.8})}) {
        const SlopeEstimate est = slope_ladder(u, kIso, {0.0, 0.0}, radii, 180);
        CHECK(est.plus_monotone);
        CHECK(est.minus_monotone);
    }
}

TEST_CASE("slope_limit") {
    // differentiable field: both limits approach H(grad u(x0))
    const Field s =
        Field::from_callable(disk({0.0, 0.0}, 2.0), [](const Vec2& x) { return std::sin(x[0]); });
    std::vector<double> radii;
    for (int j = 3; j <= 12; ++j) radii.push_back(std::pow(2.0, -j));
    const SlopeLimit lim = slope_limit(s, kIso, {0.0, 0.0}, radii, 360);
    CHECK(lim.s_plus == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(lim.s_minus == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(lim.cauchy);

    // exact cone: constant in r by homogeneity
    const Field cone = cone_field(kIso, 1.5, 0.7);
    const SlopeLimit cl = slope_limit(cone, kIso, {0.0, 0.0}, {0.5, 0.25, 0.125}, 360);
    CHECK(cl.s_plus == doctest::Approx(1.5).epsilon(1e-8));
    CHECK(cl.cauchy);

    const Field c = Field::from_callable(disk({0.0, 0.0}, 2.0), [](const Vec2&) { return 1.0; });
    const SlopeLimit cc = slope_limit(c, kIso, {0.0, 0.0}, {0.5, 0.25}, 64);
    CHECK(cc.s_plus == 0.0);
    CHECK(cc.s_minus == 0.0);

    CHECK_THROWS_AS(slope_limit(c, kIso, {0.0, 0.0}, {0.25, 0.5}, 64), std::invalid_argument);
}

TEST_CASE("unbounded slope is reported, not silently capped") {
    const Field steep = Field::from_callable(disk({0.0, 0.0}, 2.0), [](const Vec2& x) {
        return x.norm() == 0.0 ? 0.0 : 1e12;
    });
    CHECK_THROWS_AS(slope_plus(steep, kIso, {0.0, 0.0}, 1.0, 32), UnboundedSlopeError);
}

TEST_CASE("radial_extremes") {
    const std::vector<double> radii{0.2, 0.4, 0.8, 1.6};

    const Field cone = cone_field(kIso, 2.0, 0.3);
    const RadialExtremes iso = radial_extremes(cone, {0.0, 0.0}, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        CHECK(iso.m[i] == doctest::Approx(0.3 + 2.0 * radii[i]).epsilon(1e-12));
        CHECK(iso.M[i] == doctest::Approx(0.3 + 2.0 * radii[i]).epsilon(1e-12));
    }
    CHECK(iso.m_trend.nondecreasing);
    CHECK(iso.M_trend.nondecreasing);

    const Field lin = plane({0.77, -0.3});
    const RadialExtremes lex = radial_extremes(lin, {0.0, 0.0}, radii, 1440);
    for (std::size_t i = 0; i < radii.size(); ++i)
        CHECK(lex.m[i] == doctest::Approx(-lex.M[i]).epsilon(1e-6));

    // support values of the ellipse p1^2 + 4 p2^2 = 1: max 1, min 1/2
    const Field an = cone_field(kAniso, 0.5);
    const RadialExtremes aex = radial_extremes(an, {0.0, 0.0}, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        CHECK(aex.M[i] == doctest::Approx(radii[i]).epsilon(1e-8));
        CHECK(aex.m[i] == doctest::Approx(0.5 * radii[i]).epsilon(1e-8));
    }
}

TEST_CASE("field gradients") {
    const Vec2 p{1.2, -0.4};
    CHECK((plane(p).gradient({0.3, 0.3}) - p).norm() <= 1e-14);  // analytic

    const Field s = Field::from_callable(disk({0.0, 0.0}, 2.0),
                                         [](const Vec2& x) { return std::sin(x[0]) * x[1]; });
    const Vec2 g = s.gradient({0.5, 0.7});  // central differences
    CHECK(g[0] == doctest::Approx(std::cos(0.5) * 0.7).epsilon(1e-8));
    CHECK(g[1] == doctest::Approx(std::sin(0.5)).epsilon(1e-8));
}
