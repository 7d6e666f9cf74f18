#include "aronsson/singularity.hpp"

#include "doctest.h"

#include <cmath>

using namespace aronsson;

namespace {

const Hamiltonian kIso = make_isotropic(2);
const Hamiltonian kAniso = make_anisotropic(1, 0, 4);

Field cone_plus_field(const Hamiltonian& H, double k, double b, double R = 2.0) {
    auto h = std::make_shared<Hamiltonian>(H);
    return Field::from_callable(disk({0.0, 0.0}, R), [h, k, b](const Vec2& x) {
        if (x.norm() == 0.0) return b;
        return b + eval_cone(*h, k, to_vec(x)).value;
    });
}

Field cone_minus_field(const Hamiltonian& H, double k, double b, double R = 0.4) {
    auto hh = std::make_shared<Hamiltonian>(reflect(H));
    return Field::from_callable(disk({0.0, 0.0}, R), [hh, k, b](const Vec2& x) {
        if (x.norm() == 0.0) return b;
        return b - eval_cone(*hh, k, to_vec(x)).value;
    });
}

Field perturbed_cone_field(const Hamiltonian& H, double k, double b, double amp, double R = 2.0) {
    auto h = std::make_shared<Hamiltonian>(H);
    return Field::from_callable(disk({0.0, 0.0}, R), [h, k, b, amp](const Vec2& x) {
        const double r = x.norm();
        if (r == 0.0) return b;
        const double th = std::atan2(x[1], x[0]);
        return b + eval_cone(*h, k, to_vec(x)).value + amp * std::pow(r, 1.5) * std::sin(3.0 * th);
    });
}

Field plane_field(const Vec2& p, double b, double R = 2.0) {
    return Field::from_callable(disk({0.0, 0.0}, R),
                                [p, b](const Vec2& x) { return b + p.dot(x); });
}

}  // namespace

TEST_CASE("limit_at_center on exact profiles") {
    std::vector<double> radii;
    for (int j = 0; j <= 8; ++j) radii.push_back(0.1 * std::pow(2.0, -j));

    const LimitResult iso = limit_at_center(cone_plus_field(kIso, 2.0, 3.0), {0, 0}, radii);
    CHECK(iso.ok);
    CHECK(iso.b == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(iso.evidence.last_gap <= 1e-9);  // circles are level sets here

    const LimitResult an = limit_at_center(cone_plus_field(kAniso, 2.0, 1.0), {0, 0}, radii);
    CHECK(an.ok);
    CHECK(an.b == doctest::Approx(1.0).epsilon(1e-3));
    // the gap closes linearly in r
    CHECK(an.evidence.last_gap == doctest::Approx(radii.back() * 1.0).epsilon(0.05));

    const LimitResult pl = limit_at_center(plane_field({0.6, -0.3}, 1.0), {0, 0}, radii);
    CHECK(pl.ok);
    CHECK(pl.b == doctest::Approx(1.0).epsilon(1e-9));

    const LimitResult pert =
        limit_at_center(perturbed_cone_field(kIso, 2.0, 1.5, 0.3), {0, 0}, radii);
    CHECK(pert.ok);
    CHECK(std::abs(pert.b - 1.5) <= 1e-3);
}

TEST_CASE("limit_at_center reports failure instead of guessing") {
    // angular jump keeps the circle gap open at every radius
    const Field bad = Field::from_callable(disk({0.0, 0.0}, 1.0), [](const Vec2& x) {
        return 1.0 + (x[1] > 0 ? 0.5 : 0.0);
    });
    std::vector<double> radii{0.1, 0.05, 0.025, 0.0125, 0.00625};
    const LimitResult res = limit_at_center(bad, {0, 0}, radii);
    CHECK(!res.ok);
    CHECK(!res.evidence.cauchy);
    CHECK(res.evidence.m.size() == radii.size());

    const Field neg = Field::from_callable(disk({0.0, 0.0}, 1.0),
                                           [](const Vec2& x) { return x[0]; });
    CHECK_THROWS_AS(limit_at_center(neg, {0, 0}, radii), std::invalid_argument);
}

TEST_CASE("blowup_sequence is the identity on homogeneous profiles") {
    const PolarMesh mesh{0.5, 1.0, 16, 90};
    const auto pts = mesh.points();

    const Field cone = cone_plus_field(kIso, 1.0, 2.0, 4.0);
    const auto ladder = blowup_sequence(cone, {0, 0}, 2.0, {0.5, 0.125, 0.03125}, mesh);
    REQUIRE(ladder.size() == 3);
    for (const auto& bf : ladder) {
        REQUIRE(!bf.truncated);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double expect = std::sqrt(2.0) * pts[i].norm();
            CHECK(std::abs(bf.mesh_values[i] - expect) <= 1e-10);
        }
    }

    const Field lin = plane_field({0.4, 0.9}, 2.0, 4.0);
    const auto pl = blowup_sequence(lin, {0, 0}, 2.0, {0.5, 0.0625}, mesh);
    for (const auto& bf : pl)
        for (std::size_t i = 0; i < pts.size(); ++i)
            CHECK(std::abs(bf.mesh_values[i] - Vec2{0.4, 0.9}.dot(pts[i])) <= 1e-10);

    // r^{1.5} perturbations shrink like sqrt(h) under rescaling
    const Field pert = perturbed_cone_field(kIso, 1.0, 0.0, 1.0, 4.0);
    const auto pd = blowup_sequence(pert, {0, 0}, 0.0, {0.4, 0.1, 0.025}, mesh);
    std::vector<double> sup;
    for (const auto& bf : pd) {
        double s = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            s = std::max(s, std::abs(bf.mesh_values[i] - std::sqrt(2.0) * pts[i].norm()));
        sup.push_back(s);
    }
    CHECK(sup[1] / sup[0] == doctest::Approx(0.5).epsilon(0.1));
    CHECK(sup[2] / sup[1] == doctest::Approx(0.5).epsilon(0.1));

    // scales beyond the domain are flagged, not silently evaluated
    const auto tr = blowup_sequence(cone_minus_field(kIso, 1.0, 1.0, 0.4), {0, 0}, 1.0, {0.5, 0.1});
    CHECK(tr[0].truncated);
    CHECK(!tr[1].truncated);
}

TEST_CASE("classify exact cones") {
    struct Case {
        const Hamiltonian* H;
        Field u;
        Verdict verdict;
        double k, b;
    };
    const std::vector<Case> cases{
        {&kIso, cone_plus_field(kIso, 2.0, 3.0), Verdict::ConePlus, 2.0, 3.0},
        {&kAniso, cone_plus_field(kAniso, 2.0, 3.0), Verdict::ConePlus, 2.0, 3.0},
        {&kIso, cone_minus_field(kIso, 1.0, 1.0), Verdict::ConeMinus, 1.0, 1.0},
        {&kAniso, cone_minus_field(kAniso, 1.0, 1.0), Verdict::ConeMinus, 1.0, 1.0},
    };
    for (const auto& c : cases) {
        ClassifyConfig cfg = default_classify_config();
        if (c.verdict == Verdict::ConeMinus) {
            // keep the ladder inside the region where u stays nonnegative
            cfg.limit_radii.clear();
            for (int j = 0; j <= 8; ++j) cfg.limit_radii.push_back(0.05 * std::pow(2.0, -j));
            cfg.scales.clear();
            for (int j = 0; j <= 6; ++j) cfg.scales.push_back(0.02 * std::pow(4.0, -j));
        }
        const SingularityReport rep = classify(c.u, *c.H, {0, 0}, cfg);
        CHECK(rep.verdict == c.verdict);
        CHECK(std::abs(rep.k - c.k) <= 1e-6 * c.k);
        CHECK(std::abs(rep.b - c.b) <= 1e-9);
        CHECK(rep.limit_ok);
    }
}

TEST_CASE("classify planes as removable") {
    const SingularityReport rep = classify(plane_field({0.8, -0.6}, 2.0), kIso, {0, 0});
    CHECK(rep.verdict == Verdict::Removable);
    CHECK((rep.affine_p - Vec2{0.8, -0.6}).norm() <= 1e-9);
    CHECK(std::abs(rep.b - 2.0) <= 1e-9);
}

TEST_CASE("classify perturbed cones") {
    const SingularityReport rep =
        classify(perturbed_cone_field(kIso, 2.0, 1.0, 1.0), kIso, {0, 0});
    CHECK(rep.verdict == Verdict::ConePlus);
    CHECK(std::abs(rep.k - 2.0) <= 0.01 * 2.0);
    CHECK(std::abs(rep.b - 1.0) <= 1e-3);
    // residual ladder decays
    REQUIRE(rep.cone_plus_residuals.size() >= 2);
    CHECK(rep.cone_plus_residuals.back() < rep.cone_plus_residuals.front());
}

TEST_CASE("detect_strict_growth") {
    const std::vector<double> probes{0.02, 0.01, 0.005};

    const GrowthReport up = detect_strict_growth(cone_plus_field(kIso, 1.0, 0.0), {0, 0}, kIso, probes);
    CHECK(up.found == GrowthCase::CaseII);
    CHECK(up.p.norm() <= 1e-6);  // isotropic fit is centered
    CHECK(up.epsilon > 0.0);

    const GrowthReport an = detect_strict_growth(cone_plus_field(kAniso, 0.5, 0.0), {0, 0}, kAniso, probes);
    CHECK(an.found == GrowthCase::CaseII);

    const GrowthReport down =
        detect_strict_growth(cone_minus_field(kIso, 1.0, 1.0), {0, 0}, kIso, probes);
    CHECK(down.found == GrowthCase::CaseIII);

    const GrowthReport flat = detect_strict_growth(plane_field({1.0, 0.2}, 0.5), {0, 0}, kIso, probes);
    CHECK(flat.found == GrowthCase::Neither);
    CHECK(std::abs(flat.inf_ratio) <= 1e-9);
}

TEST_CASE("classifier and growth detector agree on the builtin set") {
    const std::vector<double> probes{0.02, 0.01, 0.005};
    {
        const Field u = cone_plus_field(kAniso, 2.0, 3.0);
        CHECK(classify(u, kAniso, {0, 0}).verdict == Verdict::ConePlus);
        CHECK(detect_strict_growth(u, {0, 0}, kAniso, probes).found == GrowthCase::CaseII);
    }
    {
        ClassifyConfig cfg = default_classify_config();
        cfg.limit_radii.clear();
        for (int j = 0; j <= 8; ++j) cfg.limit_radii.push_back(0.05 * std::pow(2.0, -j));
        cfg.scales.clear();
        for (int j = 0; j <= 6; ++j) cfg.scales.push_back(0.02 * std::pow(4.0, -j));
        const Field u = cone_minus_field(kIso, 1.0, 1.0);
        CHECK(classify(u, kIso, {0, 0}, cfg).verdict == Verdict::ConeMinus);
        CHECK(detect_strict_growth(u, {0, 0}, kIso, probes).found == GrowthCase::CaseIII);
    }
    {
        const Field u = plane_field({0.5, 0.5}, 1.0);
        CHECK(classify(u, kIso, {0, 0}).verdict == Verdict::Removable);
        CHECK(detect_strict_growth(u, {0, 0}, kIso, probes).found == GrowthCase::Neither);
    }
}

TEST_CASE("ray equality along cone rays and gradient rays") {
    std::vector<double> ts;
    for (int i = 0; i <= 20; ++i) ts.push_back(-0.4 * i / 20.0);

    // along the ray through the apex the cone profile is exactly linear
    const Field cone = cone_plus_field(kIso, 1.0, 0.0, 4.0);
    const RayReport rc = ray_equality_check(cone, kIso, {0.5, 0.0}, {1.0, 0.0}, ts);
    CHECK(rc.max_abs_deviation <= 1e-10);

    // plane with H(p) = 1 along e = H_p(p)/|H_p(p)|
    const Vec2 p{std::sqrt(2.0), 0.0};
    const Field lin = plane_field(p, 0.0, 4.0);
    const RayReport rl = ray_equality_check(lin, kIso, {0.2, 0.3}, {1.0, 0.0}, ts);
    CHECK(rl.max_abs_deviation <= 1e-10);

    // a quadratic correction shows up quadratically
    const Field quad = Field::from_callable(disk({0.0, 0.0}, 4.0), [p](const Vec2& x) {
        return p.dot(x) + 0.1 * x.squaredNorm();
    });
    const RayReport rq = ray_equality_check(quad, kIso, {0.0, 0.0}, {1.0, 0.0}, {-0.1, -0.2, -0.4});
    CHECK(rq.deviation[0] == doctest::Approx(0.1 * 0.01).epsilon(1e-9));
    CHECK(rq.deviation[2] / rq.deviation[1] == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("flow_trace on exact fields") {
    // isotropic cone: straight characteristic into the vertex
    const Field iso_cone = Field::from_callable(
        disk({0.0, 0.0}, 2.0), [](const Vec2& x) { return std::sqrt(2.0) * x.norm(); },
        [](const Vec2& x) { return Vec2(std::sqrt(2.0) * x / x.norm()); });
    const FlowTrace tr = flow_trace(iso_cone, kIso, {1.0, 0.0}, {0.0, 0.0}, 0.01, 10000);
    CHECK(tr.stop == FlowStop::ReachedCenter);
    CHECK(tr.level_drift <= 1e-8);
    CHECK(std::abs(tr.levels[0] - 1.0) <= 1e-12);
    // straight path: the y coordinate never moves
    for (const Vec2& s : tr.states) CHECK(std::abs(s[1]) <= 1e-12);

    // anisotropic cone with the exact cone gradient
    auto an = std::make_shared<Hamiltonian>(kAniso);
    const Field an_cone = Field::from_callable(
        disk({0.0, 0.0}, 2.0),
        [an](const Vec2& x) { return eval_cone(*an, 0.5, to_vec(x)).value; },
        [an](const Vec2& x) {
            const Vec g = cone_gradient(*an, 0.5, to_vec(x));
            return Vec2{g[0], g[1]};
        });
    const FlowTrace ta = flow_trace(an_cone, kAniso, {0.6, 0.5}, {0.0, 0.0}, 0.005, 20000);
    CHECK(ta.stop == FlowStop::ReachedCenter);
    CHECK(ta.level_drift <= 1e-6);

    // planes: constant level, exits the domain
    const Field lin = plane_field({1.0, 0.0}, 0.0, 1.0);
    const FlowTrace tp = flow_trace(lin, kIso, {0.0, 0.0}, {10.0, 10.0}, 0.01, 100000);
    CHECK(tp.stop == FlowStop::LeftDomain);
    CHECK(tp.level_drift <= 1e-9);  // central-difference rounding floor
}

TEST_CASE("characteristic line integral collapses to the cone value") {
    // For exact cones, int Du . xi' dt telescopes to u(end) - u(start),
    // so the discrete line integral matches -C_k(start) up to the stopping
    // distance.
    auto an = std::make_shared<Hamiltonian>(kAniso);
    const Field u = Field::from_callable(
        disk({0.0, 0.0}, 2.0),
        [an](const Vec2& x) { return eval_cone(*an, 0.5, to_vec(x)).value; },
        [an](const Vec2& x) {
            const Vec g = cone_gradient(*an, 0.5, to_vec(x));
            return Vec2{g[0], g[1]};
        });
    const Vec2 start{0.08, 0.06};
    const FlowTrace tr = flow_trace(u, kAniso, start, {0.0, 0.0}, 2e-6, 200000);
    REQUIRE(tr.stop == FlowStop::ReachedCenter);
    double integral = 0.0;
    for (std::size_t i = 1; i < tr.states.size(); ++i) {
        const Vec2 d = tr.states[i] - tr.states[i - 1];
        integral += 0.5 * (u.gradient(tr.states[i - 1]) + u.gradient(tr.states[i])).dot(d);
    }
    const double expect = -eval_cone(kAniso, 0.5, to_vec(start)).value;
    CHECK(std::abs(integral - expect) <= 1e-5);
}

TEST_CASE("corollary_domain_check") {
    // unit sublevel boundary of C_2, sampled exactly by homogeneity
    for (const Hamiltonian* H : {&kIso, &kAniso}) {
        std::vector<Vec2> pts;
        for (int j = 0; j < 720; ++j) {
            const double t = 2.0 * M_PI * j / 720;
            Vec e(2);
            e << std::cos(t), std::sin(t);
            const double c = eval_cone(*H, 2.0, e).value;
            pts.push_back(Vec2{e[0] / c, e[1] / c});
        }
        const DomainCheckReport rep = corollary_domain_check(*H, 2.0, {0, 0}, pts);
        CHECK(rep.passed);
        CHECK(rep.max_boundary_deviation <= 1e-10);
        CHECK(std::abs(rep.k0 - 2.0) <= 1e-6);
    }

    // disk of radius rho: k0 = 1 / (2 rho^2)
    const double rho = 0.35;
    std::vector<Vec2> disk_pts;
    for (int j = 0; j < 360; ++j) {
        const double t = 2.0 * M_PI * j / 360;
        disk_pts.push_back(Vec2{rho * std::cos(t), rho * std::sin(t)});
    }
    const double k_expect = 1.0 / (2.0 * rho * rho);
    const DomainCheckReport dr = corollary_domain_check(kIso, k_expect, {0, 0}, disk_pts);
    CHECK(dr.passed);
    CHECK(dr.k0 == doctest::Approx(k_expect).epsilon(1e-9));

    // a 1 percent inflation is detected at 1 percent
    std::vector<Vec2> inflated;
    for (const Vec2& x : disk_pts) inflated.push_back(1.01 * x);
    const DomainCheckReport bad = corollary_domain_check(kIso, k_expect, {0, 0}, inflated);
    CHECK(!bad.passed);
    CHECK(bad.max_boundary_deviation == doctest::Approx(0.01).epsilon(1e-3));
}
