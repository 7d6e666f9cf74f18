// Command-line driver: config-driven experiments over the library with
// machine-readable CSV/JSON artifacts and a manifest per run.
#include "aronsson/config.hpp"
#include "aronsson/io.hpp"
#include "aronsson/suite.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

using namespace aronsson;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfigError = 2;

struct RunContext {
    Config cfg;
    std::string subcommand;
    std::string out_dir;
    std::uint64_t seed = 1;
    int nthreads = 1;
    std::vector<std::string> outputs;

    Hamiltonian hamiltonian() const {
        return make_builtin(cfg.get("hamiltonian", "isotropic"));
    }

    void write(const std::string& name, const std::string& content) {
        write_file(out_dir + "/" + name, content);
        outputs.push_back(name);
    }

    void finish() {
        json j;
        j["version"] = kVersion;
        j["subcommand"] = subcommand;
        j["seed"] = seed;
        j["threads"] = nthreads;
        const std::string canon = cfg.canonical_text();
        j["resolved_config"] = canon;
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(fnv1a(canon)));
        j["config_hash"] = std::string(hash);
        j["outputs"] = outputs;
        write_file(out_dir + "/manifest.json", j.dump(1) + "\n");
    }
};

const std::vector<std::string> kGlobalKeys{"hamiltonian", "seed", "threads", "out", "field",
                                           "domain"};

std::vector<std::string> with_global(std::initializer_list<std::string> keys) {
    std::vector<std::string> all = kGlobalKeys;
    all.insert(all.end(), keys);
    return all;
}

Field field_from(const RunContext& ctx, const Hamiltonian& H) {
    const DomainDesc dom = parse_domain(ctx.cfg.get("domain", "disk:0,0,4"));
    return make_field(ctx.cfg.get("field"), dom, H);
}

int cmd_cone(RunContext& ctx) {
    ctx.cfg.require_known(with_global({"cone.levels", "cone.directions", "cone.radius"}));
    const Hamiltonian H = ctx.hamiltonian();
    const std::vector<double> levels = ctx.cfg.has("cone.levels")
                                           ? ctx.cfg.get_list("cone.levels")
                                           : std::vector<double>{0.5, 1.0, 2.0};
    const int ndirs = ctx.cfg.get_int("cone.directions", 360);
    const double radius = ctx.cfg.get_double("cone.radius", 1.0);
    std::vector<Vec2> pts;
    for (int j = 0; j < ndirs; ++j) {
        const double t = 2.0 * M_PI * j / ndirs;
        pts.push_back(Vec2{radius * std::cos(t), radius * std::sin(t)});
    }
    ctx.write("cone.csv", cone_csv(H, levels, pts));
    return kExitPass;
}

int cmd_slope(RunContext& ctx) {
    ctx.cfg.require_known(with_global({"slope.center", "slope.radii", "slope.samples"}));
    const Hamiltonian H = ctx.hamiltonian();
    const Field u = field_from(ctx, H);
    const auto center = ctx.cfg.get_points("slope.center").at(0);
    std::vector<double> radii = ctx.cfg.get_list("slope.radii");
    const int N = ctx.cfg.get_int("slope.samples", 720);
    const SlopeEstimate est = slope_ladder(u, H, center, radii, N);
    ctx.write("slope.csv", slope_csv(est));
    ctx.write("radial.csv", radial_csv(radial_extremes(u, center, radii, N)));
    return kExitPass;
}

int cmd_check(RunContext& ctx, const std::string& property_flag) {
    ctx.cfg.require_known(with_global({"check.property", "check.region", "check.vertices",
                                       "check.levels", "check.slopes", "check.lambda",
                                       "check.samples", "check.k0", "check.pairs",
                                       "check.radii", "check.boundary_n", "check.interior_n",
                                       "check.tol"}));
    const Hamiltonian H = ctx.hamiltonian();
    const Field u = field_from(ctx, H);
    const std::string prop = property_flag.empty() ? ctx.cfg.get("check.property") : property_flag;
    const int N = ctx.cfg.get_int("check.samples", 720);
    CheckOptions copt;
    if (ctx.cfg.has("check.tol")) copt.tol = ctx.cfg.get_double("check.tol");

    ComparisonReport rep;
    if (prop == "cgca" || prop == "cgcb" || prop == "kcomp") {
        const DomainDesc region = parse_domain(ctx.cfg.get("check.region"));
        const std::vector<Vec2> vertices = ctx.cfg.has("check.vertices")
                                               ? ctx.cfg.get_points("check.vertices")
                                               : default_vertices(region);
        if (prop == "kcomp") {
            const std::vector<double> slopes = ctx.cfg.has("check.slopes")
                                                   ? ctx.cfg.get_list("check.slopes")
                                                   : std::vector<double>{0.25, 0.5, 1.0};
            rep = check_kcomparison(u, H, region, vertices, slopes, N, copt);
        } else {
            const std::vector<double> levels = ctx.cfg.has("check.levels")
                                                   ? ctx.cfg.get_list("check.levels")
                                                   : std::vector<double>{0.5, 1.0, 2.0};
            rep = prop == "cgca" ? check_cgca(u, H, region, vertices, levels, N, copt)
                                 : check_cgcb(u, H, region, vertices, levels, N, copt);
        }
    } else if (prop == "amle") {
        const DomainDesc region = parse_domain(ctx.cfg.get("check.region"));
        rep = check_amle(u, H, region, ctx.cfg.get_double("check.lambda"),
                         ctx.cfg.get_int("check.boundary_n", 240),
                         ctx.cfg.get_int("check.interior_n", 360), copt);
    } else if (prop == "segment") {
        const auto pts = ctx.cfg.get_points("check.pairs");
        if (pts.size() % 2 != 0) throw ConfigError("check.pairs needs an even number of points");
        std::vector<std::pair<Vec2, Vec2>> pairs;
        for (std::size_t i = 0; i + 1 < pts.size(); i += 2) pairs.emplace_back(pts[i], pts[i + 1]);
        rep = check_segment(u, H, ctx.cfg.get_double("check.k0"), pairs, copt);
    } else if (prop == "harnack") {
        rep = check_harnack(u, H, ctx.cfg.get_list("check.radii"), N, copt);
    } else if (prop == "maxprin") {
        const DomainDesc region = parse_domain(ctx.cfg.get("check.region"));
        rep = check_extremum_principle(u, region, N, ctx.cfg.get_int("check.interior_n", 128),
                                       copt);
    } else {
        throw ConfigError("unknown check property '" + prop + "'");
    }

    ctx.write("check.json", comparison_report_json(rep));
    std::cout << to_string(rep.property) << ": " << to_string(rep.status) << "\n";
    if (rep.status == CheckStatus::Pass) return kExitPass;
    if (rep.status == CheckStatus::Violation) return kExitViolation;
    return kExitConfigError;  // vacuous or failed precondition
}

int cmd_solve(RunContext& ctx) {
    ctx.cfg.require_known(with_global({"solve.problem_domain", "solve.h", "solve.boundary",
                                       "solve.pin", "solve.stop_tol", "solve.max_iters",
                                       "solve.scheme"}));
    const Hamiltonian H = ctx.hamiltonian();

    const std::string dspec = ctx.cfg.get("solve.problem_domain");
    std::function<bool(const Vec2&)> inside;
    Vec2 lo, hi;
    const auto colon = dspec.find(':');
    if (dspec.substr(0, colon) == "cone_sublevel") {
        if (colon == std::string::npos) throw ConfigError("cone_sublevel needs k,level");
        const auto p = Config::parse("v = " + dspec.substr(colon + 1)).get_list("v");
        if (p.size() != 2) throw ConfigError("cone_sublevel needs k,level");
        const double k = p[0], level = p[1];
        auto hptr = std::make_shared<Hamiltonian>(H);
        double rmax = 0.0;
        for (int j = 0; j < 360; ++j) {
            const double t = 2.0 * M_PI * j / 360;
            Vec e(2);
            e << std::cos(t), std::sin(t);
            rmax = std::max(rmax, level / eval_cone(*hptr, k, e).value);
        }
        lo = Vec2{-1.1 * rmax, -1.1 * rmax};
        hi = -lo;
        inside = [hptr, k, level](const Vec2& x) {
            if (x.norm() == 0.0) return true;
            return eval_cone(*hptr, k, to_vec(x)).value < level;
        };
    } else {
        const DomainDesc dom = parse_domain(dspec);
        lo = dom.center - Vec2{dom.r_outer, dom.r_outer};
        hi = dom.center + Vec2{dom.r_outer, dom.r_outer};
        inside = [dom](const Vec2& x) { return dom.contains_point(x); };
    }

    const double h = ctx.cfg.get_double("solve.h");
    if (!(h > 0)) throw ConfigError("solve.h must be positive");
    const int nx = static_cast<int>(std::ceil((hi[0] - lo[0]) / h)) + 1;
    const int ny = static_cast<int>(std::ceil((hi[1] - lo[1]) / h)) + 1;
    const Grid2 dom = make_grid(lo, h, nx, ny, inside);

    const Field bfield = make_field(ctx.cfg.get("solve.boundary"), disk({0, 0}, 1e30), H);
    std::optional<std::pair<Vec2, double>> pin;
    if (ctx.cfg.has("solve.pin")) {
        const auto p = ctx.cfg.get_list("solve.pin");
        if (p.size() != 3) throw ConfigError("solve.pin needs x,y,value");
        pin = std::make_pair(Vec2{p[0], p[1]}, p[2]);
    }
    RelaxOptions opt;
    opt.stop_tol = ctx.cfg.get_double("solve.stop_tol", 1e-10);
    opt.max_iters = ctx.cfg.get_int("solve.max_iters", 400000);

    RelaxResult rr;
    const std::string scheme = ctx.cfg.get("solve.scheme", "jacobi");
    if (scheme == "jacobi")
        rr = relax([&bfield](const Vec2& x) { return bfield(x); }, H, dom, pin, opt);
    else if (scheme == "oberman")
        rr = relax_oberman([&bfield](const Vec2& x) { return bfield(x); }, dom, pin, opt);
    else
        throw ConfigError("solve.scheme must be jacobi or oberman");

    const ResidualStats rs = residual(rr.grid, H);
    ctx.write("u.csv", grid_csv(rr.grid));
    save_grid_json(rr.grid, ctx.out_dir + "/grid.json");
    ctx.outputs.push_back("grid.json");
    ctx.write("solve.json", solve_summary_json(rr, rs));
    std::cout << "solve: " << (rr.converged ? "converged" : "iteration budget exhausted") << " in "
              << rr.iterations << " sweeps, final update " << format_double(rr.final_update)
              << "\n";
    return kExitPass;
}

int cmd_classify(RunContext& ctx) {
    ctx.cfg.require_known(with_global({"classify.center", "classify.scales",
                                       "classify.limit_radii", "classify.samples",
                                       "classify.mesh_nr", "classify.mesh_ntheta"}));
    const Hamiltonian H = ctx.hamiltonian();
    const Field u = field_from(ctx, H);
    const Vec2 center = ctx.cfg.has("classify.center")
                            ? ctx.cfg.get_points("classify.center").at(0)
                            : Vec2{0.0, 0.0};
    ClassifyConfig cc = default_classify_config();
    if (ctx.cfg.has("classify.scales")) cc.scales = ctx.cfg.get_list("classify.scales");
    if (ctx.cfg.has("classify.limit_radii"))
        cc.limit_radii = ctx.cfg.get_list("classify.limit_radii");
    cc.slope_samples = ctx.cfg.get_int("classify.samples", cc.slope_samples);
    cc.limit_samples = cc.slope_samples;
    cc.mesh.nr = ctx.cfg.get_int("classify.mesh_nr", cc.mesh.nr);
    cc.mesh.ntheta = ctx.cfg.get_int("classify.mesh_ntheta", cc.mesh.ntheta);

    const SingularityReport rep = classify(u, H, center, cc);
    ctx.write("classify.json", singularity_report_json(rep));
    ctx.write("ladders.csv", classify_ladders_csv(rep));
    std::cout << "verdict: " << to_string(rep.verdict) << " (k = " << format_double(rep.k)
              << ", b = " << format_double(rep.b) << ")\n";
    return kExitPass;
}

int cmd_flow(RunContext& ctx) {
    ctx.cfg.require_known(with_global({"flow.start", "flow.center", "flow.step",
                                       "flow.max_steps"}));
    const Hamiltonian H = ctx.hamiltonian();
    const Field u = field_from(ctx, H);
    const Vec2 start = ctx.cfg.get_points("flow.start").at(0);
    const Vec2 center = ctx.cfg.has("flow.center") ? ctx.cfg.get_points("flow.center").at(0)
                                                   : Vec2{0.0, 0.0};
    const FlowTrace tr = flow_trace(u, H, start, center, ctx.cfg.get_double("flow.step", 0.01),
                                    ctx.cfg.get_int("flow.max_steps", 100000));
    ctx.write("flow.csv", flow_csv(tr));
    ctx.write("flow.json", flow_summary_json(tr));
    return kExitPass;
}

int cmd_suite(RunContext& ctx) {
    ctx.cfg.require_known(with_global({"suite.scale"}));
    SuiteConfig scfg;
    scfg.seed = ctx.seed;
    scfg.threads = ctx.nthreads;
    scfg.out_dir = ctx.out_dir;
    scfg.reduced = ctx.cfg.get("suite.scale", "full") == "reduced";

    const auto results = run_acceptance_battery(scfg);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %2d: %s (%s)\n", r.passed ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str());
        all = all && r.passed;
    }
    // timings vary between runs; the byte-compared summary keeps outcomes only
    json stable = json::array();
    for (const auto& r : results)
        stable.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}});
    ctx.write("suite_summary.json", stable.dump(1) + "\n");
    std::printf("%s\n", all ? "suite: all criteria passed" : "suite: FAILURES above");
    return all ? kExitPass : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cone functions, comparison checkers and singularity analysis for Aronsson equations"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    std::string config_path, out_flag, property_flag, center_flag, radii_flag;
    int samples_flag = 0;
    std::uint64_t seed_flag = 0;
    int threads_flag = 0;

    app.add_option("--config", config_path, "configuration file (or a manifest.json to re-run)");
    app.add_option("--out", out_flag, "output directory (overrides config and ARONSSON_OUT)");
    app.add_option("--seed", seed_flag, "seed override");
    app.add_option("--threads", threads_flag,
                   "worker threads (results are thread-count independent)");

    auto* cone = app.add_subcommand("cone", "evaluate general cones over direction meshes");
    auto* slope = app.add_subcommand("slope", "slope functionals over a radius ladder");
    slope->add_option("--center", center_flag, "center x,y");
    slope->add_option("--radii", radii_flag, "comma separated radii");
    slope->add_option("--samples", samples_flag, "angular samples");
    auto* check = app.add_subcommand("check", "comparison property checks");
    check->add_option("--property", property_flag, "cgca|cgcb|amle|kcomp|segment|harnack|maxprin");
    auto* solve = app.add_subcommand("solve", "relax a Dirichlet problem");
    auto* classify = app.add_subcommand("classify", "isolated singularity classification");
    auto* flow = app.add_subcommand("flow", "characteristic flow trace");
    auto* suite = app.add_subcommand("suite", "run the acceptance battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitPass : kExitConfigError;
    }

    try {
        RunContext ctx;
        ctx.cfg = config_path.empty() ? Config{} : Config::load_file(config_path);

        if (!center_flag.empty()) ctx.cfg.set("slope.center", center_flag);
        if (!radii_flag.empty()) ctx.cfg.set("slope.radii", radii_flag);
        if (samples_flag > 0) ctx.cfg.set("slope.samples", std::to_string(samples_flag));
        if (!property_flag.empty()) ctx.cfg.set("check.property", property_flag);

        ctx.seed = seed_flag != 0 ? seed_flag
                                  : static_cast<std::uint64_t>(ctx.cfg.get_double("seed", 1));
        ctx.nthreads = threads_flag > 0 ? threads_flag : ctx.cfg.get_int("threads", 1);
        ctx.cfg.set("seed", std::to_string(ctx.seed));
        ctx.cfg.set("threads", std::to_string(ctx.nthreads));
        set_threads(ctx.nthreads);

        const char* env_out = std::getenv("ARONSSON_OUT");
        ctx.out_dir = !out_flag.empty() ? out_flag
                                        : ctx.cfg.get("out", env_out ? env_out : "out");
        ctx.cfg.set("out", ctx.out_dir);
        std::filesystem::create_directories(ctx.out_dir);

        int code = kExitConfigError;
        if (cone->parsed()) {
            ctx.subcommand = "cone";
            code = cmd_cone(ctx);
        } else if (slope->parsed()) {
            ctx.subcommand = "slope";
            code = cmd_slope(ctx);
        } else if (check->parsed()) {
            ctx.subcommand = "check";
            code = cmd_check(ctx, property_flag);
        } else if (solve->parsed()) {
            ctx.subcommand = "solve";
            code = cmd_solve(ctx);
        } else if (classify->parsed()) {
            ctx.subcommand = "classify";
            code = cmd_classify(ctx);
        } else if (flow->parsed()) {
            ctx.subcommand = "flow";
            code = cmd_flow(ctx);
        } else if (suite->parsed()) {
            ctx.subcommand = "suite";
            code = cmd_suite(ctx);
        }
        ctx.finish();
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}
