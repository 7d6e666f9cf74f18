#include "aronsson/io.hpp"

#include <json.hpp>

#include <fstream>

namespace aronsson {

using nlohmann::json;

std::string csv_line(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += format_double(values[i]);
    }
    out += "\n";
    return out;
}

std::string cone_csv(const Hamiltonian& H, const std::vector<double>& levels,
                     const std::vector<Vec2>& points) {
    std::string out = "k,x1,x2,value,p1,p2,kkt_residual\n";
    for (double k : levels) {
        for (const Vec2& x : points) {
            const ConeValue cv = eval_cone(H, k, to_vec(x));
            const Vec p = cv.maximizer.value_or(Vec::Zero(2));
            out += csv_line({k, x[0], x[1], cv.value, p[0], p[1], cv.kkt_residual});
        }
    }
    return out;
}

std::string slope_csv(const SlopeEstimate& est) {
    std::string out = "r,S_plus,S_minus\n";
    for (std::size_t i = 0; i < est.radii.size(); ++i)
        out += csv_line({est.radii[i], est.s_plus[i], est.s_minus[i]});
    return out;
}

std::string radial_csv(const RadialExtremes& ext) {
    std::string out = "r,m,M\n";
    for (std::size_t i = 0; i < ext.radii.size(); ++i)
        out += csv_line({ext.radii[i], ext.m[i], ext.M[i]});
    return out;
}

namespace {

json witness_json(const Witness& w) {
    json j;
    j["vertex"] = {w.vertex[0], w.vertex[1]};
    j["k"] = w.k;
    j["b"] = w.b;
    j["a"] = w.a;
    j["x"] = {w.x[0], w.x[1]};
    if (w.y) j["y"] = {(*w.y)[0], (*w.y)[1]};
    j["radius"] = w.radius;
    j["violation"] = w.violation;
    return j;
}

}  // namespace

std::string comparison_report_json(const ComparisonReport& report) {
    json j;
    j["property"] = to_string(report.property);
    j["status"] = to_string(report.status);
    j["passed"] = report.passed;
    j["max_margin"] = report.max_margin;
    j["tolerance"] = report.tolerance;
    if (report.property == Property::KComparison) j["needed_k_factor"] = report.needed_k_factor;
    if (!report.note.empty()) j["note"] = report.note;
    if (report.witness) j["witness"] = witness_json(*report.witness);
    return j.dump(1) + "\n";
}

std::string singularity_report_json(const SingularityReport& report) {
    json j;
    j["center"] = {report.center[0], report.center[1]};
    j["verdict"] = to_string(report.verdict);
    j["b"] = report.b;
    j["k"] = report.k;
    j["affine_p"] = {report.affine_p[0], report.affine_p[1]};
    j["scales"] = report.scales;
    j["affine_residuals"] = report.affine_residuals;
    j["cone_plus_residuals"] = report.cone_plus_residuals;
    j["cone_minus_residuals"] = report.cone_minus_residuals;
    j["k_plus_ladder"] = report.k_plus_ladder;
    j["k_minus_ladder"] = report.k_minus_ladder;
    j["limit_ok"] = report.limit_ok;
    j["limit"] = {{"radii", report.limit_evidence.radii},
                  {"m", report.limit_evidence.m},
                  {"M", report.limit_evidence.M},
                  {"last_gap", report.limit_evidence.last_gap},
                  {"cauchy", report.limit_evidence.cauchy},
                  {"monotone_rungs_m", report.limit_evidence.monotone_rungs_m},
                  {"monotone_rungs_M", report.limit_evidence.monotone_rungs_M}};
    if (!report.note.empty()) j["note"] = report.note;
    return j.dump(1) + "\n";
}

std::string classify_ladders_csv(const SingularityReport& report) {
    std::string out = "scale,affine_res,cone_plus_res,cone_minus_res,k_plus,k_minus\n";
    for (std::size_t i = 0; i < report.scales.size(); ++i)
        out += csv_line({report.scales[i], report.affine_residuals[i],
                         report.cone_plus_residuals[i], report.cone_minus_residuals[i],
                         report.k_plus_ladder[i], report.k_minus_ladder[i]});
    return out;
}

std::string flow_csv(const FlowTrace& trace) {
    std::string out = "t,x,y,level\n";
    for (std::size_t i = 0; i < trace.states.size(); ++i)
        out += csv_line({trace.times[i], trace.states[i][0], trace.states[i][1], trace.levels[i]});
    return out;
}

std::string flow_summary_json(const FlowTrace& trace) {
    json j;
    const char* stop = "max_steps";
    switch (trace.stop) {
        case FlowStop::ReachedCenter: stop = "reached_center"; break;
        case FlowStop::LeftDomain: stop = "left_domain"; break;
        case FlowStop::GradientVanished: stop = "gradient_vanished"; break;
        case FlowStop::MaxSteps: stop = "max_steps"; break;
    }
    j["stop"] = stop;
    j["steps"] = trace.states.size();
    j["level_drift"] = trace.level_drift;
    if (!trace.states.empty()) {
        j["start"] = {trace.states.front()[0], trace.states.front()[1]};
        j["end"] = {trace.states.back()[0], trace.states.back()[1]};
        j["level_start"] = trace.levels.front();
    }
    return j.dump(1) + "\n";
}

std::string grid_csv(const Grid2& grid) {
    std::string out = "x,y,u\n";
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            if (grid.active(i, j)) {
                const Vec2 x = grid.pos(i, j);
                out += csv_line({x[0], x[1], grid.u[grid.idx(i, j)]});
            }
    return out;
}

std::string solve_summary_json(const RelaxResult& result, const ResidualStats& stats) {
    json j;
    j["spacing"] = result.grid.h;
    j["nx"] = result.grid.nx;
    j["ny"] = result.grid.ny;
    j["iterations"] = result.iterations;
    j["final_update"] = result.final_update;
    j["converged"] = result.converged;
    j["tau_last"] = result.tau_last;
    j["residual"] = {{"max_abs", stats.max_abs},
                     {"mean_abs", stats.mean_abs},
                     {"evaluated", stats.evaluated},
                     {"excluded", stats.excluded}};
    return j.dump(1) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    out << content;
}

}  // namespace aronsson
