#pragma once

#include "aronsson/comparison.hpp"
#include "aronsson/singularity.hpp"
#include "aronsson/solver.hpp"

#include <string>

namespace aronsson {

/// One CSV line, shortest round-trip decimals, trailing newline.
std::string csv_line(const std::vector<double>& values);

/// (k, x1, x2, value, p1, p2, kkt_residual) rows.
std::string cone_csv(const Hamiltonian& H, const std::vector<double>& levels,
                     const std::vector<Vec2>& points);

/// (r, S_plus, S_minus) rows.
std::string slope_csv(const SlopeEstimate& est);

/// (r, m, M) rows.
std::string radial_csv(const RadialExtremes& ext);

std::string comparison_report_json(const ComparisonReport& report);

std::string singularity_report_json(const SingularityReport& report);

/// (scale, affine_res, cone_plus_res, cone_minus_res, k_plus, k_minus).
std::string classify_ladders_csv(const SingularityReport& report);

/// (t, x, y, level) rows.
std::string flow_csv(const FlowTrace& trace);

std::string flow_summary_json(const FlowTrace& trace);

/// (x, y, u) rows over active nodes, lexicographic node order.
std::string grid_csv(const Grid2& grid);

std::string solve_summary_json(const RelaxResult& result, const ResidualStats& stats);

void write_file(const std::string& path, const std::string& content);

}  // namespace aronsson
