#pragma once

#include "aronsson/common.hpp"

#include <string>
#include <vector>

namespace aronsson {

struct SuiteConfig {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir;    // empty: no artifacts written
    bool reduced = false;   // structure-complete battery at smaller sizes
    std::string cli_path;   // when set, criterion 12 also round-trips the CLI
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the full acceptance battery in criterion order. Every tolerance is
/// pinned in code; `reduced` shrinks sample counts and grids without
/// dropping any criterion.
std::vector<CriterionResult> run_acceptance_battery(const SuiteConfig& cfg);

}  // namespace aronsson
