// Acceptance gate: runs every criterion at full scale and prints one
// pass/fail line per criterion. Pass the CLI binary path as argv[1] to
// include the end-to-end determinism round-trip.
#include "aronsson/suite.hpp"

#include <cstdio>
#include <cstring>

int main(int argc, char** argv) {
    aronsson::SuiteConfig cfg;
    cfg.seed = 1;
    cfg.threads = 2;
    if (argc > 1) cfg.cli_path = argv[1];
    for (int i = 2; i < argc; ++i)
        if (std::strcmp(argv[i], "--reduced") == 0) cfg.reduced = true;

    const auto results = aronsson::run_acceptance_battery(cfg);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %2d: %s (%s)\n", r.passed ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str());
        std::fflush(stdout);
        all = all && r.passed;
    }
    std::printf("%s\n", all ? "acceptance: all criteria passed"
                            : "acceptance: FAILURES listed above");
    return all ? 0 : 1;
}
