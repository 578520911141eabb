// Claim-verification suite: one line per criterion, nonzero exit on any
// failure.  The same checks back the CLI's `verify` subcommand.

#include <chrono>
#include <cstdio>

#include "crncalc/verify.hpp"

int main(int argc, char** argv) {
    using clock = std::chrono::steady_clock;
    bool quick = argc > 1 && std::string(argv[1]) == "--quick";

    const auto& checks = crncalc::verify::all_checks();
    int failures = 0;
    for (size_t i = 0; i < checks.size(); ++i) {
        auto t0 = clock::now();
        auto results = crncalc::verify::run_checks(checks[i].name, quick);
        double dt = std::chrono::duration<double>(clock::now() - t0).count();
        for (const auto& r : results) {
            std::printf("%s criterion %2zu %-20s (%6.3fs) %s\n",
                        r.passed ? "PASS" : "FAIL", i + 1, r.name.c_str(), dt,
                        r.detail.c_str());
            if (!r.passed) ++failures;
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all %zu criteria passed\n", checks.size());
    return failures == 0 ? 0 : 1;
}
