#ifndef CRNCALC_VERIFY_HPP
#define CRNCALC_VERIFY_HPP

#include <functional>
#include <string>
#include <vector>

namespace crncalc::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Check {
    std::string name;
    std::string summary;
    std::function<CheckResult(bool quick)> run;
};

// The full claim-verification suite, in criterion order.
const std::vector<Check>& all_checks();

// selector: "all" or one check name; quick trims each grid to its endpoints
std::vector<CheckResult> run_checks(const std::string& selector, bool quick);

std::string results_csv(const std::vector<CheckResult>& results);

} // namespace crncalc::verify

#endif
