// check.hpp: self-test of the solvers on small reference cases.

#pragma once

#include <string>
#include <vector>

namespace nesslab::check {

struct CheckResult {
    std::string name;
    bool ok{false};
    std::string detail;
};

/// Runs the built-in invariant checks (a few seconds in total).
std::vector<CheckResult> run_checks();

} // namespace nesslab::check
