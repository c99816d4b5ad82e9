#pragma once

#include <string>
#include <vector>

#include "imdiff/setup.hpp"

namespace imdiff {

struct CheckResult {
    std::string name;
    bool pass = false;
    bool warn_only = false;  // reported but never gates the exit code
    std::string detail;
};

// Runs the invariant suite against the configured problem/schedule: oracle
// finite-difference agreement, Hessian symmetry, Lipschitz sampling, step-size
// range, lifted-map Jacobian agreement, the F_k Lipschitz bound, structural
// properties of the propagation, spectral-radius route consistency, and the
// premise checks (Premise B is diagnostic only - a warner, not a gate).
std::vector<CheckResult> run_check_suite(const RunConfig& cfg);

// True when no gating check failed.
bool all_checks_pass(const std::vector<CheckResult>& results);

}  // namespace imdiff
