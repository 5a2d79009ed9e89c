#pragma once

#include <string>
#include <vector>

namespace spikeforge {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidateOptions {
    // fault-injection hook: scales every device current and the
    // behavioral synapse drive; 1.0 is the honest run. Used to show the
    // finite-difference oracle is self-consistent (still passes) while
    // the closed-form rate oracle is absolute (fails).
    double fault_current_scale = 1.0;
};

// Pinned-tolerance oracle suite: device Jacobian vs central finite
// differences, subthreshold swing band, RC analytic transient, LIF
// closed-form rates, and per-architecture energy closure.
std::vector<CheckResult> run_validation(const ValidateOptions& opt = {});

bool all_passed(const std::vector<CheckResult>& results);

} // namespace spikeforge
