#pragma once

// Self-check suite behind `pfbe check` and the acceptance test binary. Each
// check builds its own instances, compares against an independent oracle
// (closed form, brute-force grid or finite differences) and reports a single
// pass/fail verdict with a short numeric summary.

#include <functional>
#include <string>
#include <vector>

namespace pfbe {

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0;
};

CheckResult check_example1_fidelity();
CheckResult check_exact_equivalence();
CheckResult check_eps_transfer();
CheckResult check_sandwich();
CheckResult check_lower_bound_identity();
CheckResult check_protocol_reproduction();
CheckResult check_gradient_correctness();
CheckResult check_subgda_descent();
CheckResult check_sweep_determinism();

/// All checks in order; `on_result` is called as each one finishes.
std::vector<CheckResult> run_all_checks(
    const std::function<void(const CheckResult &)> &on_result = {});

std::string format_check(const CheckResult &r);

} // namespace pfbe
