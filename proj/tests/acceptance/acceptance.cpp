// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include "pfbe/checks.hpp"

#include <iostream>

int main() {
    int failed = 0;
    pfbe::run_all_checks([&](const pfbe::CheckResult &r) {
        std::cout << pfbe::format_check(r) << std::endl;
        if (!r.passed)
            ++failed;
    });
    std::cout << failed << " of 9 criteria failed\n";
    return failed == 0 ? 0 : 1;
}
