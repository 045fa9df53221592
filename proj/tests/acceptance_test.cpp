// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit code 0 only when all pass.

#include <cstdio>

#include "sympdyn/selftest.hpp"

int main() {
    const auto results = sympdyn::selftest::run_all_criteria();
    int failures = 0;
    for (const auto& r : results) {
        std::printf("%s criterion %2d: %s — %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures == 0 ? 0 : 1;
}
