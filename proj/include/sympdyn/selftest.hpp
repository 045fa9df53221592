#pragma once

#include <string>
#include <vector>

namespace sympdyn::selftest {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

// The ten acceptance criteria, in order, each at its pinned tolerance.
std::vector<CriterionResult> run_all_criteria();

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace sympdyn::selftest
