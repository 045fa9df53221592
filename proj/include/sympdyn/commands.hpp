#pragma once

#include <string>
#include <vector>

#include "sympdyn/config.hpp"

namespace sympdyn::harness {

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> lines; // human-readable summary
    std::vector<std::string> files; // artifacts written
};

// Executes one command end to end (instance construction, integration,
// artifact emission). Throws only on config/filesystem problems discovered
// before a run starts; dynamics errors are recorded in the outcome.
RunOutcome run(const ExperimentConfig& cfg);

} // namespace sympdyn::harness
