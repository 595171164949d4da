#pragma once

#include <string>
#include <vector>

namespace ricci::acceptance {

struct CriterionResult {
    std::string id;
    std::string name;
    bool pass = false;
    std::string details;
};

/// All individual criterion ids, in report order ("all" runs every one).
std::vector<std::string> suite_names();
bool is_suite(const std::string& name);

/// Runs a named criterion (or "all"). The seed feeds the randomized
/// property checks.
std::vector<CriterionResult> run_suite(const std::string& name, unsigned seed);

}  // namespace ricci::acceptance
