#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mvm/pipeline.hpp"

namespace mvm {

struct Verdict {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
};

struct AcceptanceOptions {
    double epsilon = 0.05;  // epsilon of the main run
    std::vector<double> robustness{0.03, 0.05, 0.08};
    int property_samples = 100;
    std::uint64_t property_seed = 11;
};

struct AcceptanceResult {
    std::vector<Verdict> verdicts;  // criteria 1..10 in order
    nlohmann::json report;          // the full run report of the main epsilon
    bool all_pass() const;
};

// Checks of criteria 1-7 on one workspace, plus the invariant data compared across epsilons.
struct CoreChecks {
    std::vector<Verdict> verdicts;
    nlohmann::json signature;
};
CoreChecks core_checks(Workspace& ws);

// Config `base` with every multi-section's epsilon replaced.
RunConfig with_epsilon(RunConfig base, double epsilon);

// Criteria 1-10. Objects are looked up by kind: line sections of degree 0, 1, 2, one tangent and
// one cotangent multi-section.
AcceptanceResult run_acceptance(const RunConfig& base, const AcceptanceOptions& opt = {});

// Report with top-level keys config, generators, networks, trees, complexes, verdicts.
nlohmann::json build_report(Workspace& ws, const std::vector<Verdict>& verdicts);

}  // namespace mvm
