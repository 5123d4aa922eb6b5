#pragma once

// Closed-form and cross-oracle checks shared by `gradstorm validate` and the
// acceptance binary. Every check is deterministic given its seed.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gradstorm::validation {

struct Table {
    std::string name;  // artifact file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct CheckResult {
    std::string id;
    std::string title;
    bool passed = false;
    // Reporting checks always pass once they have produced their numbers.
    bool report_only = false;
    std::string detail;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<Table> tables;
};

struct SuiteOptions {
    std::uint64_t seed = 20240607;
    std::uint64_t mc_samples = 1'000'000;
};

CheckResult uniform_exactness();
CheckResult gaussian_closed_form();
CheckResult monte_carlo_agreement(const SuiteOptions& opts);
CheckResult blowup_threshold();
CheckResult b3_prefactor_report();
CheckResult suppressed_limit();
CheckResult slope_expansion_consistency();
CheckResult vanishing_noise_limit();
// Not acceptance gates, but part of validate.
CheckResult kernel_transcription();
CheckResult characteristics_agreement(const SuiteOptions& opts);

/// Every check above, in a fixed order.
std::vector<CheckResult> run_suite(const SuiteOptions& opts);

}  // namespace gradstorm::validation
