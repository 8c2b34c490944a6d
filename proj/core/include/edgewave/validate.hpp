// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edgewave {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;      // measured quantity
    double threshold = 0.0;  // gate it was compared against
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool pass() const {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
};

// Named oracle suites behind the `validate` subcommand.
SuiteReport validate_bedrf(uint64_t seed);
SuiteReport validate_sampler(uint64_t seed);
SuiteReport validate_measure(uint64_t seed);
SuiteReport validate_wedge_ir(uint64_t seed);
SuiteReport validate_single_slit(uint64_t seed);

SuiteReport run_suite(const std::string& name, uint64_t seed);

// Shared statistics helpers.
double chi_square_p_value(double statistic, double dof);
double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace edgewave
