#pragma once

// Property suite run against every member of the convention matrix.

#include "flatvol/kernel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flatvol {

struct CheckResult {
    int criterion = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct ConventionRow {
    ConventionFlags convention;
    std::vector<CheckResult> checks;

    bool all_pass() const;
    std::vector<std::string> failures() const;
};

struct ValidationReport {
    std::vector<ConventionRow> rows;

    /// True iff the validated convention passes every check and every other
    /// member of the matrix fails at least one.
    bool gate() const;
    const ConventionRow* row(ConventionFlags conv) const;
    /// Fixed-width pass/fail matrix plus failure details.
    std::string text() const;
};

struct ValidateOptions {
    std::uint64_t seed = 20241015;
    unsigned threads = 0;
};

ValidationReport run_validation(const ValidateOptions& options = {});

/// Individual checks, exposed for tests. Each is deterministic for a given seed.
CheckResult check_base_case(ConventionFlags conv, std::uint64_t seed);
CheckResult check_genus0_oracle(ConventionFlags conv, std::uint64_t seed);
CheckResult check_i0_independence(ConventionFlags conv, std::uint64_t seed);
CheckResult check_sn_invariance(ConventionFlags conv, std::uint64_t seed);
CheckResult check_integral_vanishing(ConventionFlags conv, std::uint64_t seed);
CheckResult check_kernel_regression(ConventionFlags conv);
CheckResult check_aab_identity();
CheckResult check_q_identity(std::uint64_t seed);
CheckResult check_polytope(std::uint64_t seed);
CheckResult check_wall_order(ConventionFlags conv);
CheckResult check_boundary_zero(ConventionFlags conv);
CheckResult check_slice_sign(ConventionFlags conv, unsigned threads);
CheckResult check_policy_independence(ConventionFlags conv, std::uint64_t seed);

}  // namespace flatvol
