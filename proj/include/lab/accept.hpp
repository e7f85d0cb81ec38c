#pragma once

#include <string>
#include <vector>

#include "lab/config.hpp"

namespace lab {

struct CheckResult {
    int criterion = 0;
    std::string name;
    double measured = 0.0;
    std::string expected;  // human-readable target with tolerance
    bool pass = false;
    std::string note;
};

struct AcceptanceReport {
    std::vector<CheckResult> checks;
    bool partial = false;  // budget exhausted before all criteria ran
    bool all_pass() const {
        for (auto& c : checks)
            if (!c.pass) return false;
        return !partial;
    }
};

struct AcceptanceOptions {
    double budget_minutes = 30.0;
    std::uint64_t seed = 1;
    double tol_scale = 1.0;  // tightening factor for tolerance-sensitivity runs
    std::string out_dir;     // optional: write acceptance_report.json here
    bool quick = false;      // reduced resolutions (test harness only)
};

/// Runs every acceptance criterion, printing one pass/fail line per check.
AcceptanceReport run_acceptance(const LabConfig& cfg, const AcceptanceOptions& opt);

}  // namespace lab
