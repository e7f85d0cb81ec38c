// Acceptance gate: runs every criterion at full scale and prints one
// pass/fail line per check.  Exit code 0 only when everything passes.

#include <cstdlib>

#include "lab/accept.hpp"

int main() {
    lab::LabConfig cfg = lab::LabConfig::defaults();
    lab::AcceptanceOptions opt;
    opt.budget_minutes = 75.0;
    opt.seed = 1;
    if (const char* env = std::getenv("LAB_ACCEPT_BUDGET_MIN"))
        opt.budget_minutes = std::atof(env);
    if (const char* env = std::getenv("LAB_ACCEPT_QUICK"))
        opt.quick = std::atoi(env) != 0;
    auto rep = lab::run_acceptance(cfg, opt);
    if (rep.partial) return 2;
    return rep.all_pass() ? 0 : 1;
}
