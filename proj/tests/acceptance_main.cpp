// One line per acceptance criterion: id, verdict, wall time against budget, metrics.

#include <cmath>
#include <cstdio>
#include <string>

#include "magflow/acceptance.hpp"

int main() {
    using namespace magflow;
    const AcceptanceConfig cfg;
    const auto group = bolza_group();
    const auto report = run_acceptance(group, cfg, to_json(cfg));
    bool all = true;
    for (const auto& c : report.checks) {
        const bool in_time = c.seconds < c.budget_seconds;
        const bool pass = c.pass && in_time;
        all = all && pass;
        const std::string budget =
            std::isinf(c.budget_seconds) ? "no budget" : "budget " + magflow::format_double(c.budget_seconds) + "s";
        std::printf("[%s] criterion %d %-26s %8.2fs (%s) %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    c.seconds, budget.c_str(), c.metrics.dump().c_str());
    }
    std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
    return all ? 0 : 1;
}
