// One line per acceptance criterion; non-zero exit when any fails or runs over
// its time budget.

#include "qplab/cli.hpp"

#include <cstdio>
#include <filesystem>

int main() {
    using namespace qplab::cli;
    RunConfig config = default_config();
    auto dir = std::filesystem::temp_directory_path() / "qplab_acceptance";
    std::filesystem::remove_all(dir);
    SuiteReport report;
    try {
        report = run_suite(config, {}, dir);
    } catch (const qplab::Error& e) {
        std::printf("suite aborted: %s\n", e.what());
        return 2;
    }
    int failures = 0;
    for (const auto& r : report.results) {
        bool over = r.runtime_budget > 0 && r.runtime_seconds > r.runtime_budget;
        bool ok = r.passed && !over;
        failures += !ok;
        char budget[32] = "";
        if (r.runtime_budget > 0) std::snprintf(budget, sizeof budget, " / %.0fs", r.runtime_budget);
        std::printf("[%s] %2d %-24s %.2fs%s%s  %s\n", ok ? "PASS" : "FAIL", r.index, r.name.c_str(),
                    r.runtime_seconds, budget, over ? " OVER BUDGET" : "", r.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(report.results.size()) - failures,
                report.results.size());
    return failures ? 1 : 0;
}
