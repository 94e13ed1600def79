#include "qplab/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace qplab;
using namespace qplab::cli;

constexpr int kOk = 0, kFailed = 1, kUsage = 2, kPrecision = 3;

struct Flags {
    std::string config;
    std::optional<long> precision_bits;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
};

void add_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--precision-bits", f.precision_bits, "working precision for products and phases (bits)");
    sub->add_option("--seed", f.seed, "seed for all sampling");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

RunConfig load(const Flags& f) {
    RunConfig c = default_config();
    if (!f.config.empty()) {
        std::ifstream in(f.config, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        c = parse_config(ss.str());
    }
    if (f.precision_bits) {
        c.precision_bits = *f.precision_bits;
    } else if (const char* env = std::getenv("QPLAB_PRECISION_BITS"); env && f.config.empty()) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v <= 0) fail(ErrorCode::ValueError, "QPLAB_PRECISION_BITS must be a positive integer");
        c.precision_bits = v;
    }
    if (f.seed) c.seed = *f.seed;
    if (!f.out.empty()) c.out_dir = f.out;
    if (!f.format.empty()) c.format = f.format;
    // re-validate after overrides
    return parse_config(to_json(c).dump());
}

int emit(const Artifact& a, const RunConfig& c) {
    if (c.out_dir.empty()) {
        std::cout << render(a, c.format);
    } else {
        std::cout << write_artifact(a, c.out_dir, c.format).string() << "\n";
    }
    return kOk;
}

int suite(const RunConfig& c, const std::vector<std::string>& selection) {
    SuiteReport r = run_suite(c, selection, c.out_dir);
    for (const auto& x : r.results) {
        std::printf("%2d %-24s %s  measured=%s threshold=%s  %.2fs%s  %s\n", x.index, x.name.c_str(),
                    x.passed ? "PASS" : "FAIL", format_double(x.measured, 6).c_str(),
                    format_double(x.threshold, 6).c_str(), x.runtime_seconds,
                    x.runtime_budget > 0 && x.runtime_seconds > x.runtime_budget ? " (over budget)" : "",
                    x.detail.c_str());
    }
    return r.passed() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-periodic cocycle lab"};
    app.require_subcommand(1);
    Flags flags;
    std::vector<std::string> selection;
    std::string chosen;

    for (const auto& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        add_flags(sub, flags);
        sub->callback([&chosen, name] { chosen = name; });
    }
    CLI::App* s = app.add_subcommand("suite", "run the acceptance criteria");
    add_flags(s, flags);
    s->add_option("criteria", selection, "criteria to run (all when omitted)");
    s->callback([&chosen] { chosen = "suite"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        RunConfig c = load(flags);
        if (chosen == "suite") return suite(c, selection);
        return emit(run_command(chosen, c), c);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == ErrorCode::PrecisionExhausted ? kPrecision : kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}
