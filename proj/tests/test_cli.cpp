#include "doctest.h"

#include "qplab/cli.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace qplab;
using namespace qplab::cli;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ValueError;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config defaults") {
    RunConfig c = parse_config(R"({"omega":{"cf":[1,1,1]},"lambda":2.0})");
    CHECK(c.omega.kind == FrequencySpec::Kind::Cf);
    CHECK(c.omega.elements.size() == 3);
    CHECK(c.lambda == "2");
    CHECK(c.precision_bits == 128);
    CHECK(c.cf_precision_bits == 256);
    CHECK(c.schedule == "half");
    CHECK(c.seed == 0);
    cf::Frequency f = build_frequency(c);
    CHECK(f.depth() == 3);
    CHECK(f.precision_bits() == 256);
}

TEST_CASE("config errors") {
    CHECK(code_of([] { parse_config(R"({"omega":{"decimal":"0.3"},"lambda":2.0})"); }) == ErrorCode::RationalInput);
    CHECK(code_of([] { parse_config(R"({"omega":{"cf":[1,1]},"lambda":0.5})"); }) == ErrorCode::ValueError);
    CHECK(message_of([] { parse_config(R"({"omega":{"cf":[1,1]},"lambda":0.5})"); }).find("lambda must exceed 1") !=
          std::string::npos);
    CHECK(code_of([] { parse_config(R"({"omega":{"cf":[1,1]},"lambda":2,"theta":1.5})"); }) == ErrorCode::ValueError);
    CHECK(code_of([] { parse_config(R"({"omega":{"cf":[1,1]},"lambda":2,"theta":-0.1})"); }) == ErrorCode::ValueError);
    // field paths in schema errors
    std::string m = message_of([] { parse_config(R"({"omega":{"cf":[1,"x"]},"lambda":2})"); });
    CHECK(m.find("omega.cf[1]") != std::string::npos);
    CHECK(code_of([] { parse_config(R"({"omega":{"cf":[1,0]},"lambda":2})"); }) == ErrorCode::SchemaError);
    m = message_of([] { parse_config(R"({"omega":{"cf":[1]},"lambda":2,"trace":{"weyl":1}})"); });
    CHECK(m.find("trace.weyl") != std::string::npos);
    CHECK(code_of([] { parse_config(R"({"omega":{"cf":[1]},"lambda":2,"extra":1})"); }) == ErrorCode::SchemaError);
    CHECK(code_of([] { parse_config(R"({"lambda":2})"); }) == ErrorCode::SchemaError);
    CHECK(code_of([] { parse_config(R"({"omega":{"cf":[1]},)"); }) == ErrorCode::SchemaError);
    CHECK(code_of([] { parse_config(R"({"omega":{"cf":[1]},"lambda":2,"schedule":"weird"})"); }) ==
          ErrorCode::ValueError);
    // (1, 1): 1 + omega is outside [0, 1]
    CHECK(code_of([] { parse_config(R"({"omega":{"cf":[1,1,1,1]},"lambda":2,"theta":{"lattice":{"k":1,"l":1}}})"); }) ==
          ErrorCode::ValueError);
}

TEST_CASE("frequency recipes") {
    RunConfig c = parse_config(R"({"omega":{"liouville":{"lambda":"1.2","a1":30,"levels":3}},"lambda":"1.2"})");
    cf::Frequency f = build_frequency(c);
    REQUIRE(f.depth() == 3);
    CHECK(f.element(2) == 7);
    CHECK(f.element(3) == BigInt("202228506850620"));

    RunConfig d = parse_config(R"({"omega":{"decimal":"0.41421356237309504880168872420969807856967","depth":20},"lambda":3})");
    cf::Frequency g = build_frequency(d);
    CHECK(g.element(1) == 2);
    CHECK(g.element(20) == 2);

    // big elements as strings stay exact
    RunConfig e = parse_config(R"({"omega":{"cf":["123456789012345678901234567890",1]},"lambda":2})");
    CHECK(build_frequency(e).element(1) == BigInt("123456789012345678901234567890"));
}

TEST_CASE("theta specs") {
    RunConfig c = parse_config(R"({"omega":{"cf":[1,1,1,1,1,1]},"lambda":2,"theta":{"grid":{"lo":"0","hi":"1","count":5}}})");
    auto t = theta_values(c, build_frequency(c));
    REQUIRE(t.size() == 5);
    CHECK(t[2].value == 0.5);
    CHECK(t[4].value == 1L);
    RunConfig l = parse_config(R"({"omega":{"cf":[1,1,1,1,1,1]},"lambda":2,"theta":{"lattice":{"k":1,"l":-1}}})");
    auto tl = theta_values(l, build_frequency(l));
    REQUIRE(tl.size() == 1);
    REQUIRE(tl[0].lattice);
    CHECK(std::abs(tl[0].value.to_double() - 0.381966011250105) < 1e-14);
}

TEST_CASE("property: configs round-trip through serialization") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        RunConfig c = default_config();
        std::size_t n = 1 + rng() % 12;
        c.omega.elements.clear();
        for (std::size_t i = 0; i < n; ++i) c.omega.elements.push_back(BigInt(static_cast<long>(1 + rng() % 40)));
        if (rng() % 3 == 0) c.omega.elements.push_back(BigInt("98765432109876543210987654321"));
        if (rng() % 2) c.omega.closure = {BigInt(2), BigInt(static_cast<long>(1 + rng() % 5))};
        c.lambda = std::to_string(2 + rng() % 9) + "." + std::to_string(rng() % 1000);
        switch (rng() % 3) {
            case 0: c.theta.kind = ThetaSpec::Kind::Single; c.theta.value = "0." + std::to_string(rng() % 100000); break;
            case 1:
                c.theta.kind = ThetaSpec::Kind::Grid;
                c.theta.lo = "0.125";
                c.theta.hi = "0.75";
                c.theta.count = 1 + rng() % 50;
                break;
            default:
                c.theta.kind = ThetaSpec::Kind::Lattice;
                c.theta.k = 0;
                c.theta.l = 0;
        }
        c.precision_bits = 64 + static_cast<Bits>(rng() % 512);
        c.seed = rng();
        c.horizons = {10, 100 + static_cast<std::int64_t>(rng() % 100)};
        c.kind = rng() % 2 ? "amo" : "model";
        c.energy = "-0.25";
        c.weyl = rng() % 2;
        c.m_list = {1, 2, 3};
        c.liouville_c = 0.05 * static_cast<double>(1 + rng() % 9);
        c.format = rng() % 2 ? "json" : "csv";
        c.out_dir = "out/" + std::to_string(trial);
        std::string text = to_json(c).dump();
        RunConfig back = parse_config(text);
        CHECK(back == c);
        CHECK(to_json(back).dump() == text);
    }
}

TEST_CASE("csv and json emission") {
    Table t{{"name", "x", "n"}, {{text("a,b"), num(0.1, 17), integer(3)}, {text("q\"t"), num(1e-300, 5), big(BigInt(7))}}};
    CHECK(to_csv(t) == "name,x,n\n\"a,b\",0.10000000000000001,3\n\"q\"\"t\",1e-300,7\n");
    json j = table_json(t);
    CHECK(j[0]["n"] == 3);
    CHECK(j[1]["n"] == "7");
    CHECK(format_double(0.5, 3) == "0.5");
    CHECK(format_real(Real(1L, 128) / 3L, 25) == "0.3333333333333333333333333");
}

TEST_CASE("commands produce rows") {
    RunConfig c = default_config();
    c.theta.kind = ThetaSpec::Kind::Grid;
    c.theta.lo = "0.1";
    c.theta.hi = "0.9";
    c.theta.count = 3;
    c.horizons = {50, 100};
    c.k_max = 5;
    c.trace_max = 30;
    c.badset_levels = {4, 6};
    for (const auto& name : command_names()) {
        CAPTURE(name);
        Artifact a = run_command(name, c);
        CHECK(a.name == name);
        CHECK(!a.table.rows.empty());
        for (const auto& r : a.table.rows) CHECK(r.size() == a.table.columns.size());
    }
    // rows come out sorted by theta
    Artifact l = run_command("lyap", c);
    CHECK(l.table.rows.front()[0].text < l.table.rows.back()[0].text);
    CHECK(code_of([&] { run_command("nope", c); }) == ErrorCode::ValueError);
}

TEST_CASE("suite selection") {
    auto dir = std::filesystem::temp_directory_path() / "qplab_test_cli_suite";
    std::filesystem::remove_all(dir);
    SuiteReport r = run_suite(default_config(), {"beta_identity"}, dir);
    REQUIRE(r.results.size() == 1);
    CHECK(r.results[0].passed);
    CHECK(r.results[0].runtime_seconds < 1.0);
    CHECK(r.passed());
    CHECK(std::filesystem::exists(dir / "beta_identity.csv"));
    CHECK(std::filesystem::exists(dir / "suite_report.json"));
    CHECK(code_of([] { run_suite(default_config(), {"unknown"}); }) == ErrorCode::CriterionUnknown);
    CHECK(criterion_names().size() >= 10);

    SuiteReport fake;
    fake.results.push_back({1, "a", true, 0, 0, "", 0, 0});
    CHECK(fake.passed());
    fake.results.push_back({2, "b", false, 0, 0, "", 0, 0});
    CHECK_FALSE(fake.passed());
}

TEST_CASE("suite outputs are byte-identical across runs") {
    auto a = std::filesystem::temp_directory_path() / "qplab_det_a";
    auto b = std::filesystem::temp_directory_path() / "qplab_det_b";
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
    std::vector<std::string> sel{"beta_identity", "liouville_construction", "growth_decay", "gordon_humps"};
    SuiteReport ra = run_suite(default_config(), sel, a);
    SuiteReport rb = run_suite(default_config(), sel, b);
    CHECK(ra.to_json().dump() == rb.to_json().dump());
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
        CAPTURE(entry.path().string());
        CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
}
