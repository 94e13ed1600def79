#include "doctest.h"

#include "qplab/cf_core.hpp"

#include <cmath>
#include <random>

using namespace qplab;
using namespace qplab::cf;

namespace {

std::vector<BigInt> ints(std::initializer_list<long> xs) {
    std::vector<BigInt> v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

Real golden_value(Bits bits) { return (sqrt(Real(5L, bits)) - 1L) / 2L; }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ValueError;
}

}  // namespace

TEST_CASE("golden ratio expands to all ones") {
    Frequency f = cf_expand(golden_value(256), 20);
    CHECK(f.elements() == std::vector<BigInt>(20, BigInt(1)));
}

TEST_CASE("pi - 3 expansion") {
    Real x = pi(256) - 3L;
    Frequency f = cf_expand(x, 12);
    CHECK(f.elements() == ints({7, 15, 1, 292, 1, 1, 1, 2, 1, 3, 1, 14}));
}

TEST_CASE("rational inputs are detected") {
    CHECK(code_of([] { cf_expand(Real(0.5, 256), 3); }) == ErrorCode::RationalInput);
    CHECK(code_of([] { cf_expand_decimal("0.3", 8, 256); }) == ErrorCode::RationalInput);
    CHECK(code_of([] { cf_expand(Real(1.5, 64), 3); }) == ErrorCode::DomainError);
}

TEST_CASE("undecidable element raises PrecisionExhausted") {
    Real x = pi(24) - 3L;
    CHECK(code_of([&] { cf_expand(x, 12); }) == ErrorCode::PrecisionExhausted);
}

TEST_CASE("escalating expansion") {
    auto gen = [](Bits b) { return pi(b) - 3L; };
    Frequency f = cf_expand(gen, 30, 64);
    CHECK(f.depth() == 30);
    CHECK(f.element(4) == 292);
    CHECK(f.precision_bits() == 64);
}

TEST_CASE("decimal parsing") {
    CHECK(parse_decimal("0.25") == BigRat(1, 4));
    CHECK(parse_decimal("-1.5e-3") == BigRat(-3, 2000));
    CHECK(parse_decimal("12") == 12);
    CHECK(code_of([] { parse_decimal("1.2.3"); }) == ErrorCode::ValueError);
    CHECK(code_of([] { parse_decimal(""); }) == ErrorCode::ValueError);
}

TEST_CASE("tail values") {
    Frequency g = Frequency::golden(10);
    CHECK(std::abs(cf_value(g, 7).to_double() - 0.6180339887498949) < 1e-15);
    Frequency p3(ints({7, 15, 1, 292}), 256);
    CHECK(std::abs(cf_value(p3, 0).to_double() - 0.141592653574747) < 1e-14);
    Frequency silver = Frequency::periodic({}, ints({2}), 8);
    CHECK(std::abs(cf_value(silver, 3).to_double() - 0.414213562373095) < 1e-14);
    CHECK(code_of([&] { cf_value(g, 10); }) == ErrorCode::InsufficientDepth);
}

TEST_CASE("tail lies between 1/(a+1) and 1/a") {
    Frequency f(ints({3, 1, 7, 2, 9, 1}), 256);
    for (std::size_t L = 0; L < f.depth(); ++L) {
        Real w = cf_value(f, L);
        CHECK(w < 1L / Real(f.element(L + 1), 256));
        CHECK(w > 1L / (Real(f.element(L + 1), 256) + 1L));
    }
}

TEST_CASE("floor_times_tail agrees with high-precision evaluation") {
    std::mt19937_64 rng(11);
    Frequency f = random_bounded_frequency(3, 20, 50, 256);
    for (int i = 0; i < 200; ++i) {
        long k = static_cast<long>(rng() % 2000001) - 1000000;
        std::size_t L = rng() % 10;
        BigInt exact = floor_times_tail(f, L, BigInt(k));
        BigInt approx = floor_to_int(cf_value(f, L, 512) * k);
        CHECK(exact == approx);
    }
}

TEST_CASE("convergent tables") {
    Frequency g = Frequency::golden(12);
    ConvergentTable t = convergents(g, 4);
    REQUIRE(t.rows.size() == 5);
    std::vector<long> q{1, 1, 2, 3, 5}, p{0, 1, 1, 2, 3};
    for (std::size_t l = 0; l < 5; ++l) {
        CHECK(t.rows[l].q == q[l]);
        CHECK(t.rows[l].p == p[l]);
    }
    Frequency f(ints({30, 7}), 256);
    ConvergentTable t2 = convergents(f, 2);
    CHECK(t2.rows[1].q == 30);
    CHECK(t2.rows[2].q == 211);
    CHECK(convergent_violations(g, convergents(g, 10)).empty());
    CHECK(code_of([&] { convergents(f, 3); }) == ErrorCode::InsufficientDepth);
}

TEST_CASE("ladder values") {
    Frequency g = Frequency::golden(12);
    CouplingLadder lad = ladder(g, Real(2L, 256), 5);
    CHECK(std::abs(lad.log_lambda_levels[3].to_double() - 2.93621857526425) < 1e-12);
    CHECK(lad.log_lambda_levels[0] == log(Real(2L, 256)));
    CHECK(lad.beta_levels[0] == 1L);
    CHECK(code_of([&] { ladder(g, Real(1L, 256), 5); }) == ErrorCode::DomainError);
}

TEST_CASE("frequency classes") {
    Frequency g = Frequency::golden(24);
    FrequencyClassReport half = classify_frequency(g, Real(2L, 256), Schedule::half(), 20);
    CHECK(half.omega_trend_ok);
    CHECK(half.lambda_trend_ok);
    CHECK(half.levels.size() == 19);
    FrequencyClassReport m1 = classify_frequency(g, Real(2L, 256), Schedule::minus_one(), 20);
    CHECK_FALSE(m1.omega1_ok);
    auto bad = Schedule::custom("identity", [](long L) { return L; });
    CHECK(code_of([&] { classify_frequency(g, Real(2L, 256), bad, 10); }) == ErrorCode::ScheduleInvalid);
}

TEST_CASE("Liouville frequency classes") {
    LiouvilleBuild b = liouville_build(Real::parse("1.2", 512), BigInt(30), 3);
    FrequencyClassReport r = classify_frequency(b.freq, Real::parse("1.2", 512), Schedule::minus_one(), 3);
    REQUIRE(r.levels.size() == 2);
    // the shifted product log lambda_L + log omega_{L-1} + log omega_L grows
    CHECK(r.levels[1].shifted_growth_log > r.levels[0].shifted_growth_log);
    CHECK(r.levels[1].omega_L_log < r.levels[0].omega_L_log);
}

TEST_CASE("Khinchin mean") {
    CHECK(khinchin_mean(Frequency::golden(10), 7) == 1L);
    Frequency f(ints({2, 4}), 256);
    CHECK(std::abs(khinchin_mean(f, 2).to_double() - std::sqrt(8.0)) < 1e-14);
}

TEST_CASE("random uniform frequencies are reproducible") {
    Frequency a = random_uniform_frequency(5, 50, 256);
    Frequency b = random_uniform_frequency(5, 50, 256);
    CHECK(a == b);
    CHECK(a.depth() == 50);
    Frequency c = random_uniform_frequency(6, 50, 256);
    CHECK_FALSE(a == c);
}

TEST_CASE("Liouville construction") {
    Real lam = Real::parse("1.2", 1024);
    LiouvilleBuild b = liouville_build(lam, BigInt(30), 3);
    REQUIRE(b.freq.depth() == 3);
    CHECK(b.freq.element(2) == 7);
    CHECK(b.freq.element(3) == BigInt("202228506850620"));
    CHECK(code_of([] { liouville_build(Real::parse("1.05", 256), BigInt(10), 2); }) == ErrorCode::WindowEmpty);
    LiouvilleOptions tight;
    tight.max_element_bits = 20;
    CHECK(code_of([&] { liouville_build(lam, BigInt(30), 3, tight); }) == ErrorCode::OverflowPolicyExceeded);
}

TEST_CASE("Liouville verification") {
    Real lam = Real::parse("1.2", 1024);
    LiouvilleBuild b = liouville_build(lam, BigInt(30), 3);
    LiouvilleReport r = liouville_verify(b.freq, LiouvilleForm::lambda_form(lam, 0.1));
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[1].l == 2);
    CHECK(r.rows[1].c_max > 0);

    Frequency g = Frequency::golden(24);
    LiouvilleReport gr = liouville_verify(g, LiouvilleForm::lambda_form(Real(2L, 256), 0.1));
    for (const auto& row : gr.rows) CHECK(row.holds == (row.l <= 9));

    LiouvilleReport s = liouville_verify(g, LiouvilleForm::simon());
    CHECK(s.rows[0].holds);
}

// ---- properties ---------------------------------------------------------------------

TEST_CASE("property: consecutive tails multiply to at most 1/2") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 40; ++trial) {
        Frequency f = trial % 2 ? random_bounded_frequency(rng(), 25, 1 + static_cast<long>(rng() % 100), 256)
                                : random_uniform_frequency(rng(), 25, 256);
        for (std::size_t l = 0; l + 1 < f.depth(); ++l) CHECK(cf_value(f, l) * cf_value(f, l + 1) <= 0.5);
    }
}

TEST_CASE("property: expansion round trip") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t depth = 1 + rng() % 40;
        Frequency f = random_bounded_frequency(rng(), depth, 10000, 512);
        auto gen = [&](Bits b) { return cf_value(f, 0, b); };
        Frequency g = cf_expand(gen, depth, 512);
        CHECK(g.elements() == f.elements());
    }
}

TEST_CASE("property: beta identity") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 8; ++trial) {
        Frequency f = trial == 0 ? Frequency::golden(32) : random_bounded_frequency(rng(), 32, 10, 256);
        CouplingLadder lad = ladder(f, Real(2L, 256), 30);
        ConvergentTable t = convergents(f, 30);
        Real omega = cf_value(f, 0, 600);
        for (std::size_t L = 1; L <= 30; ++L) {
            const auto& row = t.rows[L - 1];
            Real rhs = abs(Real(row.q, 600) * omega - Real(row.p, 600));
            CHECK(abs(lad.beta_levels[L] - rhs) <= pow2(-248, 64) * 1L);
        }
    }
}

TEST_CASE("property: sandwich and error bounds on random tables") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        Frequency f = random_bounded_frequency(rng(), 30, 1 + static_cast<long>(rng() % 1000), 256);
        CHECK(convergent_violations(f, convergents(f, 29)).empty());
    }
}

TEST_CASE("property: ladder telescoping") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Frequency f = random_bounded_frequency(rng(), 30, 20, 256);
        CouplingLadder lad = ladder(f, Real(1.5 + trial, 256), 29);
        for (std::size_t L = 0; L + 1 <= 29; ++L) {
            Real lhs = lad.log_lambda_levels[L + 1] * cf_value(f, L);
            Real rel = abs(lhs - lad.log_lambda_levels[L]) / lad.log_lambda_levels[L];
            CHECK(rel <= pow2(-248, 64));
        }
    }
}
