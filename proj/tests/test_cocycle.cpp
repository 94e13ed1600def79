#include "doctest.h"

#include "qplab/cocycle.hpp"

#include <cmath>
#include <random>

using namespace qplab;
using namespace qplab::cocycle;

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

Real golden_omega(Bits bits = 128) { return cf::cf_value(cf::Frequency::golden(8, bits), 0); }

double dist(const Mat2C& x, const Mat2C& y) { return (x - y).frobenius().to_double(); }

Mat2C represented(const ScaledProduct& p) {
    Mat2C m = p.matrix;
    m.scale2(static_cast<long>(p.exponent));
    return m;
}

}  // namespace

TEST_CASE("transfer matrices") {
    CocycleKind model = CocycleKind::model(Real(2L, 128), golden_omega());
    Mat2C m0 = transfer_matrix(model, Real(0L, 128), 128);
    CHECK(m0.a.is_zero());
    CHECK(m0.b.re == -1L);
    CHECK(m0.c.re == 1L);
    CHECK(m0.d.is_zero());

    CocycleKind amo = CocycleKind::amo(Real(2L, 128), golden_omega(), Real(0L, 128));
    Mat2C a0 = transfer_matrix(amo, Real(0L, 128), 128);
    CHECK(a0.a.re == -4L);
    CHECK(a0.a.im.is_zero());

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    CocycleKind gauge = CocycleKind::renorm_gauge(Real(2L, 128), golden_omega());
    for (int i = 0; i < 20; ++i) {
        Real x(u(rng), 128);
        for (const auto& k : {model, amo, gauge}) {
            Mat2C m = transfer_matrix(k, x, 128);
            CHECK((m.det() - Complex(1.0, 0.0, 128)).abs() < 1e-36);
        }
        Mat2C g = transfer_matrix(gauge, x, 128);
        CHECK(dist(transfer_matrix(gauge, x + 1L, 128), -g) < 1e-35);
        // companion form: only the potential flips, so M(x+1) = -D M(x) D with D = diag(1, -1)
        Mat2C m = transfer_matrix(model, x, 128);
        Mat2C m1 = transfer_matrix(model, x + 1L, 128);
        CHECK((m1.a + m.a).abs() < 1e-35);
        CHECK(m1.b.re == m.b.re);
        CHECK(m1.c.re == m.c.re);
    }
}

TEST_CASE("single factor products") {
    CocycleKind model = CocycleKind::model(Real(2L, 128), golden_omega());
    Real theta(0.3, 128);
    ScaledProduct p = cocycle_product(model, theta, 1, Direction::Forward);
    CHECK(p.factor_count == 1);
    CHECK(dist(represented(p), transfer_matrix(model, theta, 128)) < 1e-35);
    CHECK(p.exponent == 0);
}

TEST_CASE("forward times backward over the same sites is the identity") {
    CocycleKind model = CocycleKind::model(Real(2L, 128), golden_omega());
    Real theta(0.3, 128);
    // the check loses about 2 gamma n nats to cancellation, so n stays small
    const std::int64_t n = 30;
    ScaledProduct fwd = cocycle_product(model, theta, n, Direction::Forward);
    // M^{-1}(theta') ... over sites theta' + j omega with theta' = theta + n omega
    ScaledProduct back = cocycle_product(model, theta + golden_omega() * n, n, Direction::Backward);
    ScaledProduct id = compose(back, fwd);
    Mat2C m = represented(id);
    CHECK(dist(m, Mat2C::identity(128)) < 1e-15);
}

TEST_CASE("Lyapunov exponent of the model at lambda = 2") {
    CocycleKind model = CocycleKind::model(Real(2L, 128), golden_omega());
    LyapunovEstimate e = lyapunov_estimate(model, Real(0.3, 128), {100, 1000, 10000}, Direction::Forward);
    for (const auto& v : e.values) CHECK(v >= 0L);
    CHECK(e.values.back() > 0.5);
    CHECK(e.values.back() < 0.9);
    CHECK(code_of([&] { lyapunov_estimate(model, Real(0.3, 128), {10, 5}, Direction::Forward); })
          == ErrorCode::DomainError);
}

TEST_CASE("trace examples") {
    CocycleKind model = CocycleKind::model(Real(5L, 128), golden_omega());
    SolutionTrace t = solve_trace(model, Real(0.2, 128), Complex(1.0, 0.0, 128), Complex(128), -5, 60);
    CHECK(t.phi_log_at(0) == doctest::Approx(0.0));
    CHECK(trace_residual(t, model, Real(0.2, 128)) < 1e-30);
    // theta = 0 puts a zero of the potential at n = 0, so psi(1) = -psi(-1)
    Real theta(0L, 128);
    SolutionTrace z = solve_trace(model, theta, Complex(0.7, 0.1, 128), Complex(0.3, -0.2, 128), -2, 5);
    CHECK(z.scale_at(-1) == z.scale_at(1));
    CHECK((z.psi_at(-1) + z.psi_at(1)).is_zero());
}

TEST_CASE("growth profile fits") {
    std::vector<double> line;
    for (int i = 0; i < 30; ++i) line.push_back(0.5 * i + 1);
    GrowthProfile a = growth_profile(line, 0);
    CHECK_FALSE(a.turning_detected);
    CHECK(a.rise_slope == doctest::Approx(0.5));
    CHECK(a.fall_slope == doctest::Approx(0.5));

    std::vector<double> tent;
    for (int n = 0; n <= 40; ++n) tent.push_back(-std::abs(n - 20) * 0.3);
    GrowthProfile b = growth_profile(tent, 0);
    CHECK(b.peak_index == 20);
    CHECK(b.rise_slope == doctest::Approx(0.3));
    CHECK(b.fall_slope == doctest::Approx(-0.3));
    CHECK(b.turning_detected);

    CHECK(code_of([] { growth_profile(std::vector<double>(10, 0.0), 0); }) == ErrorCode::TraceTooShort);
}

TEST_CASE("growth then decay on the right-decaying solution") {
    cf::Frequency g = cf::Frequency::golden(16, 128);
    Real omega = cf::cf_value(g, 0);
    CocycleKind model = CocycleKind::model(Real(5L, 128), omega);
    Real theta = frac(Real(5L, 128) - omega * 8L);
    SolutionTrace w = weyl_trace(model, theta, 0, 61);
    GrowthProfile p = growth_profile(w);
    CHECK(p.turning_detected);
    CHECK(p.peak_index >= 4);
    CHECK(p.peak_index <= 20);
    SolutionTrace h = weyl_trace(model, Real(0.5, 128), 0, 61);
    CHECK_FALSE(growth_profile(h).turning_detected);
    CHECK(trace_residual(w, model, theta) < 1e-25);
}

TEST_CASE("Gordon check") {
    cf::Frequency f(std::vector<BigInt>{30, 7}, 256);
    cf::ConvergentTable t = cf::convergents(f, 2);
    Real omega = cf::cf_value(f, 0, 128);
    CocycleKind amo = CocycleKind::amo(Real::parse("1.2", 128), omega, Real(0L, 128));
    auto reps = gordon_check(amo, Real(0.3, 128), t, {1, 2});
    REQUIRE(reps.size() == 2);
    for (const auto& r : reps) {
        REQUIRE(r.entries.size() == 2);
        CHECK(r.entries[1].q == 211);
        CHECK(r.entries[0].ratio > 0);
    }
    GordonOptions small;
    small.max_sites = 100;
    CHECK(code_of([&] { gordon_check(amo, Real(0.3, 128), t, {2}, small); }) == ErrorCode::HorizonTooLarge);

    cf::Frequency golden = cf::Frequency::golden(8, 128);
    auto tiny = gordon_check(amo, Real(0.3, 128), cf::convergents(golden, 2), {1});
    CHECK(tiny[0].entries[0].q == 1);
}

// ---- properties -------------------------------------------------------------------------

TEST_CASE("property: unimodular products") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CocycleKind model = CocycleKind::model(Real(2L, 128), golden_omega());
    for (std::int64_t n : {10, 1000, 20000}) {
        ScaledProduct p = cocycle_product(model, Real(u(rng), 128), n, Direction::Forward);
        // det(matrix) 4^exponent = 1, measured against the scale |matrix|^2 the
        // determinant is computed at
        Real target = pow2(-2 * static_cast<long>(p.exponent), 128);
        Real err = (p.matrix.det() - Complex(target, Real(128))).abs();
        Real scale = p.matrix.norm() * p.matrix.norm();
        CHECK(err <= pow2(-64, 64) * scale);
    }
}

TEST_CASE("property: rescaling window does not change the estimate") {
    CocycleKind model = CocycleKind::model(Real(2L, 128), golden_omega());
    ProductOptions coarse, fine;
    fine.window = 4;
    for (double th : {0.1, 0.37, 0.8}) {
        auto a = lyapunov_estimate(model, Real(th, 128), {5000}, Direction::Forward, coarse);
        auto b = lyapunov_estimate(model, Real(th, 128), {5000}, Direction::Forward, fine);
        CHECK(abs(a.values[0] - b.values[0]).to_double() <= std::ldexp(1.0, -64));
    }
}

TEST_CASE("property: cocycle consistency over split points") {
    std::mt19937_64 rng(3);
    CocycleKind amo = CocycleKind::amo(Real(2L, 128), golden_omega(), Real(0.4, 128));
    for (int i = 0; i < 5; ++i) {
        Real theta(std::uniform_real_distribution<double>(0, 1)(rng), 128);
        std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 300), m = 1 + static_cast<std::int64_t>(rng() % 300);
        ScaledProduct whole = cocycle_segment(amo, theta, 0, n + m);
        ScaledProduct first = cocycle_segment(amo, theta, 0, n);
        ScaledProduct last = cocycle_segment(amo, theta, n, m);
        ScaledProduct both = compose(last, first);
        // rescaling happens at different steps, so compare the represented products
        Mat2C w = whole.matrix;
        w.scale2(static_cast<long>(whole.exponent - both.exponent));
        CHECK(dist(w, both.matrix) <= 1e-25 * both.matrix.norm().to_double());
    }
}

TEST_CASE("property: trace matches the forward product") {
    std::mt19937_64 rng(4);
    CocycleKind model = CocycleKind::model(Real(3L, 128), golden_omega());
    Real theta(0.271, 128);
    Complex psi0(0.4, 0.2, 128), psi1(-0.3, 0.9, 128);
    SolutionTrace tr = solve_trace(model, theta, psi0, psi1, 0, 400);
    for (int i = 0; i < 20; ++i) {
        std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 399);
        // (psi(n+1), psi(n)) = M(x_n) ... M(x_1) (psi(1), psi(0))
        ScaledProduct p = cocycle_segment(model, theta, 1, n);
        Complex top = p.matrix.a * psi1 + p.matrix.b * psi0;
        Real ref = log(top.abs()) + p.log_scale();
        CHECK(std::abs(ref.to_double() - tr.log_abs_psi(n + 1)) < 1e-12 * (1 + std::abs(ref.to_double())));
    }
}

TEST_CASE("property: gamma_n is non-negative") {
    std::mt19937_64 rng(5);
    CocycleKind amo = CocycleKind::amo(Real(0.7, 128), golden_omega(), Real(0.2, 128));
    for (int i = 0; i < 10; ++i) {
        Real theta(std::uniform_real_distribution<double>(0, 1)(rng), 128);
        auto e = lyapunov_estimate(amo, theta, {1, 7, 50, 400}, i % 2 ? Direction::Backward : Direction::Forward);
        for (const auto& v : e.values) CHECK(v >= 0L);
    }
}
