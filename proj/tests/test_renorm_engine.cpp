#include "doctest.h"

#include "qplab/renorm_engine.hpp"

#include <chrono>
#include <cmath>
#include <random>

using namespace qplab;
using namespace qplab::renorm;
using cocycle::transfer_matrix;

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

const cf::Frequency& golden() {
    static const cf::Frequency g = cf::Frequency::golden(40, 256);
    return g;
}

Real omega(Bits bits = 128) { return cf::cf_value(golden(), 0, bits); }

double dist(const Mat2C& x, const Mat2C& y) { return (x - y).frobenius().to_double(); }

}  // namespace

TEST_CASE("fundamental solution examples") {
    FundamentalSolution f(Real(2L, 128), omega());
    CHECK(dist(fundamental_at(f, Real(0.3, 128)), Mat2C::identity(128)) == 0);
    CHECK(dist(fundamental_at(f, Real(0L, 128)), Mat2C::identity(128)) == 0);
    // s in [omega, 2 omega): one factor M(s - omega)
    Real s = omega() + Real(0.1, 128);
    CHECK(factor_count(f, s) == 1);
    CHECK(dist(fundamental_at(f, s), transfer_matrix(f.gauge, s - omega(), 128)) < 1e-35);
    // s = 1: floor(1/omega) = 1
    CHECK(factor_count(f, Real(1L, 128)) == 1);
    CHECK(dist(fundamental_at(f, Real(1L, 128)), transfer_matrix(f.gauge, 1L - omega(), 128)) < 1e-35);
    CHECK(code_of([&] { fundamental_at(f, Real(-0.1, 128)); }) == ErrorCode::DomainError);
}

TEST_CASE("fundamental solution invariants") {
    FundamentalSolution f(Real(2L, 128), omega());
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int i = 0; i < 40; ++i) {
        Real s(u(rng), 128);
        Mat2C p = fundamental_at(f, s);
        Mat2C q = fundamental_at(f, s + omega());
        CHECK(dist(q, transfer_matrix(f.gauge, s, 128) * p) <= 1e-30 * q.norm().to_double());
        CHECK((p.det() - Complex(1.0, 0.0, 128)).abs() < 1e-30);
    }
}

TEST_CASE("monodromy examples") {
    FundamentalSolution f(Real(2L, 128), omega());
    for (double x : {0.0, 0.2, 0.38, 0.39, 0.75}) {
        Real xr(x, 128);
        // x in [0,1): M_1^t(x) = Psi(omega x + 1), floor(x + 1/omega) factors
        Real s = omega() * xr + 1L;
        Mat2C m = monodromy_at(f, xr);
        CHECK(dist(m.transpose(), fundamental_at(f, s)) < 1e-30);
        long factors = floor_to_int(xr + 1L / omega()).get_si();
        CHECK(factor_count(f, s) == factors);
        CHECK((factors == 1 || factors == 2));
    }
}

TEST_CASE("renormalization identity examples") {
    Real lam(2L, 128);
    // k = 1, theta + omega < 1: empty bracket, RHS = M(theta)
    RenormResidual r1 = renorm_residual(lam, omega(), Real(0.2, 128), 1);
    CHECK(r1.k1 == 0);
    CHECK(r1.residual < 1e-30);
    CHECK(r1.sign == 1);

    RenormResidual r50 = renorm_residual(lam, omega(), Real(0.3, 128), 50);
    CHECK(r50.k1 == 31);
    CHECK(r50.residual <= 1e-10);
    CHECK(std::abs(r50.lhs_log_norm - r50.rhs_log_norm) < 1e-8);

    // theta + k omega crosses an integer for k = 2 at theta = 0.8
    RenormResidual wrap = renorm_residual(lam, omega(), Real(0.8, 128), 2);
    CHECK(wrap.k1 == 2);
    CHECK(wrap.residual <= 1e-10);
    CHECK(code_of([&] { renorm_residual(lam, omega(), Real(1.0, 128), 3); }) == ErrorCode::NotInUnitInterval);
}

TEST_CASE("cascade examples") {
    Real lam(2L, 256);
    Cascade c = cascade(golden(), lam, Real(0.3, 256), 10, 12);
    REQUIRE(c.levels.size() == 13);
    CHECK(c.levels[1].k == 6);
    CHECK(std::abs(c.levels[1].theta.to_double() - 0.485410196624968) < 1e-14);
    REQUIRE(c.first_short_level);
    CHECK(c.levels[*c.first_short_level].k <= 1);
    CHECK(std::abs(c.levels[3].log_lambda.to_double() - 2.93621857526425) < 1e-12);
    CHECK(code_of([&] { cascade(golden(), lam, Real(0.3, 256), 10, 40); }) == ErrorCode::InsufficientDepth);
}

TEST_CASE("leading solution on [0, 1 + omega]") {
    Real step = pow2(-8, 64);
    Phi0Report r = phi0_leading(Real(4L, 128), omega(), Real(0L, 128), 1L + omega(), step);
    CHECK(r.samples.front().status == SampleStatus::Pole);
    // phi = 1 on the window [1, 1 + omega)
    for (const auto& s : r.samples)
        if (s.s >= 1L) CHECK(s.log_phi == 0.0);
    // zero-free, finite on (0, 1 + omega)
    for (std::size_t i = 1; i < r.samples.size(); ++i) CHECK(r.samples[i].status == SampleStatus::Finite);
    CHECK(r.zeros.size() <= 1);
}

TEST_CASE("leading solution zeros") {
    Real step = pow2(-10, 64);
    Phi0Report r = phi0_leading(Real(4L, 128), omega(), Real(1L, 128), Real(3L, 128), step);
    // first zero reached going right: 1 + omega
    REQUIRE(!r.zeros.empty());
    CHECK(r.zeros.front().k == 1);
    CHECK(r.zeros.front().l == 1);
    for (const auto& z : r.zeros) {
        CHECK(z.k >= 1);
        CHECK(z.l >= 1);
        CHECK(abs(z.s - z.sample).to_double() <= step.to_double() / 2);
    }
    // per-step additivity: log phi(s + omega) - log phi(s) = step_log(s)
    Phi0Report a = phi0_leading(Real(4L, 128), omega(), Real(1.4, 128), Real(1.4, 128), step);
    Phi0Report b = phi0_leading(Real(4L, 128), omega(), Real(1.4, 128) + omega(), Real(1.4, 128) + omega(), step);
    CHECK(b.samples[0].log_phi - a.samples[0].log_phi == doctest::Approx(a.samples[0].step_log).epsilon(1e-12));

    // lambda = 1 with |2 sin(pi s)| < 1: the step decreases log phi
    Phi0Report c = phi0_leading(Real(1L, 128), omega(), Real(1.05, 128), Real(1.05, 128), step);
    CHECK(c.samples[0].step_log < 0);
}

// ---- properties -------------------------------------------------------------------

TEST_CASE("property: monodromy antiperiodicity and unimodularity") {
    FundamentalSolution f(Real(2L, 128), omega());
    for (int i = 0; i < 64; ++i) {
        Real x = Real(i, 128) / 64L + pow2(-9, 128);
        Mat2C m0 = monodromy_at(f, x);
        Mat2C m1 = monodromy_at(f, x + 1L);
        CHECK((m0 + m1).frobenius().to_double() <= m0.frobenius().to_double() * 1e-10);
        CHECK((m0.det() - Complex(1.0, 0.0, 128)).abs() <= 1e-12);
    }
}

TEST_CASE("property: renormalization identity over k <= 100") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Real lam(2L, 128);
    // golden and one random high-entropy frequency
    cf::Frequency other = cf::random_uniform_frequency(23, 40, 256);
    std::vector<Real> omegas{omega(), cf::cf_value(other, 0, 128)};
    double worst = 0;
    for (const auto& w : omegas)
        for (int i = 0; i < 3; ++i) {
            Real theta(u(rng), 128);
            for (std::int64_t k = 1; k <= 100; k += 9) worst = std::max(worst, renorm_residual(lam, w, theta, k).residual);
        }
    CHECK(worst <= 1e-10);
}

TEST_CASE("property: cascade matches the continued-fraction tails") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 6; ++trial) {
        cf::Frequency f = trial == 0 ? golden() : cf::random_bounded_frequency(rng(), 30, 20, 256);
        Real theta(std::uniform_real_distribution<double>(0, 1)(rng), 256);
        std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 5000);
        Cascade c = cascade(f, Real(2L, 256), theta, k, 20);
        for (std::size_t j = 0; j + 1 < c.levels.size(); ++j) {
            const auto& a = c.levels[j];
            const auto& b = c.levels[j + 1];
            CHECK(abs(a.omega_gauss - a.omega) <= a.omega_radius + pow2(-250, 64));
            // k_{j+1} <= k_j omega_j + 1
            CHECK(Real(b.k, 256) <= Real(a.k, 256) * a.omega + 1L);
        }
        REQUIRE(c.first_short_level);
        CHECK(*c.first_short_level <= 2 + static_cast<std::size_t>(6 * std::log2(static_cast<double>(k) + 1)));
    }
}

TEST_CASE("property: zero count matches the lattice count") {
    for (long K : {2L, 4L}) {
        Phi0Report r = phi0_leading(Real(3L, 128), omega(), Real(0L, 128), Real(K, 128), pow2(-10, 64));
        CHECK(r.zeros.size() == lattice_zero_count(golden(), K));
    }
    CHECK(lattice_zero_count(golden(), 4) == 8);
    CHECK(lattice_zero_count(golden(), 7) == 31);
}
