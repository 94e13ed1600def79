#include "qplab/renorm_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace qplab::renorm {

namespace {

// Exact value of a dyadic rational.
Real exact(const BigRat& q) {
    const Bits b = std::max<Bits>(static_cast<Bits>(mpz_sizeinbase(q.get_num_mpz_t(), 2)), 2);
    Real r(b);
    mpfr_set_q(r.raw(), q.get_mpq_t(), MPFR_RNDN);
    return r;
}

BigInt floor_div(const BigRat& a, const BigRat& b) {
    BigRat q = a / b;
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

Mat2C adjugate(const Mat2C& m) { return Mat2C(m.d, -m.b, -m.c, m.a); }

Real ulp(const Real& x, Bits bits) { return pow2(x.exponent() - static_cast<long>(bits) + 1, 64); }

// floor(v) when every point of [v - rad, v + rad] has the same floor.
BigInt decided_floor(const Real& v, const Real& rad, const char* what) {
    BigInt lo = floor_to_int(v - rad), hi = floor_to_int(v + rad);
    if (lo != hi) fail(ErrorCode::PrecisionExhausted, std::string("floor of ") + what + " is undecidable");
    return lo;
}

void rebalance(Mat2C& m, std::int64_t& exponent) {
    const long e = m.max_exponent();
    if (e > 8 || e < -8) {
        m.scale2(-e);
        exponent += e;
    }
}

}  // namespace

FundamentalSolution::FundamentalSolution(const Real& lambda_, const Real& omega_, Bits bits_)
    : lambda(lambda_), omega(omega_), bits(bits_), gauge(cocycle::CocycleKind::renorm_gauge(lambda_, omega_)) {
    if (!(omega > 0L) || !(omega < 1L)) fail(ErrorCode::DomainError, "omega must lie in (0,1)");
}

BigInt factor_count(const FundamentalSolution& fund, const Real& s) {
    if (s.sign() < 0) fail(ErrorCode::DomainError, "fundamental solution is defined for s >= 0");
    return floor_div(s.to_rational(), fund.omega.to_rational());
}

Mat2C fundamental_at(const FundamentalSolution& fund, const Real& s) {
    const BigInt n = factor_count(fund, s);
    if (n > 10000000) fail(ErrorCode::HorizonTooLarge, "s/omega exceeds 10^7 factors");
    const BigRat w = fund.omega.to_rational();
    const BigRat s0 = s.to_rational() - BigRat(n) * w;
    Mat2C psi = Mat2C::identity(fund.bits);
    const long count = n.get_si();
    for (long j = 0; j < count; ++j) {
        Real x = exact(s0 + BigRat(j) * w);
        psi = cocycle::transfer_matrix(fund.gauge, x, fund.bits) * psi;
    }
    return psi;
}

Mat2C monodromy_at(const FundamentalSolution& fund, const Real& x) {
    if (x.sign() < 0) fail(ErrorCode::DomainError, "monodromy argument must be >= 0");
    const BigRat s = fund.omega.to_rational() * x.to_rational();
    Mat2C a = fundamental_at(fund, exact(s));
    Mat2C b = fundamental_at(fund, exact(s + 1));
    return (adjugate(a) * b).transpose();
}

namespace {

// One evaluation at working precision wp; cond_log2 collects log2 of the
// amplification bound prod |factor| / |result| of the right-hand side.
RenormResidual residual_at(const Real& lambda, const Real& omega, const Real& theta, std::int64_t k, Bits wp,
                           double& cond_log2) {
    FundamentalSolution fund(lambda, omega, wp);
    cocycle::ProductOptions opt;
    opt.bits = wp;
    cocycle::ScaledProduct lhs = cocycle::cocycle_product(fund.gauge, theta, k, cocycle::Direction::Forward, opt);

    RenormResidual out;
    out.k = k;
    const BigRat w = omega.to_rational();
    const BigRat end = theta.to_rational() + BigRat(k) * w;
    mpz_fdiv_q(out.k1.get_mpz_t(), end.get_num_mpz_t(), end.get_den_mpz_t());
    const Real t = exact(end - BigRat(out.k1));

    const Bits xp = wp + 64;
    out.omega1 = frac(1L / omega.at(xp));
    out.theta1 = frac(theta.at(xp) / omega.at(xp));

    // [M_1(theta_1 - omega_1) ... M_1(theta_1 - k_1 omega_1)], arguments reduced by antiperiodicity
    Mat2C bracket = Mat2C::identity(wp);
    std::int64_t bracket_exp = 0;
    int reduction = 1;
    double factor_log = 0;
    const long k1 = out.k1.get_si();
    for (long i = 1; i <= k1; ++i) {
        Real x = out.theta1 - out.omega1 * i;
        BigInt f = floor_to_int(x);
        Real xr = x - Real(f, xp);
        if (mpz_odd_p(f.get_mpz_t())) reduction = -reduction;
        Mat2C m1 = monodromy_at(fund, xr);
        factor_log += std::log(m1.norm().to_double());
        bracket = bracket * m1;
        rebalance(bracket, bracket_exp);
    }
    out.reduction_sign = reduction;

    Mat2C left = fundamental_at(fund, t), right = adjugate(fundamental_at(fund, theta));
    factor_log += std::log(left.norm().to_double()) + std::log(right.norm().to_double());
    Mat2C rhs = left * bracket.transpose() * right;
    if (reduction < 0) rhs = -rhs;
    const double rhs_log = (log(rhs.norm()) + log2_const(64) * bracket_exp).to_double();
    cond_log2 = std::max(0.0, (factor_log - rhs_log) / std::log(2.0));
    rhs.scale2(static_cast<long>(bracket_exp - lhs.exponent));

    const Real lnorm = lhs.matrix.frobenius();
    const Real plus = (lhs.matrix - rhs).frobenius() / lnorm;
    const Real minus = (lhs.matrix + rhs).frobenius() / lnorm;
    out.sign = plus <= minus ? 1 : -1;
    out.residual = (out.sign > 0 ? plus : minus).to_double();
    out.lhs_log_norm = lhs.log_norm().to_double();
    out.rhs_log_norm = rhs_log;
    out.working_bits = wp;
    out.condition_log2 = cond_log2;
    return out;
}

}  // namespace

RenormResidual renorm_residual(const Real& lambda, const Real& omega, const Real& theta, std::int64_t k, Bits bits) {
    if (k < 1) fail(ErrorCode::DomainError, "k must be positive");
    if (theta.sign() < 0 || !(theta < 1L)) fail(ErrorCode::NotInUnitInterval, "theta must lie in [0,1)");
    // the working precision follows the measured amplification bound of the bracket
    Bits wp = bits + 64;
    for (;;) {
        double cond = 0;
        RenormResidual r = residual_at(lambda, omega, theta, k, wp, cond);
        const Bits need = bits + static_cast<Bits>(std::ceil(cond)) + 64;
        if (wp >= need) return r;
        if (need > 64 * bits) fail(ErrorCode::PrecisionExhausted, "monodromy product needs more than 64x the precision");
        wp = need;
    }
}

Cascade cascade(const cf::Frequency& freq, const Real& lambda, const Real& theta, std::int64_t k, std::size_t depth,
                Bits bits) {
    if (k < 1) fail(ErrorCode::DomainError, "k must be positive");
    if (theta.sign() < 0 || !(theta < 1L)) fail(ErrorCode::NotInUnitInterval, "theta must lie in [0,1)");
    if (depth >= freq.depth()) fail(ErrorCode::InsufficientDepth, "cascade depth must be below the frequency depth");
    cf::CouplingLadder lad = cf::ladder(freq, lambda, depth);
    const Real tail_rad = pow2(-static_cast<long>(bits) + 4, 64);

    Cascade out;
    CascadeLevel cur;
    cur.j = 0;
    cur.omega = cf::cf_value(freq, 0, bits);
    cur.omega_gauss = cur.omega;
    cur.omega_radius = tail_rad;
    cur.theta = theta.at(bits);
    cur.theta_radius = Real(bits);
    cur.k = k;
    cur.log_lambda = lad.log_lambda_levels[0];
    out.levels.push_back(cur);

    for (std::size_t j = 0; j < depth; ++j) {
        const CascadeLevel& p = out.levels.back();
        CascadeLevel n;
        n.j = j + 1;
        const Real w = p.omega;

        Real end = p.theta + Real(p.k, bits) * w;
        Real end_rad = p.theta_radius + tail_rad * Real(p.k, bits) + ulp(end, bits) * 2L;
        n.k = decided_floor(end, end_rad, "theta + k omega");

        Real q = p.theta / w;
        Real q_rad = (p.theta_radius + q * tail_rad) / (w - tail_rad) + ulp(q, bits) * 2L;
        BigInt qf = decided_floor(q, q_rad, "theta / omega");
        n.theta = q - Real(qf, bits);
        n.theta_radius = q_rad;

        Real r = 1L / p.omega_gauss;
        Real r_rad = p.omega_radius / (p.omega_gauss * (p.omega_gauss - p.omega_radius)) + ulp(r, bits) * 2L;
        BigInt a = decided_floor(r, r_rad, "1 / omega");
        if (a != freq.element(j + 1))
            fail(ErrorCode::PrecisionExhausted, "Gauss map left the continued-fraction tail");
        n.omega_gauss = r - Real(a, bits);
        n.omega_radius = r_rad;
        n.omega = cf::cf_value(freq, j + 1, bits);
        n.log_lambda = lad.log_lambda_levels[j + 1];
        out.levels.push_back(std::move(n));
    }
    for (const auto& lv : out.levels)
        if (lv.k <= 1) {
            out.first_short_level = lv.j;
            break;
        }
    return out;
}

Phi0Report phi0_leading(const Real& lambda, const Real& omega, const Real& s_lo, const Real& s_hi,
                        const Real& grid_step, Bits bits) {
    if (!(grid_step > 0L)) fail(ErrorCode::DomainError, "grid step must be positive");
    if (s_hi < s_lo) fail(ErrorCode::DomainError, "empty band");
    if (!(omega > 0L) || !(omega < 1L)) fail(ErrorCode::DomainError, "omega must lie in (0,1)");
    const BigInt count = floor_div(s_hi.to_rational() - s_lo.to_rational(), grid_step.to_rational());
    if (count > 1000000) fail(ErrorCode::CombinatorialBudget, "more than 10^6 grid points");

    const Bits wp = bits + 32;
    const Real two_lambda = lambda.at(wp) * 2L;
    const Real tol = grid_step / 2L;
    const Real tiny = pow2(-static_cast<long>(bits) + 16, 64);
    const double inf = std::numeric_limits<double>::infinity();
    const BigRat w = omega.to_rational();

    auto step_log = [&](const Real& y, bool& vanished) {
        Real sn = abs(sin_pi(y));
        vanished = sn < tiny;
        return vanished ? -inf : log(two_lambda * sn).to_double();
    };

    Phi0Report rep;
    std::map<std::pair<BigInt, long>, Phi0Zero> zeros;
    const long total = count.get_si();
    for (long i = 0; i <= total; ++i) {
        Phi0Sample smp;
        smp.s = exact(s_lo.to_rational() + BigRat(i) * grid_step.to_rational());
        const BigRat sq = smp.s.to_rational();
        const long n = floor_div(sq - 1, w).get_si();
        bool vanished = false;
        smp.step_log = step_log(smp.s, vanished);

        double acc = 0;
        if (n >= 0) {
            // factors at s - l omega, l = 1..n; detection also looks one step past the window
            for (long l = 1; l <= n + 1; ++l) {
                Real y = exact(sq - BigRat(l) * w);
                BigInt kk = round_to_int(y);
                if (kk >= 1 && abs(y - Real(kk, wp)) <= tol) {
                    auto key = std::make_pair(kk, l);
                    if (!zeros.count(key))
                        zeros.emplace(key, Phi0Zero{kk, l, Real(kk, wp) + omega.at(wp) * l, smp.s});
                }
                if (l > n || smp.status != SampleStatus::Finite) continue;
                double f = step_log(y, vanished);
                if (vanished) {
                    smp.status = SampleStatus::Zero;
                    acc = -inf;
                } else {
                    acc += f;
                }
            }
        } else {
            for (long j = 0; j < -n; ++j) {
                Real y = exact(sq + BigRat(j) * w);
                double f = step_log(y, vanished);
                if (vanished) {
                    smp.status = SampleStatus::Pole;
                    acc = inf;
                    break;
                }
                acc -= f;
            }
        }
        smp.log_phi = acc;
        rep.samples.push_back(std::move(smp));
    }
    for (auto& [key, z] : zeros) rep.zeros.push_back(std::move(z));
    std::sort(rep.zeros.begin(), rep.zeros.end(), [](const Phi0Zero& a, const Phi0Zero& b) { return a.s < b.s; });
    return rep;
}

std::size_t lattice_zero_count(const cf::Frequency& freq, long bound) {
    std::size_t total = 0;
    for (long l = 1;; ++l) {
        // k ranges over 1 .. bound - 1 - floor(l omega), since l omega is irrational
        BigInt top = BigInt(bound) - 1 - cf::floor_times_tail(freq, 0, BigInt(l));
        if (top < 1) break;
        total += top.get_ui();
    }
    return total;
}

}  // namespace qplab::renorm
