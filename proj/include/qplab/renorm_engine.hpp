#pragma once

// Monodromization for the gauge M(s) = ((2 lambda sin(pi s), -e^{-i pi s}), (e^{i pi s}, 0)):
// a fundamental solution of Psi(s + omega) = M(s) Psi(s), its monodromy
// matrices, the renormalization identity for long products, the parameter
// cascade and the leading-solution heuristic.

#include "qplab/cf_core.hpp"
#include "qplab/cocycle.hpp"

#include <optional>
#include <vector>

namespace qplab::renorm {

using cocycle::Mat2C;

/// Psi = I on [0, omega) and Psi(s) = M(s - omega) ... M(s0) with s0 = s - floor(s/omega) omega.
/// Arguments are exact dyadics, so floor(s/omega) is decided exactly.
struct FundamentalSolution {
    FundamentalSolution(const Real& lambda, const Real& omega, Bits bits = 128);

    Real lambda;
    Real omega;
    Bits bits;
    cocycle::CocycleKind gauge;
};

/// Number of factors floor(s/omega) in Psi(s).
BigInt factor_count(const FundamentalSolution& fund, const Real& s);

Mat2C fundamental_at(const FundamentalSolution& fund, const Real& s);

/// M_1(x) = (Psi(omega x)^{-1} Psi(omega x + 1))^t for x >= 0.
Mat2C monodromy_at(const FundamentalSolution& fund, const Real& x);

struct RenormResidual {
    std::int64_t k = 0;
    BigInt k1;
    Real theta1;
    Real omega1;
    double residual = 0;  ///< min over sign of |LHS - sign RHS| / |LHS| (Frobenius)
    int sign = 1;
    /// Sign produced by reducing the monodromy arguments into [0, 1) before resolving.
    int reduction_sign = 1;
    double lhs_log_norm = 0;
    double rhs_log_norm = 0;
    /// Precision actually used and log2 of the amplification bound it had to cover.
    Bits working_bits = 0;
    double condition_log2 = 0;
};

/// Compares M(theta + (k-1) omega) ... M(theta) with
/// Psi({k omega + theta}) [M_1(theta_1 - omega_1) ... M_1(theta_1 - k_1 omega_1)]^t Psi^{-1}(theta).
/// `bits` is the target precision; the working precision is raised to cover the
/// amplification of the monodromy product.
RenormResidual renorm_residual(const Real& lambda, const Real& omega, const Real& theta, std::int64_t k,
                               Bits bits = 128);

struct CascadeLevel {
    std::size_t j = 0;
    Real omega;          ///< omega_j from the continued-fraction tail
    Real omega_gauss;    ///< omega_j from iterating {1/omega}
    Real omega_radius;   ///< enclosure radius of omega_gauss
    Real theta;
    Real theta_radius;
    BigInt k;
    Real log_lambda;
};

struct Cascade {
    std::vector<CascadeLevel> levels;
    std::optional<std::size_t> first_short_level;  ///< first j with k_j <= 1
};

/// theta in [0,1), k >= 1, depth < freq.depth(). PrecisionExhausted when a floor is undecidable.
Cascade cascade(const cf::Frequency& freq, const Real& lambda, const Real& theta, std::int64_t k, std::size_t depth,
                Bits bits = 256);

enum class SampleStatus { Finite, Zero, Pole };

struct Phi0Sample {
    Real s;
    double log_phi = 0;   ///< -inf at a zero, +inf at a pole
    double step_log = 0;  ///< log |lambda v_0(s)| = log phi(s + omega) - log phi(s)
    SampleStatus status = SampleStatus::Finite;
};

struct Phi0Zero {
    BigInt k;
    long l = 0;
    Real s;         ///< k + l omega
    Real sample;    ///< grid point that flagged it
};

struct Phi0Report {
    std::vector<Phi0Sample> samples;
    std::vector<Phi0Zero> zeros;  ///< sorted by position
};

/// phi(s + omega) = lambda v_0(s) phi(s) with phi = 1 on [1, 1 + omega), sampled on
/// s_lo, s_lo + step, ... <= s_hi. A zero k + l omega (k, l >= 1) is flagged by the
/// grid points within step/2 of it.
Phi0Report phi0_leading(const Real& lambda, const Real& omega, const Real& s_lo, const Real& s_hi,
                        const Real& grid_step, Bits bits = 128);

/// |{(k, l) : k, l >= 1, k + l omega <= bound}|, counted exactly from the frequency.
std::size_t lattice_zero_count(const cf::Frequency& freq, long bound);

}  // namespace qplab::renorm
