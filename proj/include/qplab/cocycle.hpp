#pragma once

// Transfer-matrix cocycles over the rotation x -> x + omega: long products with
// exact power-of-two rescaling, finite-horizon Lyapunov exponents and
// solution traces of the underlying second-order recursion.

#include "qplab/cf_core.hpp"
#include "qplab/real.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qplab::cocycle {

struct Mat2C {
    explicit Mat2C(Bits bits = 128) : a(bits), b(bits), c(bits), d(bits) {}
    Mat2C(Complex a_, Complex b_, Complex c_, Complex d_)
        : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}

    static Mat2C identity(Bits bits);

    Bits precision() const { return a.precision(); }
    Complex det() const;
    /// Adjugate divided by the determinant; SingularInverse when |det| < tol.
    Mat2C inverse(const Real& tol) const;
    Mat2C transpose() const { return Mat2C(a, c, b, d); }
    /// Largest singular value.
    Real norm() const;
    /// Frobenius norm.
    Real frobenius() const;
    long max_exponent() const;
    /// Multiplies every entry by 2^e (exact).
    void scale2(long e);

    friend Mat2C operator*(const Mat2C& x, const Mat2C& y);
    friend Mat2C operator+(const Mat2C& x, const Mat2C& y);
    friend Mat2C operator-(const Mat2C& x, const Mat2C& y);
    Mat2C operator-() const { return Mat2C(-a, -b, -c, -d); }

    Complex a, b, c, d;
};

/// Which cocycle: the model (lambda v_0 on the diagonal, v_0 = 2 e^{i pi omega/2} sin(pi x)),
/// almost Mathieu at energy E with v(x) = 2 lambda cos(2 pi x), or the gauge
/// ((2 lambda sin(pi x), -e^{-i pi x}), (e^{i pi x}, 0)).
struct CocycleKind {
    enum class Type { Model, Amo, RenormGauge };
    Type type = Type::Model;
    Real lambda{128};
    Real omega{128};
    Real energy{128};

    static CocycleKind model(const Real& lambda, const Real& omega);
    static CocycleKind amo(const Real& lambda, const Real& omega, const Real& energy);
    static CocycleKind renorm_gauge(const Real& lambda, const Real& omega);

    /// Model and almost Mathieu matrices have the companion form ((a, -1), (1, 0)).
    bool companion() const { return type != Type::RenormGauge; }
    std::string name() const;
};

Mat2C transfer_matrix(const CocycleKind& kind, const Real& x, Bits bits);

/// Top-left entry a(x) of a companion-form cocycle.
Complex potential(const CocycleKind& kind, const Real& x, Bits bits);

enum class Direction { Forward, Backward };

/// Represented product = matrix * 2^{exponent}; log_scale = exponent * log 2.
/// The matrix is rescaled by a power of two whenever its largest entry leaves
/// [2^-window, 2^window].
struct ScaledProduct {
    Mat2C matrix;
    std::int64_t exponent = 0;
    std::int64_t factor_count = 0;

    Real log_scale() const;
    /// log of the operator norm of the represented product.
    Real log_norm() const;
};

struct ProductOptions {
    Bits bits = 128;
    /// Rescale when the largest entry exponent leaves [-window, window].
    long window = 8;
};

/// Forward: M(theta + (n-1) omega) ... M(theta). Backward:
/// M^{-1}(theta - n omega) ... M^{-1}(theta - omega).
ScaledProduct cocycle_product(const CocycleKind& kind, const Real& theta, std::int64_t n, Direction direction,
                              const ProductOptions& options = {});

/// Product over sites theta + first*omega .. theta + (first+count-1)*omega.
ScaledProduct cocycle_segment(const CocycleKind& kind, const Real& theta, std::int64_t first, std::int64_t count,
                              const ProductOptions& options = {});

/// (X * 2^ex) * (Y * 2^ey), renormalised.
ScaledProduct compose(const ScaledProduct& left, const ScaledProduct& right, const ProductOptions& options = {});

struct LyapunovEstimate {
    Direction direction;
    std::vector<std::int64_t> horizons;
    std::vector<Real> values;
    Real target;  ///< log lambda
};

LyapunovEstimate lyapunov_estimate(const CocycleKind& kind, const Real& theta, const std::vector<std::int64_t>& horizons,
                                   Direction direction, const ProductOptions& options = {});

// ---- solution traces ------------------------------------------------------------

/// psi(n) = mantissa[n] * 2^{scale[n]} for n in [n_min, n_max].
struct SolutionTrace {
    std::int64_t n_min = 0;
    std::int64_t n_max = 0;
    std::vector<Complex> psi;
    std::vector<std::int64_t> scale;
    std::vector<double> phi_log;  ///< n in [n_min, n_max - 1]

    Complex psi_at(std::int64_t n) const;  ///< mantissa only
    std::int64_t scale_at(std::int64_t n) const;
    double phi_log_at(std::int64_t n) const;
    double log_abs_psi(std::int64_t n) const;
};

/// psi(n+1) + psi(n-1) = a(theta + n omega) psi(n) from psi(0), psi(1).
SolutionTrace solve_trace(const CocycleKind& kind, const Real& theta, const Complex& psi0, const Complex& psi1,
                          std::int64_t n_min, std::int64_t n_max, Bits bits = 128);

/// Solution that decays to the right: backward recursion from psi(N+1) = 0,
/// psi(N) = 1 with N = n_max + padding, normalised so that phi(0) = 1 when 0
/// is in range.
SolutionTrace weyl_trace(const CocycleKind& kind, const Real& theta, std::int64_t n_min, std::int64_t n_max,
                         std::int64_t padding = 64, Bits bits = 128);

/// max_n |psi(n+1) + psi(n-1) - a psi(n)| / (|psi(n-1)| + |a psi(n)| + |psi(n+1)|) over interior n.
double trace_residual(const SolutionTrace& trace, const CocycleKind& kind, const Real& theta, Bits bits = 128);

struct GordonEntry {
    std::size_t m;
    BigInt q;
    double phi_plus_q_log, phi_minus_q_log, phi_plus_2q_log, phi_minus_2q_log;
    double phi0_log;
    double ratio;  ///< max of the four over phi(0)
};

struct GordonReport {
    std::string initial_condition;  ///< "psi0=1,psi1=0" or "psi0=0,psi1=1"
    std::vector<GordonEntry> entries;
};

struct GordonOptions {
    std::int64_t max_sites = 2000000;
    Bits bits = 128;
};

/// One report per canonical initial condition.
std::vector<GordonReport> gordon_check(const CocycleKind& kind, const Real& theta, const cf::ConvergentTable& table,
                                       const std::vector<std::size_t>& m_list, const GordonOptions& options = {});

struct GrowthProfile {
    std::int64_t peak_index = 0;
    double rise_slope = 0;
    double fall_slope = 0;
    double sse = 0;
    bool turning_detected = false;
};

GrowthProfile growth_profile(const SolutionTrace& trace);
/// Same fit on a raw series indexed from first_index.
GrowthProfile growth_profile(const std::vector<double>& phi_log, std::int64_t first_index);

}  // namespace qplab::cocycle
