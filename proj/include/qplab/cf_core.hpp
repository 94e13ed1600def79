#pragma once

// Continued-fraction arithmetic for frequencies omega in (0,1).
//
// A Frequency is stored by its CF elements a_1, a_2, ... (big integers), never
// by a decimal value. Since a finite list of elements does not pin down an
// irrational, every Frequency also carries a periodic closure block that
// continues the expansion after the known elements (default [1], a golden
// tail). The closed number is a quadratic irrational, so every tail
// omega_L = [0; a_{L+1}, a_{L+2}, ...] is defined exactly and can be
// evaluated to any precision. `depth` counts the known elements and bounds
// every level-indexed operation.

#include "qplab/errors.hpp"
#include "qplab/real.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qplab::cf {

class Frequency {
public:
    Frequency(std::vector<BigInt> elements, Bits precision_bits, std::vector<BigInt> closure = {BigInt(1)});

    /// omega = (sqrt(5)-1)/2: all elements equal to 1.
    static Frequency golden(std::size_t depth, Bits precision_bits = 256);
    /// prefix followed by `period` repeated forever; `depth` elements are materialised.
    static Frequency periodic(std::vector<BigInt> prefix, std::vector<BigInt> period, std::size_t depth,
                              Bits precision_bits = 256);

    const std::vector<BigInt>& elements() const { return elements_; }
    const std::vector<BigInt>& closure() const { return closure_; }
    std::size_t depth() const { return elements_.size(); }
    Bits precision_bits() const { return bits_; }

    /// a_j for j >= 1; indices past depth() continue into the closure block.
    const BigInt& element(std::size_t j) const;

    Frequency with_precision(Bits bits) const { return Frequency(elements_, bits, closure_); }
    /// Keeps the first `depth` elements; the closure continues after them.
    Frequency truncated(std::size_t depth) const;

    friend bool operator==(const Frequency&, const Frequency&) = default;

private:
    std::vector<BigInt> elements_;
    std::vector<BigInt> closure_;
    Bits bits_;
};

// ---- expansion --------------------------------------------------------------

/// Expands the exact rational `center`, known to within +-radius, to `depth`
/// elements. Elements are emitted only while both interval endpoints agree.
/// Throws RationalInput when the centre's tail is exactly 0, PrecisionExhausted
/// when an element is undecidable, DomainError when center is not in (0,1).
Frequency cf_expand_interval(const BigRat& center, const BigRat& radius, std::size_t depth, Bits precision_bits);

/// Treats x as exact with uncertainty 2^-precision(x).
Frequency cf_expand(const Real& x, std::size_t depth);

/// Precision escalation: calls generator(bits) with bits doubling from
/// start_bits up to max_bits until all `depth` elements are decided. The
/// returned Frequency carries start_bits.
Frequency cf_expand(const std::function<Real(Bits)>& generator, std::size_t depth, Bits start_bits,
                    Bits max_bits = 1 << 15);

/// Decimal string, read as an exact rational, with uncertainty 2^-precision_bits.
Frequency cf_expand_decimal(std::string_view decimal, std::size_t depth, Bits precision_bits);

/// Exact rational value of a decimal literal such as "0.25", "-1.5e-3".
BigRat parse_decimal(std::string_view text);

// ---- evaluation -------------------------------------------------------------

/// omega_level at the frequency's precision. InsufficientDepth when
/// level >= depth (no known element beyond `level`).
Real cf_value(const Frequency& freq, std::size_t level);
/// omega_level at an explicit working precision.
Real cf_value(const Frequency& freq, std::size_t level, Bits bits);
/// omega_level for any level, reading past depth into the closure block.
Real tail_value(const Frequency& freq, std::size_t level, Bits bits);

/// omega_0 .. omega_{count-1}.
std::vector<Real> tails(const Frequency& freq, std::size_t count);

/// Value t of the purely periodic closure [0; c_1, ..., c_m, c_1, ...].
Real closure_value(const std::vector<BigInt>& block, Bits bits);

/// Bracket of omega_level between two consecutive convergents of its tail:
/// lo < omega_level < hi as exact rationals, with hi - lo <= width (when positive).
std::pair<BigRat, BigRat> tail_bracket(const Frequency& freq, std::size_t level, std::size_t terms);

/// floor(k * omega_level), decided exactly by convergent bracketing.
BigInt floor_times_tail(const Frequency& freq, std::size_t level, const BigInt& k);

// ---- convergents ------------------------------------------------------------

struct ConvergentRow {
    std::size_t l;
    BigInt p;
    BigInt q;
    Real err;  ///< |omega - p_l/q_l|
};

struct ConvergentTable {
    std::vector<ConvergentRow> rows;  ///< rows 0..L
};

/// Rows 0..L of p_l/q_l (p_0/q_0 = 0/1). InsufficientDepth if L > depth.
ConvergentTable convergents(const Frequency& freq, std::size_t L);

/// Human-readable list of violated table invariants (recursion, error bound,
/// a_l..a_1 sandwich); empty when the table is consistent.
std::vector<std::string> convergent_violations(const Frequency& freq, const ConvergentTable& table);

// ---- coupling ladder ----------------------------------------------------------

/// lambda_L is never formed; only log lambda_L = log lambda / beta_L.
struct CouplingLadder {
    Real lambda;
    std::vector<Real> log_lambda_levels;  ///< L = 0..depth
    std::vector<Real> beta_levels;        ///< beta_L = omega_0 ... omega_{L-1}, beta_0 = 1
};

CouplingLadder ladder(const Frequency& freq, const Real& lambda, std::size_t depth);

// ---- frequency classes --------------------------------------------------------

/// Map L -> M(L) used to pick the renormalisation window.
class Schedule {
public:
    enum class Kind { Half, MinusOne };

    static Schedule half() { return Schedule(Kind::Half); }
    static Schedule minus_one() { return Schedule(Kind::MinusOne); }
    static Schedule custom(std::string name, std::function<long(long)> fn);
    /// "half" or "minus_one".
    static Schedule from_name(std::string_view name);

    long operator()(long L) const;
    const std::string& name() const { return name_; }

private:
    explicit Schedule(Kind kind);
    std::string name_;
    std::function<long(long)> fn_;
};

struct FrequencyLevel {
    long L;
    long M;
    double tail_product_log;    ///< sum_{l=M}^{L-1} log omega_l
    double growth_term_log;     ///< log lambda_M + sum_{l=M}^{L} log omega_l
    double good_theta0_partial_sum;
    double omega_L_log;         ///< log omega_L
    double omega1_growth_log;   ///< log lambda_{L-1} + log omega_{L-1} + log omega_L
    double shifted_growth_log;   ///< log lambda_L + log omega_{L-1} + log omega_L
};

struct FrequencyClassReport {
    std::string schedule;
    std::vector<FrequencyLevel> levels;
    std::size_t window = 0;
    bool omega_trend_ok = false;
    bool lambda_trend_ok = false;
    bool omega1_ok = false;
    bool summable_ok = false;
};

/// Finite-depth trend indicators for the frequency-class conditions. Records
/// are produced for L = 1 .. depth-1 (omega_L needs a_{L+1}).
FrequencyClassReport classify_frequency(const Frequency& freq, const Real& lambda, const Schedule& schedule,
                                        std::size_t depth);

/// Geometric mean (a_1 ... a_L)^{1/L}, computed in log domain.
Real khinchin_mean(const Frequency& freq, std::size_t L);

/// Uniform random omega drawn as a stream of random bits from `seed`; the
/// expansion escalates by drawing more bits from the same stream, so the
/// sampled number does not depend on the precision needed to expand it.
Frequency random_uniform_frequency(std::uint64_t seed, std::size_t depth, Bits bits);

/// Elements drawn uniformly from [1, max_element].
Frequency random_bounded_frequency(std::uint64_t seed, std::size_t depth, long max_element, Bits bits);

// ---- Liouville numbers -------------------------------------------------------

struct LiouvilleOptions {
    long max_element_bits = 1 << 16;
};

struct LiouvilleBuild {
    Frequency freq;
    std::vector<Real> window_log;  ///< log X_L for L = 1 .. levels-1
};

/// a_{L+1} = floor(X_L), X_L = (a_1...a_L)^{-1} lambda^{a_1...a_L}.
/// lambda must carry enough precision for the largest exponent.
LiouvilleBuild liouville_build(const Real& lambda, const BigInt& a1, std::size_t levels,
                               const LiouvilleOptions& options = {});

struct LiouvilleForm {
    enum class Kind { Lambda, Simon };
    Kind kind = Kind::Simon;
    Real lambda{128};
    double c = 0.0;

    static LiouvilleForm simon() { return {}; }
    static LiouvilleForm lambda_form(Real lambda, double c) { return {Kind::Lambda, std::move(lambda), c}; }
};

struct LiouvilleRow {
    std::size_t l;
    BigInt q;
    double err_log;
    bool holds;
    double c_max;  ///< log(1/(q err)) / (q log lambda); NaN for the Simon form
};

struct LiouvilleReport {
    LiouvilleForm::Kind kind;
    std::vector<LiouvilleRow> rows;
};

LiouvilleReport liouville_verify(const Frequency& freq, const LiouvilleForm& form);

}  // namespace qplab::cf
