#pragma once

// Renormalised phases s_L = {s_{L-1}/omega_{L-1}}, their exact lattice form
// s_L = k_L + omega_L l_L, the index K(L, omega) and the good/bad phase tests.

#include "qplab/cf_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qplab::phase {

using cf::Frequency;

/// A phase k + l*omega given exactly by its integer coordinates.
struct LatticePoint {
    BigInt k;
    BigInt l;
};

struct PhaseOrbit {
    Real s0;
    std::vector<Real> levels;        ///< s_0 .. s_depth
    std::vector<Real> error_bounds;  ///< absolute enclosure radius per level (0 when exact)
    Bits working_bits = 0;
};

/// s0 is read as an exact number. Floors are decided against a running error
/// bound, doubling the working precision up to max_bits.
PhaseOrbit iterate_phase(const Frequency& freq, const Real& s0, std::size_t depth, Bits max_bits = 1 << 14);
/// Exact orbit of a lattice phase, evaluated at the frequency's precision.
PhaseOrbit iterate_phase(const Frequency& freq, const LatticePoint& s0, std::size_t depth);

struct LatticePhase {
    std::size_t level;
    BigInt k;
    BigInt l;
};

struct LatticeOrbit {
    std::vector<LatticePhase> levels;                 ///< 0 .. max_level
    std::optional<std::size_t> first_vanishing_level;  ///< L* with k_{2L*} = 0 first
    std::optional<Real> bound_value;                   ///< k_0 beta_{2L*}
    bool bound_ok = true;                              ///< bound_value <= 2
};

/// Exact test of k + omega_level * l in [0,1).
bool in_unit_interval(const Frequency& freq, std::size_t level, const BigInt& k, const BigInt& l);

LatticeOrbit lattice_orbit(const Frequency& freq, const BigInt& k0, const BigInt& l0, std::size_t max_level);

/// Monotonicity of k_{2L} until it vanishes, constancy afterwards and the
/// bound k_0 beta_{2L*} <= 2. Empty when the orbit is consistent.
std::vector<std::string> orbit_violations(const Frequency& freq, const LatticeOrbit& orbit);

enum class KSemantics { Exists, Forall };

/// K(L, omega); odd L is mapped to L+1 and K(0) = 0.
long K_index(const Frequency& freq, long L, KSemantics semantics = KSemantics::Exists);

// ---- phase classification ------------------------------------------------------

enum class VerdictKind { Good, BadLatticeProximity, Undecided };
std::string to_string(VerdictKind kind);

struct PhaseWitness {
    long L;
    long k;
    long l;
    Real distance;
    Real threshold;
    bool violated;
};

struct PhaseVerdict {
    Real theta;
    VerdictKind kind = VerdictKind::Undecided;
    std::vector<PhaseWitness> witnesses;  ///< nearest band point per checked L
    long depth_checked = 0;
    std::optional<long> first_violation_L;
};

struct ClassifyOptions {
    double radius_scale = 1.0;  ///< multiplies every radius
};

/// Lattice points and radii for a range of levels, computed once and reused
/// across many phases.
class PhaseClassifier {
public:
    PhaseClassifier(const Frequency& freq, const Real& lambda, const cf::Schedule& schedule, long L_lo, long L_hi,
                    const ClassifyOptions& options = {});

    PhaseVerdict classify(const Real& theta) const;
    PhaseVerdict classify(const LatticePoint& theta) const;

    struct Level {
        long L;
        long M;
        long k_lo;  ///< exclusive: K(M(L))
        long k_hi;  ///< inclusive: K(L~)
        Real radius;
        std::vector<std::pair<long, long>> points;  ///< (k, l)
        std::vector<Real> values;                   ///< k + l omega
    };
    const std::vector<Level>& levels() const { return levels_; }

private:
    PhaseVerdict classify_impl(const Real& theta, const LatticePoint* exact) const;

    Frequency freq_;
    std::vector<Level> levels_;
    Real tolerance_;
};

PhaseVerdict classify_phase(const Frequency& freq, const Real& lambda, const Real& theta, const cf::Schedule& schedule,
                            long L_lo, long L_hi, const ClassifyOptions& options = {});

/// Lattice points (k, l) with 0 <= k + l omega <= 1 for each k in (k_lo, k_hi].
std::vector<std::pair<long, long>> band_points(const Frequency& freq, long k_lo, long k_hi);

// ---- non-existence witnesses ---------------------------------------------------

enum class Parity { Even, Odd };

struct BadPhaseRow {
    long L;
    Real s_prev;          ///< s_{L-1}
    Real s;               ///< s_L
    Real distance;        ///< distance to omega_* N used by the parity's condition
    double threshold_log;
    bool side_ok;         ///< the clauses other than the distance test
    bool holds;
};

struct BadPhaseReport {
    Parity parity;
    double c;
    long N;
    std::vector<BadPhaseRow> rows;
    std::vector<long> witnesses;  ///< levels where the full condition holds
    std::string note;
};

BadPhaseReport bad_phase_witness(const Frequency& freq, const Real& lambda, const Real& theta, Parity parity, double c,
                                 long N, std::size_t depth);
BadPhaseReport bad_phase_witness(const Frequency& freq, const Real& lambda, const LatticePoint& theta, Parity parity,
                                 double c, long N, std::size_t depth);

/// min_{n >= 0} |s - n*omega|.
Real distance_to_multiples(const Real& s, const Real& omega);

// ---- bad set -----------------------------------------------------------------------

struct BadSetSlice {
    long L;
    long M;
    std::vector<std::pair<Real, Real>> intervals;  ///< (center, radius)
    std::vector<std::pair<long, long>> points;
    Real total_measure;
    Real union_bound;
    Real growth_bound;  ///< (2/omega) exp(-growth_term)
};

struct BadSetOptions {
    std::size_t max_points = 1000000;
};

BadSetSlice theta_bad_set(const Frequency& freq, const Real& lambda, const cf::Schedule& schedule, long L,
                          const BadSetOptions& options = {});

}  // namespace qplab::phase
