#include "qplab/phase_dynamics.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace qplab::phase {

namespace {

constexpr long kMaxKSearch = 50000000;

struct Undecidable {};

Real beta(const Frequency& freq, std::size_t L, Bits bits) {
    Real b(1L, bits);
    for (std::size_t l = 0; l < L; ++l) b *= cf::tail_value(freq, l, bits);
    return b;
}

bool fits_long(const BigInt& z) { return z.fits_slong_p(); }

// Range of m >= 0 with 0 <= k - m*omega <= 1, for k >= 1.
std::pair<long, long> admissible_m(const Frequency& freq, long k) {
    const BigInt kz(k);
    const BigInt hi = kz * freq.element(1) + cf::floor_times_tail(freq, 1, kz);
    BigInt lo(0);
    if (k >= 2) {
        const BigInt km1(k - 1);
        lo = km1 * freq.element(1) + cf::floor_times_tail(freq, 1, km1) + 1;
    }
    if (!fits_long(hi)) fail(ErrorCode::CombinatorialBudget, "lattice coordinate overflows");
    return {lo.get_si(), hi.get_si()};
}

// k_{L} for L = 1..levels from k_0 (exact).
bool vanishes_by(const Frequency& freq, const BigInt& k0, std::size_t levels) {
    BigInt k = k0;
    for (std::size_t L = 1; L <= levels && k != 0; ++L) k = -cf::floor_times_tail(freq, L, k);
    return k == 0;
}

}  // namespace

// ---- orbits -------------------------------------------------------------------

PhaseOrbit iterate_phase(const Frequency& freq, const Real& s0, std::size_t depth, Bits max_bits) {
    if (depth > freq.depth()) fail(ErrorCode::InsufficientDepth, "orbit depth exceeds frequency depth");
    if (s0 < 0L || !(s0 < 1L)) fail(ErrorCode::NotInUnitInterval, "s0 must lie in [0,1)");
    const Bits out_bits = std::max(freq.precision_bits(), s0.precision());
    for (Bits w = out_bits + 32;; w *= 2) {
        try {
            PhaseOrbit orbit{s0, {}, {}, w};
            Real s = s0.at(w);
            Real e(0L, 64);
            orbit.levels.push_back(s0.at(out_bits));
            orbit.error_bounds.push_back(e);
            for (std::size_t L = 1; L <= depth; ++L) {
                if (s.is_zero() && e.is_zero()) {
                    orbit.levels.push_back(Real(out_bits));
                    orbit.error_bounds.push_back(e);
                    continue;
                }
                Real om = cf::cf_value(freq, L - 1, w);
                Real x = s / om;
                // |x - s/omega| stays below (e + 2^{6-w}) / omega since s < 1
                Real ex = (e + pow2(6 - w, 64)) / om.at(64);
                Real f = x - floor(x);
                if (!(f > ex) || !((1L - f) > ex)) throw Undecidable{};
                s = f;
                e = ex + pow2(-w, 64);
                orbit.levels.push_back(s.at(out_bits));
                orbit.error_bounds.push_back(e);
            }
            return orbit;
        } catch (const Undecidable&) {
            if (w * 2 > max_bits)
                fail(ErrorCode::PrecisionExhausted, "phase orbit too close to an integer boundary at "
                                                        + std::to_string(w) + " bits");
        }
    }
}

PhaseOrbit iterate_phase(const Frequency& freq, const LatticePoint& s0, std::size_t depth) {
    LatticeOrbit lat = lattice_orbit(freq, s0.k, s0.l, depth);
    const Bits bits = freq.precision_bits();
    PhaseOrbit orbit{Real(bits), {}, {}, bits};
    for (const auto& lv : lat.levels) {
        Real v(lv.k, bits);
        Real err(0L, 64);
        if (lv.l != 0) {
            v += Real(lv.l, bits) * cf::tail_value(freq, lv.level, bits + 16);
            err = abs(Real(lv.l, 64)) * pow2(4 - bits, 64);
        }
        orbit.levels.push_back(v.at(bits));
        orbit.error_bounds.push_back(err);
    }
    orbit.s0 = orbit.levels.front();
    return orbit;
}

bool in_unit_interval(const Frequency& freq, std::size_t level, const BigInt& k, const BigInt& l) {
    if (l == 0) return k == 0;
    return cf::floor_times_tail(freq, level, l) == -k;
}

LatticeOrbit lattice_orbit(const Frequency& freq, const BigInt& k0, const BigInt& l0, std::size_t max_level) {
    if (max_level > freq.depth()) fail(ErrorCode::InsufficientDepth, "max_level exceeds frequency depth");
    if (!in_unit_interval(freq, 0, k0, l0))
        fail(ErrorCode::NotInUnitInterval, "k0 + omega l0 is not in [0,1)");
    LatticeOrbit orbit;
    orbit.levels.push_back({0, k0, l0});
    BigInt k = k0;
    for (std::size_t L = 1; L <= max_level; ++L) {
        // s_{L-1}/omega_{L-1} = k a_L + l + k omega_L, so only k omega_L contributes to the fraction
        BigInt next = k == 0 ? BigInt(0) : BigInt(-cf::floor_times_tail(freq, L, k));
        orbit.levels.push_back({L, next, k});
        k = std::move(next);
    }
    for (std::size_t L2 = 0; L2 <= max_level; L2 += 2) {
        if (orbit.levels[L2].k == 0) {
            orbit.first_vanishing_level = L2 / 2;
            break;
        }
    }
    if (k0 > 0 && orbit.first_vanishing_level) {
        Real b = beta(freq, 2 * *orbit.first_vanishing_level, freq.precision_bits());
        Real v = Real(k0, freq.precision_bits()) * b;
        orbit.bound_ok = v <= 2L;
        orbit.bound_value = std::move(v);
    }
    return orbit;
}

std::vector<std::string> orbit_violations(const Frequency& freq, const LatticeOrbit& orbit) {
    (void)freq;
    std::vector<std::string> out;
    const auto& lv = orbit.levels;
    if (lv.empty() || lv.front().k <= 0) return out;
    bool vanished = false;
    for (std::size_t L2 = 2; L2 < lv.size(); L2 += 2) {
        const BigInt& prev = lv[L2 - 2].k;
        const BigInt& cur = lv[L2].k;
        if (vanished) {
            if (cur != 0) out.push_back("k_" + std::to_string(L2) + " nonzero after vanishing");
        } else if (cur > prev) {
            out.push_back("k_" + std::to_string(L2) + " increased");
        } else if (cur < 0) {
            out.push_back("k_" + std::to_string(L2) + " negative");
        }
        if (cur == 0) vanished = true;
    }
    if (!orbit.bound_ok) out.push_back("k_0 beta_{2L*} exceeds 2");
    return out;
}

long K_index(const Frequency& freq, long L, KSemantics semantics) {
    if (L < 0) fail(ErrorCode::DomainError, "K(L) needs L >= 0");
    if (L == 0) return 0;
    const std::size_t Lt = static_cast<std::size_t>(2 * ((L + 1) / 2));
    if (Lt > freq.depth()) fail(ErrorCode::InsufficientDepth, "K(" + std::to_string(L) + ") needs depth "
                                                                  + std::to_string(Lt));
    Real b = beta(freq, Lt, freq.precision_bits());
    const BigInt bound = floor_to_int(2L / b) + 1;
    if (!fits_long(bound) || bound > kMaxKSearch)
        fail(ErrorCode::CombinatorialBudget, "K search bound " + bound.get_str() + " too large");
    long best = 0;
    const long kmax = bound.get_si();
    for (long k0 = 1; k0 <= kmax; ++k0) {
        auto [m_lo, m_hi] = admissible_m(freq, k0);
        // k_L never involves l_0, so the quantifier over admissible l_0 only
        // matters through whether any admissible l_0 exists at all
        const bool reach = vanishes_by(freq, BigInt(k0), Lt);
        const bool has_l0 = m_lo <= m_hi;
        const bool ok = semantics == KSemantics::Exists ? (has_l0 && reach) : (!has_l0 || reach);
        if (ok) best = k0;
    }
    return best;
}

// ---- classification -----------------------------------------------------------------

std::string to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::Good: return "good";
        case VerdictKind::BadLatticeProximity: return "bad_lattice_proximity";
        case VerdictKind::Undecided: return "undecided";
    }
    return "undecided";
}

std::vector<std::pair<long, long>> band_points(const Frequency& freq, long k_lo, long k_hi) {
    if (k_lo < 0) fail(ErrorCode::DomainError, "band must start at k_lo >= 0");
    std::vector<std::pair<long, long>> pts;
    for (long k = k_lo + 1; k <= k_hi; ++k) {
        auto [m_lo, m_hi] = admissible_m(freq, k);
        for (long m = m_lo; m <= m_hi; ++m) pts.emplace_back(k, -m);
    }
    return pts;
}

PhaseClassifier::PhaseClassifier(const Frequency& freq, const Real& lambda, const cf::Schedule& schedule, long L_lo,
                                 long L_hi, const ClassifyOptions& options)
    : freq_(freq), tolerance_(pow2(10 - freq.precision_bits(), 64)) {
    if (!(lambda > 1L)) fail(ErrorCode::DomainError, "lambda must exceed 1");
    if (L_lo < 1 || L_hi < L_lo) fail(ErrorCode::DomainError, "L range must satisfy 1 <= L_lo <= L_hi");
    const Bits bits = freq.precision_bits();
    Real omega = cf::tail_value(freq, 0, bits + 16);
    std::map<long, long> kcache;
    auto K = [&](long L) {
        auto it = kcache.find(L);
        if (it != kcache.end()) return it->second;
        long v = K_index(freq, L);
        kcache.emplace(L, v);
        return v;
    };
    for (long L = L_lo; L <= L_hi; ++L) {
        const long M = schedule(L);
        if (M < 0 || M >= L)
            fail(ErrorCode::ScheduleInvalid, "M(" + std::to_string(L) + ") = " + std::to_string(M));
        const long Lt = L % 2 == 0 ? L : L + 1;
        Level lv{L, M, K(M), K(Lt), Real(bits), {}, {}};
        Real bM = beta(freq, static_cast<std::size_t>(M), bits);
        lv.radius = bM * exp(-(1L / bM)) * Real(options.radius_scale, bits);
        lv.points = band_points(freq, lv.k_lo, lv.k_hi);
        for (const auto& [k, l] : lv.points) lv.values.push_back((Real(k, bits) + Real(l, bits + 16) * omega).at(bits));
        levels_.push_back(std::move(lv));
    }
}

PhaseVerdict PhaseClassifier::classify(const Real& theta) const {
    if (theta < 0L || theta > 1L) fail(ErrorCode::NotInUnitInterval, "theta must lie in [0,1]");
    return classify_impl(theta, nullptr);
}

PhaseVerdict PhaseClassifier::classify(const LatticePoint& theta) const {
    const Bits bits = freq_.precision_bits();
    Real v = Real(theta.k, bits) + Real(theta.l, bits + 16) * cf::tail_value(freq_, 0, bits + 16);
    if (v < 0L || v > 1L) fail(ErrorCode::NotInUnitInterval, "lattice phase outside [0,1]");
    return classify_impl(v.at(bits), &theta);
}

PhaseVerdict PhaseClassifier::classify_impl(const Real& theta, const LatticePoint* exact) const {
    PhaseVerdict verdict;
    verdict.theta = theta;
    bool undecided = false;
    for (const auto& lv : levels_) {
        verdict.depth_checked = lv.L;
        if (lv.points.empty()) continue;
        std::size_t best = 0;
        Real best_d(theta.precision());
        for (std::size_t i = 0; i < lv.points.size(); ++i) {
            Real d = abs(theta - lv.values[i]);
            if (exact && exact->k == lv.points[i].first && exact->l == lv.points[i].second) d = Real(theta.precision());
            if (i == 0 || d < best_d) {
                best = i;
                best_d = std::move(d);
            }
        }
        const bool exact_hit = exact && best_d.is_zero();
        const bool violated = exact_hit || best_d < lv.radius - tolerance_;
        const bool unclear = !violated && !(best_d > lv.radius + tolerance_);
        verdict.witnesses.push_back(
            {lv.L, lv.points[best].first, lv.points[best].second, best_d, lv.radius, violated});
        if (violated && !verdict.first_violation_L) verdict.first_violation_L = lv.L;
        undecided = undecided || unclear;
    }
    if (verdict.first_violation_L)
        verdict.kind = VerdictKind::BadLatticeProximity;
    else
        verdict.kind = undecided ? VerdictKind::Undecided : VerdictKind::Good;
    return verdict;
}

PhaseVerdict classify_phase(const Frequency& freq, const Real& lambda, const Real& theta, const cf::Schedule& schedule,
                            long L_lo, long L_hi, const ClassifyOptions& options) {
    return PhaseClassifier(freq, lambda, schedule, L_lo, L_hi, options).classify(theta);
}

// ---- non-existence witnesses -------------------------------------------------------

Real distance_to_multiples(const Real& s, const Real& omega) {
    BigInt n = floor_to_int(s / omega);
    if (n < 0) n = 0;
    Real d0 = abs(s - Real(n, omega.precision()) * omega);
    Real d1 = abs(s - Real(BigInt(n + 1), omega.precision()) * omega);
    return min(d0, d1);
}

namespace {

BadPhaseReport witness_scan(const Frequency& freq, const Real& lambda, const PhaseOrbit& orbit,
                            const LatticeOrbit* lattice, Parity parity, double c, long N, std::size_t depth) {
    if (!(lambda > 1L)) fail(ErrorCode::DomainError, "lambda must exceed 1");
    if (c <= 0) fail(ErrorCode::DomainError, "c must be positive");
    const Bits bits = freq.precision_bits();
    cf::CouplingLadder lad = cf::ladder(freq, lambda, depth);
    BadPhaseReport rep{parity, c, N, {}, {}, {}};
    const std::size_t first = parity == Parity::Even ? 2 : 1;
    for (std::size_t L = first; L <= depth; L += 2) {
        const double log_lambda_L = lad.log_lambda_levels[L].to_double();
        BadPhaseRow row{static_cast<long>(L), orbit.levels[L - 1], orbit.levels[L], Real(bits), 0.0, false, false};
        const std::size_t idx = parity == Parity::Even ? L - 1 : L;
        Real om = cf::tail_value(freq, idx, bits);
        const bool exact_zero = lattice && lattice->levels[idx].k == 0 && lattice->levels[idx].l >= 0;
        row.distance = exact_zero ? Real(bits) : distance_to_multiples(orbit.levels[idx], om);
        if (parity == Parity::Even) {
            row.threshold_log = log(om).to_double() - c * log_lambda_L;
            row.side_ok = !(row.s_prev < c);
        } else {
            row.threshold_log = -c * log_lambda_L;
            row.side_ok = !(row.s_prev > 1.0 - c) && !(row.s > om * N);
        }
        const bool close = row.distance.is_zero() || log(row.distance).to_double() <= row.threshold_log;
        row.holds = row.side_ok && close;
        if (row.holds) rep.witnesses.push_back(row.L);
        rep.rows.push_back(std::move(row));
    }
    rep.note = rep.witnesses.empty() ? "no witness up to depth " + std::to_string(depth)
                                           + "; this does not show the phase is good"
                                     : "witnesses at finite depth only";
    return rep;
}

}  // namespace

BadPhaseReport bad_phase_witness(const Frequency& freq, const Real& lambda, const Real& theta, Parity parity, double c,
                                 long N, std::size_t depth) {
    PhaseOrbit orbit = iterate_phase(freq, theta, depth);
    return witness_scan(freq, lambda, orbit, nullptr, parity, c, N, depth);
}

BadPhaseReport bad_phase_witness(const Frequency& freq, const Real& lambda, const LatticePoint& theta, Parity parity,
                                 double c, long N, std::size_t depth) {
    LatticeOrbit lat = lattice_orbit(freq, theta.k, theta.l, depth);
    PhaseOrbit orbit = iterate_phase(freq, theta, depth);
    return witness_scan(freq, lambda, orbit, &lat, parity, c, N, depth);
}

// ---- bad set --------------------------------------------------------------------------

BadSetSlice theta_bad_set(const Frequency& freq, const Real& lambda, const cf::Schedule& schedule, long L,
                          const BadSetOptions& options) {
    const long M = schedule(L);
    if (M < 0 || M >= L) fail(ErrorCode::ScheduleInvalid, "M(" + std::to_string(L) + ") = " + std::to_string(M));
    const long Lt = L % 2 == 0 ? L : L + 1;
    const long k_lo = K_index(freq, M), k_hi = K_index(freq, Lt);
    const double per_k = cf::tail_value(freq, 0, 64).to_double();
    if (k_hi > k_lo && static_cast<double>(k_hi - k_lo) * (1.0 / per_k + 1.0) > static_cast<double>(options.max_points))
        fail(ErrorCode::CombinatorialBudget, "bad-set enumeration exceeds " + std::to_string(options.max_points)
                                                 + " points");
    PhaseClassifier pc(freq, lambda, schedule, L, L);
    const auto& lv = pc.levels().front();
    const Bits bits = freq.precision_bits();
    BadSetSlice out{L, M, {}, lv.points, Real(bits), Real(bits), Real(bits)};
    for (const auto& v : lv.values) out.intervals.emplace_back(v, lv.radius);

    std::vector<Real> centers = lv.values;
    std::sort(centers.begin(), centers.end(), [](const Real& a, const Real& b) { return a < b; });
    // a merged run of n intervals can never cover more than n * 2r; capping
    // at that keeps rounding from pushing the union above the union bound
    Real cur_lo(bits), cur_hi(bits);
    long run = 0;
    auto close_run = [&] {
        if (run > 0) out.total_measure += min(cur_hi - cur_lo, Real(2L * run, bits) * lv.radius);
    };
    for (const auto& ctr : centers) {
        Real lo = max(ctr - lv.radius, Real(bits));
        Real hi = min(ctr + lv.radius, Real(1L, bits));
        if (run > 0 && !(lo > cur_hi)) {
            cur_hi = max(cur_hi, hi);
            ++run;
        } else {
            close_run();
            cur_lo = lo;
            cur_hi = hi;
            run = 1;
        }
    }
    close_run();
    out.union_bound = Real(static_cast<long>(centers.size()) * 2L, bits) * lv.radius;

    cf::CouplingLadder lad = cf::ladder(freq, lambda, static_cast<std::size_t>(M));
    Real growth = lad.log_lambda_levels[static_cast<std::size_t>(M)];
    for (long l = M; l <= L; ++l) growth += log(cf::tail_value(freq, static_cast<std::size_t>(l), bits));
    out.growth_bound = 2L / cf::tail_value(freq, 0, bits) * exp(-growth);
    return out;
}

}  // namespace qplab::phase
