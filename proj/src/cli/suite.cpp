#include "internal.hpp"
#include "qplab/renorm_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace qplab::cli {

using detail::parallel_for;
using detail::unit_dyadic;

namespace {

struct Outcome {
    bool passed = false;
    double measured = 0;
    double threshold = 0;
    std::string detail;
    std::vector<Artifact> artifacts;
};

struct Context {
    const RunConfig& config;
    cf::Frequency golden128;
    cf::Frequency golden256;

    explicit Context(const RunConfig& c)
        : config(c), golden128(cf::Frequency::golden(64, 128)), golden256(cf::Frequency::golden(64, 256)) {}

    int digits() const { return config.digits; }
    /// Independent stream per criterion, fixed by the seed.
    std::mt19937_64 rng(std::uint64_t salt) const { return std::mt19937_64(config.seed * 0x9E3779B97F4A7C15ULL + salt); }
};

std::string fmt(const char* f, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// ---- 1 ----------------------------------------------------------------------------

Outcome lyapunov_value(const Context& ctx) {
    const int d = ctx.digits();
    Real omega = cf::cf_value(ctx.golden128, 0, 128);
    Real lam(2L, 128);
    auto model = cocycle::CocycleKind::model(lam, omega);
    phase::PhaseClassifier pc(ctx.golden128, lam, cf::Schedule::half(), ctx.config.L_min, ctx.config.L_max);
    auto rng = ctx.rng(1);
    std::vector<Real> thetas;
    for (int i = 0; i < 100; ++i) thetas.push_back(unit_dyadic(rng(), 128));
    std::sort(thetas.begin(), thetas.end());

    std::vector<phase::VerdictKind> verdicts(thetas.size());
    std::vector<double> gamma(thetas.size(), std::nan(""));
    const std::int64_t n = 20000;
    parallel_for(thetas.size(), [&](std::size_t i) {
        verdicts[i] = pc.classify(thetas[i]).kind;
        if (verdicts[i] != phase::VerdictKind::Good) return;
        gamma[i] = cocycle::lyapunov_estimate(model, thetas[i], {n}, cocycle::Direction::Forward).values[0].to_double();
    });
    const double target = std::log(2.0);
    Artifact a{"lyapunov_value", {{"theta", "verdict", "gamma", "abs_error", "within"}, {}}, std::nullopt};
    std::size_t kept = 0, close = 0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        bool good = verdicts[i] == phase::VerdictKind::Good;
        bool within = good && std::abs(gamma[i] - target) <= 0.05;
        kept += good;
        close += within;
        a.table.rows.push_back({num(thetas[i], d), text(phase::to_string(verdicts[i])),
                                good ? num(gamma[i], d) : text(""),
                                good ? num(std::abs(gamma[i] - target), d) : text(""), integer(within)});
    }
    Outcome o;
    o.measured = kept ? static_cast<double>(close) / static_cast<double>(kept) : 0.0;
    o.threshold = 0.95;
    o.passed = kept > 0 && o.measured >= o.threshold;
    o.detail = std::to_string(close) + " of " + std::to_string(kept) + " good phases within 0.05 of log 2 at n = 20000";
    o.artifacts.push_back(std::move(a));
    return o;
}

// ---- 2 ----------------------------------------------------------------------------

Outcome herman_bound(const Context& ctx) {
    const int d = ctx.digits();
    Real omega = cf::cf_value(ctx.golden128, 0, 128);
    auto amo = cocycle::CocycleKind::amo(Real(2L, 128), omega, Real(0L, 128));
    auto rng = ctx.rng(2);
    std::vector<Real> thetas;
    for (int i = 0; i < 20; ++i) thetas.push_back(unit_dyadic(rng(), 128));
    std::sort(thetas.begin(), thetas.end());
    std::vector<double> gamma(thetas.size());
    parallel_for(thetas.size(), [&](std::size_t i) {
        gamma[i] = cocycle::lyapunov_estimate(amo, thetas[i], {20000}, cocycle::Direction::Forward).values[0].to_double();
    });
    const double bound = std::log(2.0) - 0.05;
    Artifact a{"herman_bound", {{"theta", "gamma", "bound"}, {}}, std::nullopt};
    double lowest = INFINITY;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        lowest = std::min(lowest, gamma[i]);
        a.table.rows.push_back({num(thetas[i], d), num(gamma[i], d), num(bound, d)});
    }
    Outcome o{lowest >= bound, lowest, bound, fmt("min gamma_n = %.6f over 20 phases", lowest), {}};
    o.artifacts.push_back(std::move(a));
    return o;
}

// ---- 3 ----------------------------------------------------------------------------

Outcome beta_identity(const Context& ctx) {
    const int d = ctx.digits();
    auto rng = ctx.rng(3);
    std::vector<std::pair<std::string, cf::Frequency>> freqs{{"golden", cf::Frequency::golden(31, 256)}};
    for (int i = 0; i < 10; ++i)
        freqs.emplace_back("bounded_" + std::to_string(i), cf::random_bounded_frequency(rng(), 31, 10, 256));
    const std::size_t L_max = 30;
    Artifact a{"beta_identity", {{"frequency", "L", "q_prev", "beta_L", "deviation_log2"}, {}}, std::nullopt};
    Real worst(0L, 64);
    for (const auto& [name, f] : freqs) {
        cf::CouplingLadder lad = cf::ladder(f, Real(2L, 256), L_max);
        cf::ConvergentTable t = cf::convergents(f, L_max);
        for (std::size_t L = 1; L <= L_max; ++L) {
            const auto& row = t.rows[L - 1];
            // reference |q w - p| at enough precision that q w keeps 256 fraction bits
            Bits ref_bits = 256 + 64 + static_cast<Bits>(mpz_sizeinbase(row.q.get_mpz_t(), 2));
            Real w = cf::cf_value(f, 0, ref_bits);
            Real ref = abs(Real(row.q, ref_bits) * w - Real(row.p, ref_bits));
            Real dev = abs(lad.beta_levels[L] - ref);
            if (dev > worst) worst = dev.at(64);
            double dlog = dev.is_zero() ? -INFINITY : log(dev).to_double() / std::log(2.0);
            a.table.rows.push_back({text(name), integer(static_cast<long long>(L)), big(row.q),
                                    num(lad.beta_levels[L], d), num(dlog, d)});
        }
    }
    Outcome o;
    o.threshold = -200;
    o.measured = worst.is_zero() ? -INFINITY : log(worst).to_double() / std::log(2.0);
    o.passed = worst <= pow2(-200, 64);
    o.detail = fmt("max |beta_L - |q_{L-1} w - p_{L-1}|| = 2^%.1f over 11 frequencies, L <= 30", o.measured);
    o.artifacts.push_back(std::move(a));
    return o;
}

// ---- 4 ----------------------------------------------------------------------------

Outcome lattice_orbits(const Context& ctx) {
    auto rng = ctx.rng(4);
    const std::size_t depth = 24;
    Artifact a{"lattice_orbits", {{"orbit", "k0", "l0", "first_vanishing_level", "bound_value", "violations"}, {}},
               std::nullopt};
    std::size_t violations = 0, orbits = 0;
    while (orbits < 500) {
        cf::Frequency f = cf::random_bounded_frequency(rng(), depth, 10, 128);
        for (int j = 0; j < 10 && orbits < 500; ++j) {
            long k0 = 1 + static_cast<long>(rng() % 50);
            auto pts = phase::band_points(f, k0 - 1, k0);
            std::erase_if(pts, [](auto p) { return p.second == 0; });
            if (pts.empty()) continue;
            long l0 = pts[rng() % pts.size()].second;
            phase::LatticeOrbit orbit = phase::lattice_orbit(f, BigInt(k0), BigInt(l0), depth);
            auto v = phase::orbit_violations(f, orbit);
            if (!orbit.first_vanishing_level) v.push_back("k_{2L} never vanished by level " + std::to_string(depth));
            violations += v.size();
            std::string joined;
            for (const auto& s : v) joined += (joined.empty() ? "" : "; ") + s;
            a.table.rows.push_back(
                {integer(static_cast<long long>(orbits)), integer(k0), integer(l0),
                 orbit.first_vanishing_level ? integer(static_cast<long long>(*orbit.first_vanishing_level)) : text(""),
                 orbit.bound_value ? num(*orbit.bound_value, ctx.digits()) : text(""), text(joined)});
            ++orbits;
        }
    }
    Outcome o{violations == 0, static_cast<double>(violations), 0,
              std::to_string(violations) + " violations over 500 orbits", {}};
    o.artifacts.push_back(std::move(a));
    return o;
}

// ---- 5 ----------------------------------------------------------------------------

Outcome khinchin(const Context& ctx) {
    auto rng = ctx.rng(5);
    std::vector<std::uint64_t> seeds(200);
    for (auto& s : seeds) s = rng();
    std::vector<double> means(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        means[i] = cf::khinchin_mean(cf::random_uniform_frequency(seeds[i], 50, 256), 50).to_double();
    });
    Artifact a{"khinchin", {{"sample", "seed", "geometric_mean"}, {}}, std::nullopt};
    for (std::size_t i = 0; i < seeds.size(); ++i)
        a.table.rows.push_back({integer(static_cast<long long>(i)), text(std::to_string(seeds[i])),
                                num(means[i], ctx.digits())});
    std::vector<double> sorted = means;
    std::sort(sorted.begin(), sorted.end());
    double median = (sorted[99] + sorted[100]) / 2;
    Outcome o{median >= 2.2 && median <= 3.2, median, 2.2, fmt("median geometric mean %.4f, accepted [2.2, 3.2]", median),
              {}};
    o.artifacts.push_back(std::move(a));
    return o;
}

// ---- 6 ----------------------------------------------------------------------------

Outcome liouville_construction(const Context& ctx) {
    const int d = ctx.digits();
    Real lam = Real::parse("1.2", 1024);
    cf::LiouvilleBuild b = cf::liouville_build(lam, BigInt(30), 3);
    // lambda = 6/5 exactly, so X_L = 6^P / (5^P P) with P = a_1 ... a_L is rational
    std::vector<std::string> problems;
    BigInt P = 1;
    Artifact a{"liouville_construction", {{"L", "a_next", "exponent", "window_ok"}, {}}, std::nullopt};
    for (std::size_t L = 1; L < b.freq.depth(); ++L) {
        P *= b.freq.element(L);
        unsigned long p = P.get_ui();
        BigInt six, five;
        mpz_ui_pow_ui(six.get_mpz_t(), 6, p);
        mpz_ui_pow_ui(five.get_mpz_t(), 5, p);
        const BigInt& next = b.freq.element(L + 1);
        // X/2 <= a <= X  <=>  6^P <= 2 a 5^P P  and  a 5^P P <= 6^P
        BigInt scaled = next * five * P;
        bool ok = six <= 2 * scaled && scaled <= six;
        if (!ok) problems.push_back("window fails at L = " + std::to_string(L));
        a.table.rows.push_back({integer(static_cast<long long>(L)), big(next), big(P), integer(ok)});
    }
    if (b.freq.element(2) != 7) problems.push_back("a_2 = " + b.freq.element(2).get_str());
    BigInt six, five;
    mpz_ui_pow_ui(six.get_mpz_t(), 6, 210);
    mpz_ui_pow_ui(five.get_mpz_t(), 5, 210);
    BigInt expect;
    BigInt den = five * 210;
    mpz_fdiv_q(expect.get_mpz_t(), six.get_mpz_t(), den.get_mpz_t());
    if (b.freq.element(3) != expect) problems.push_back("a_3 = " + b.freq.element(3).get_str() + " != " + expect.get_str());

    cf::LiouvilleReport r = cf::liouville_verify(b.freq, cf::LiouvilleForm::lambda_form(lam, ctx.config.liouville_c));
    double c2 = r.rows.size() > 1 ? r.rows[1].c_max : std::nan("");
    if (!(c2 > 0)) problems.push_back("c_max at the second convergent is not positive");
    json doc{{"name", "liouville_construction"}, {"a2", b.freq.element(2).get_str()},
             {"a3", b.freq.element(3).get_str()}, {"a3_expected", expect.get_str()},
             {"c_max_second_convergent", format_double(c2, d)}};
    a.document = doc;
    std::string detail = "a_2 = 7, a_3 = floor(1.2^210/210), windows hold, c_max(q_2) = " + format_double(c2, 6);
    if (!problems.empty()) {
        detail.clear();
        for (const auto& s : problems) detail += (detail.empty() ? "" : "; ") + s;
    }
    Outcome o{problems.empty(), c2, 0, detail, {}};
    o.artifacts.push_back(std::move(a));
    return o;
}

// ---- 7 ----------------------------------------------------------------------------

Outcome renorm_identity(const Context& ctx) {
    const int d = ctx.digits();
    Real omega = cf::cf_value(ctx.golden256, 0, 128);
    Real lam(2L, 128);
    auto rng = ctx.rng(7);
    std::vector<Real> thetas;
    for (int i = 0; i < 16; ++i) thetas.push_back(unit_dyadic(rng(), 128));
    std::sort(thetas.begin(), thetas.end());
    const std::int64_t k_max = 100;
    std::vector<std::vector<renorm::RenormResidual>> res(thetas.size());
    parallel_for(thetas.size(), [&](std::size_t i) {
        for (std::int64_t k = 1; k <= k_max; ++k) res[i].push_back(renorm::renorm_residual(lam, omega, thetas[i], k, 128));
    });
    Artifact a{"renorm_identity", {{"theta", "k", "k1", "residual", "sign", "working_bits"}, {}}, std::nullopt};
    double worst = 0;
    for (std::size_t i = 0; i < thetas.size(); ++i)
        for (const auto& r : res[i]) {
            worst = std::max(worst, r.residual);
            a.table.rows.push_back({num(thetas[i], d), integer(r.k), big(r.k1), num(r.residual, d), integer(r.sign),
                                    integer(r.working_bits)});
        }
    Outcome o{worst <= 1e-10, worst, 1e-10, fmt("max relative residual %.3g over 16 phases, k <= 100", worst), {}};
    o.artifacts.push_back(std::move(a));
    return o;
}

// ---- 8 ----------------------------------------------------------------------------

Outcome monodromy_structure(const Context& ctx) {
    const int d = ctx.digits();
    renorm::FundamentalSolution f(Real(2L, 128), cf::cf_value(ctx.golden256, 0, 128));
    Artifact a{"monodromy_structure", {{"x", "antiperiodicity", "det_error"}, {}}, std::nullopt};
    double worst_anti = 0, worst_det = 0;
    std::vector<std::pair<double, double>> vals(64);
    parallel_for(64, [&](std::size_t i) {
        Real x = Real(static_cast<long>(i), 128) / 64L;
        cocycle::Mat2C m0 = renorm::monodromy_at(f, x);
        cocycle::Mat2C m1 = renorm::monodromy_at(f, x + 1L);
        vals[i] = {((m0 + m1).norm() / m0.norm()).to_double(), (m0.det() - Complex(1.0, 0.0, 128)).abs().to_double()};
    });
    for (std::size_t i = 0; i < 64; ++i) {
        worst_anti = std::max(worst_anti, vals[i].first);
        worst_det = std::max(worst_det, vals[i].second);
        a.table.rows.push_back({num(static_cast<double>(i) / 64, d), num(vals[i].first, d), num(vals[i].second, d)});
    }
    Outcome o{worst_anti <= 1e-10 && worst_det <= 1e-12, worst_anti, 1e-10,
              fmt("max |M1(x+1)+M1(x)|/|M1(x)| = %.3g, max |det - 1| = %.3g", worst_anti, worst_det), {}};
    o.artifacts.push_back(std::move(a));
    return o;
}

// ---- 9 ----------------------------------------------------------------------------

Outcome growth_decay(const Context& ctx) {
    const int d = ctx.digits();
    Real omega = cf::cf_value(ctx.golden128, 0, 128);
    Real lam(5L, 128);
    auto model = cocycle::CocycleKind::model(lam, omega);
    Real lattice = frac(Real(5L, 128) - omega * 8L);
    Real half(0.5, 128);
    cocycle::SolutionTrace w = cocycle::weyl_trace(model, lattice, 0, 61);
    cocycle::SolutionTrace h = cocycle::weyl_trace(model, half, 0, 61);
    cocycle::GrowthProfile pw = cocycle::growth_profile(w);
    cocycle::GrowthProfile ph = cocycle::growth_profile(h);
    phase::PhaseVerdict vh = phase::classify_phase(ctx.golden128, lam, half, cf::Schedule::half(), ctx.config.L_min,
                                                   ctx.config.L_max);
    Artifact a{"growth_decay", {{"n", "phi_log_lattice", "phi_log_half"}, {}}, std::nullopt};
    for (std::int64_t n = 0; n < 61; ++n) a.table.rows.push_back({integer(n), num(w.phi_log_at(n), d), num(h.phi_log_at(n), d)});
    auto profile = [&](const cocycle::GrowthProfile& p) {
        return json{{"peak_index", p.peak_index}, {"rise_slope", format_double(p.rise_slope, d)},
                    {"fall_slope", format_double(p.fall_slope, d)}, {"turning_detected", p.turning_detected}};
    };
    a.document = json{{"name", "growth_decay"},
                      {"lattice_phase", profile(pw)},
                      {"half", profile(ph)},
                      {"half_verdict", phase::to_string(vh.kind)}};
    bool lattice_ok = pw.turning_detected && pw.rise_slope > 0 && pw.fall_slope < 0;
    bool half_ok = !ph.turning_detected;
    Outcome o{lattice_ok && half_ok, static_cast<double>(pw.peak_index), 0,
              fmt("theta = {5 - 8w}: turning at n = %.0f, rise %.3f", static_cast<double>(pw.peak_index), pw.rise_slope) +
                  fmt(", fall %.3f; theta = 1/2 turning: ", pw.fall_slope) + (ph.turning_detected ? "yes" : "no") +
                  " (" + phase::to_string(vh.kind) + ")",
              {}};
    o.artifacts.push_back(std::move(a));
    return o;
}

// ---- 10 ---------------------------------------------------------------------------

Outcome gordon_humps(const Context& ctx) {
    const int d = ctx.digits();
    Real lam = Real::parse("1.2", 512);
    cf::Frequency f = cf::liouville_build(lam, BigInt(30), 2).freq.with_precision(256);
    cf::ConvergentTable t = cf::convergents(f, 2);
    auto amo = cocycle::CocycleKind::amo(lam.at(128), cf::cf_value(f, 0, 128), Real(0L, 128));
    Real theta = theta_values(ctx.config, build_frequency(ctx.config)).front().value.at(128);
    auto reps = cocycle::gordon_check(amo, theta, t, {1, 2});
    Artifact a{"gordon_humps", {{"initial_condition", "m", "q_m", "ratio"}, {}}, std::nullopt};
    double best = 0;
    for (const auto& r : reps)
        for (const auto& e : r.entries) {
            best = std::max(best, e.ratio);
            a.table.rows.push_back({text(r.initial_condition), integer(static_cast<long long>(e.m)), big(e.q), num(e.ratio, d)});
        }
    Outcome o{best >= 0.5, best, 0.5,
              "q = " + t.rows[1].q.get_str() + ", " + t.rows[2].q.get_str() + fmt("; max ratio %.4g", best), {}};
    o.artifacts.push_back(std::move(a));
    return o;
}

// ---- 11 ---------------------------------------------------------------------------

Outcome badset_monotone(const Context& ctx) {
    const int d = ctx.digits();
    const std::vector<long> levels{4, 6, 8};
    std::vector<std::optional<phase::BadSetSlice>> parts(levels.size());
    parallel_for(levels.size(), [&](std::size_t i) {
        parts[i] = phase::theta_bad_set(ctx.golden128, Real(2L, 128), cf::Schedule::half(), levels[i]);
    });
    std::vector<phase::BadSetSlice> s;
    for (auto& p : parts) s.push_back(std::move(*p));
    Artifact a{"badset_monotone", {{"L", "M", "total_measure", "union_bound"}, {}}, std::nullopt};
    bool ok = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        ok = ok && s[i].total_measure <= s[i].union_bound;
        if (i) ok = ok && s[i].total_measure < s[i - 1].total_measure;
        a.table.rows.push_back({integer(s[i].L), integer(s[i].M), num(s[i].total_measure, d), num(s[i].union_bound, d)});
    }
    Outcome o{ok, s.back().total_measure.to_double(), 0,
              "measures " + format_real(s[0].total_measure, 6) + " > " + format_real(s[1].total_measure, 6) + " > " +
                  format_real(s[2].total_measure, 6),
              {}};
    o.artifacts.push_back(std::move(a));
    return o;
}

using Runner = Outcome (*)(const Context&);

struct Criterion {
    const char* name;
    Runner run;
    double budget;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list{
        {"lyapunov_value", lyapunov_value, 60},       {"herman_bound", herman_bound, 20},
        {"beta_identity", beta_identity, 5},          {"lattice_orbits", lattice_orbits, 10},
        {"khinchin", khinchin, 30},                   {"liouville_construction", liouville_construction, 2},
        {"renorm_identity", renorm_identity, 30},     {"monodromy_structure", monodromy_structure, 10},
        {"growth_decay", growth_decay, 2},            {"gordon_humps", gordon_humps, 5},
        {"badset_monotone", badset_monotone, 10},     {"determinism", nullptr, 0},
    };
    return list;
}

const std::string kDeterminism = "determinism";

struct Run {
    CriterionResult result;
    std::vector<Artifact> artifacts;
};

Run run_one(const Context& ctx, std::size_t index) {
    const Criterion& c = criteria()[index];
    Run run;
    run.result.index = static_cast<int>(index) + 1;
    run.result.name = c.name;
    run.result.runtime_budget = c.budget;
    auto start = std::chrono::steady_clock::now();
    try {
        Outcome o = c.run(ctx);
        run.result.passed = o.passed;
        run.result.measured = o.measured;
        run.result.threshold = o.threshold;
        run.result.detail = o.detail;
        run.artifacts = std::move(o.artifacts);
    } catch (const Error& e) {
        run.result.passed = false;
        run.result.measured = std::nan("");
        run.result.detail = std::string("error: ") + e.what();
    }
    run.result.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

std::vector<std::pair<std::string, std::string>> render_all(const std::vector<Run>& runs, const std::string& format,
                                                            const json& summary) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& r : runs)
        for (const auto& a : r.artifacts) files.emplace_back(a.name + "." + format, render(a, format));
    files.emplace_back("suite_report.json", summary.dump(2) + "\n");
    return files;
}

json summary_of(const std::vector<CriterionResult>& results, int digits) {
    json rows = json::array();
    for (const auto& r : results)
        rows.push_back({{"index", r.index},
                        {"name", r.name},
                        {"status", r.passed ? "pass" : "fail"},
                        {"measured", format_double(r.measured, digits)},
                        {"threshold", format_double(r.threshold, digits)},
                        {"detail", r.detail}});
    return json{{"criteria", rows}};
}

}  // namespace

const std::vector<std::string>& criterion_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& c : criteria()) n.push_back(c.name);
        return n;
    }();
    return names;
}

bool SuiteReport::passed() const {
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

bool SuiteReport::within_budget() const {
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) {
        return r.runtime_budget <= 0 || r.runtime_seconds <= r.runtime_budget;
    });
}

json SuiteReport::to_json() const { return summary_of(results, 17); }

SuiteReport run_suite(const RunConfig& config, const std::vector<std::string>& selection,
                      const std::filesystem::path& out_dir) {
    const auto& names = criterion_names();
    std::vector<std::size_t> chosen;
    for (const auto& s : selection) {
        auto it = std::find(names.begin(), names.end(), s);
        if (it == names.end()) fail(ErrorCode::CriterionUnknown, "no criterion named '" + s + "'");
        std::size_t i = static_cast<std::size_t>(it - names.begin());
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) chosen.push_back(i);
    }
    if (selection.empty())
        for (std::size_t i = 0; i < names.size(); ++i) chosen.push_back(i);
    std::sort(chosen.begin(), chosen.end());

    bool determinism = !chosen.empty() && names[chosen.back()] == kDeterminism;
    if (determinism) chosen.pop_back();
    // determinism alone reruns every other criterion
    std::vector<std::size_t> work = chosen;
    if (determinism && work.empty())
        for (std::size_t i = 0; i + 1 < names.size(); ++i) work.push_back(i);

    Context ctx(config);
    std::vector<Run> runs;
    for (std::size_t i : work) runs.push_back(run_one(ctx, i));

    SuiteReport report;
    for (const auto& r : runs)
        if (std::find(chosen.begin(), chosen.end(), static_cast<std::size_t>(r.result.index - 1)) != chosen.end())
            report.results.push_back(r.result);

    if (determinism) {
        auto start = std::chrono::steady_clock::now();
        std::vector<Run> again;
        for (std::size_t i : work) again.push_back(run_one(ctx, i));
        std::vector<CriterionResult> first_results, second_results;
        for (const auto& r : runs) first_results.push_back(r.result);
        for (const auto& r : again) second_results.push_back(r.result);
        auto a = render_all(runs, config.format, summary_of(first_results, config.digits));
        auto b = render_all(again, config.format, summary_of(second_results, config.digits));
        std::size_t differing = 0;
        std::string first_diff;
        if (a.size() != b.size()) differing = std::max(a.size(), b.size());
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
            if (a[i] != b[i]) {
                if (!differing) first_diff = a[i].first;
                ++differing;
            }
        CriterionResult r;
        r.index = static_cast<int>(names.size());
        r.name = kDeterminism;
        r.passed = differing == 0;
        r.measured = static_cast<double>(differing);
        r.threshold = 0;
        r.detail = differing ? std::to_string(differing) + " differing outputs, first " + first_diff
                             : std::to_string(a.size()) + " outputs byte-identical across two runs";
        r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.runtime_budget = 0;
        report.results.push_back(r);
    }

    if (!out_dir.empty()) {
        for (const auto& r : runs) {
            if (std::find(chosen.begin(), chosen.end(), static_cast<std::size_t>(r.result.index - 1)) == chosen.end())
                continue;
            for (const auto& a : r.artifacts) write_artifact(a, out_dir, config.format);
        }
        std::filesystem::create_directories(out_dir);
        std::ofstream(out_dir / "suite_report.json", std::ios::binary | std::ios::trunc)
            << summary_of(report.results, config.digits).dump(2) << "\n";
    }
    return report;
}

}  // namespace qplab::cli
