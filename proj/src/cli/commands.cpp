#include "internal.hpp"
#include "qplab/renorm_engine.hpp"

#include <algorithm>
#include <cmath>

namespace qplab::cli {

using detail::cocycle_kind;
using detail::parallel_for;

namespace {

json config_document(const std::string& name, const RunConfig& c) {
    return json{{"name", name}, {"config", to_json(c)}};
}

std::vector<Cell> with_theta(const Theta& t, int digits, std::vector<Cell> rest) {
    std::vector<Cell> row{num(t.value, digits)};
    for (auto& c : rest) row.push_back(std::move(c));
    return row;
}

// Per-theta rows computed independently and emitted in theta order.
Table sweep(const std::vector<Theta>& thetas, std::vector<std::string> columns,
            const std::function<std::vector<std::vector<Cell>>(const Theta&)>& rows_for) {
    std::vector<std::vector<std::vector<Cell>>> parts(thetas.size());
    parallel_for(thetas.size(), [&](std::size_t i) { parts[i] = rows_for(thetas[i]); });
    Table t{std::move(columns), {}};
    for (auto& p : parts)
        for (auto& r : p) t.rows.push_back(std::move(r));
    return t;
}

Artifact cmd_cf(const RunConfig& c) {
    cf::Frequency f = build_frequency(c);
    const int d = c.digits;
    std::size_t L = f.depth();
    cf::ConvergentTable table = cf::convergents(f, L);
    cf::CouplingLadder lad = cf::ladder(f, lambda_value(c, f.precision_bits()), L);
    Artifact a{"cf", {{"l", "a_l", "p_l", "q_l", "err", "omega_l", "beta_l", "log_lambda_l"}, {}}, std::nullopt};
    for (const auto& row : table.rows) {
        Cell a_l = row.l == 0 ? text("") : big(f.element(row.l));
        Cell tail = row.l < L ? num(cf::cf_value(f, row.l), d) : text("");
        a.table.rows.push_back({integer(static_cast<long long>(row.l)), a_l, big(row.p), big(row.q), num(row.err, d),
                                tail, num(lad.beta_levels[row.l], d), num(lad.log_lambda_levels[row.l], d)});
    }
    json doc = config_document("cf", c);
    doc["violations"] = cf::convergent_violations(f, table);
    a.document = doc;
    return a;
}

Artifact cmd_freq(const RunConfig& c) {
    cf::Frequency f = build_frequency(c);
    const int d = c.digits;
    cf::FrequencyClassReport r =
        cf::classify_frequency(f, lambda_value(c, f.precision_bits()), cf::Schedule::from_name(c.schedule), f.depth());
    Artifact a{"freq",
               {{"L", "M", "tail_product_log", "growth_term_log", "good_theta0_partial_sum", "omega_L_log",
                 "omega1_growth_log", "shifted_growth_log"},
                {}},
               std::nullopt};
    for (const auto& l : r.levels)
        a.table.rows.push_back({integer(l.L), integer(l.M), num(l.tail_product_log, d), num(l.growth_term_log, d),
                                num(l.good_theta0_partial_sum, d), num(l.omega_L_log, d),
                                num(l.omega1_growth_log, d), num(l.shifted_growth_log, d)});
    json doc = config_document("freq", c);
    doc["schedule"] = r.schedule;
    doc["window"] = r.window;
    doc["omega_trend_ok"] = r.omega_trend_ok;
    doc["lambda_trend_ok"] = r.lambda_trend_ok;
    doc["omega1_ok"] = r.omega1_ok;
    doc["summable_ok"] = r.summable_ok;
    doc["khinchin_mean"] = format_real(cf::khinchin_mean(f, f.depth()), d);
    a.document = doc;
    return a;
}

Artifact cmd_liouville(const RunConfig& c) {
    cf::Frequency f = build_frequency(c);
    const int d = c.digits;
    Real lam = lambda_value(c, f.precision_bits());
    cf::LiouvilleReport r = cf::liouville_verify(f, cf::LiouvilleForm::lambda_form(lam, c.liouville_c));
    cf::LiouvilleReport s = cf::liouville_verify(f, cf::LiouvilleForm::simon());
    Artifact a{"liouville", {{"l", "q_l", "err_log", "holds", "c_max", "simon_holds"}, {}}, std::nullopt};
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        bool simon = i < s.rows.size() && s.rows[i].holds;
        a.table.rows.push_back({integer(static_cast<long long>(row.l)), big(row.q), num(row.err_log, d),
                                integer(row.holds), num(row.c_max, d), integer(simon)});
    }
    json doc = config_document("liouville", c);
    doc["c"] = c.liouville_c;
    a.document = doc;
    return a;
}

Artifact cmd_phase(const RunConfig& c) {
    cf::Frequency f = build_frequency(c);
    const int d = c.digits;
    phase::PhaseClassifier pc(f, lambda_value(c, c.precision_bits), cf::Schedule::from_name(c.schedule), c.L_min,
                              c.L_max);
    std::size_t depth = std::min<std::size_t>(f.depth(), static_cast<std::size_t>(c.L_max));
    Artifact a;
    a.name = "phase";
    a.table = sweep(theta_values(c, f), {"theta", "verdict", "first_violation_L", "depth_checked", "s_L_at_L_max"},
                    [&](const Theta& t) {
                        phase::PhaseVerdict v = t.lattice ? pc.classify(*t.lattice) : pc.classify(t.value);
                        Cell last = text("");
                        try {
                            phase::PhaseOrbit o = t.lattice ? phase::iterate_phase(f, *t.lattice, depth)
                                                            : phase::iterate_phase(f, t.value, depth);
                            last = num(o.levels.back(), d);
                        } catch (const Error& e) {
                            if (e.code() != ErrorCode::NotInUnitInterval) throw;
                        }
                        Cell first = v.first_violation_L ? integer(*v.first_violation_L) : text("");
                        return std::vector<std::vector<Cell>>{with_theta(
                            t, d, {text(phase::to_string(v.kind)), first, integer(v.depth_checked), last})};
                    });
    a.document = config_document("phase", c);
    return a;
}

Artifact cmd_lyap(const RunConfig& c) {
    cf::Frequency f = build_frequency(c);
    const int d = c.digits;
    cocycle::CocycleKind kind = cocycle_kind(c, cf::cf_value(f, 0, c.precision_bits));
    cocycle::ProductOptions opt;
    opt.bits = c.precision_bits;
    Artifact a;
    a.name = "lyap";
    a.table = sweep(theta_values(c, f), {"theta", "direction", "n", "gamma", "log_lambda"}, [&](const Theta& t) {
        std::vector<std::vector<Cell>> rows;
        for (auto dir : {cocycle::Direction::Forward, cocycle::Direction::Backward}) {
            cocycle::LyapunovEstimate e = cocycle::lyapunov_estimate(kind, t.value, c.horizons, dir, opt);
            for (std::size_t i = 0; i < e.horizons.size(); ++i)
                rows.push_back(with_theta(t, d,
                                          {text(dir == cocycle::Direction::Forward ? "forward" : "backward"),
                                           integer(e.horizons[i]), num(e.values[i], d), num(e.target, d)}));
        }
        return rows;
    });
    a.document = config_document("lyap", c);
    return a;
}

Artifact cmd_trace(const RunConfig& c) {
    cf::Frequency f = build_frequency(c);
    const int d = c.digits;
    cocycle::CocycleKind kind = cocycle_kind(c, cf::cf_value(f, 0, c.precision_bits));
    std::vector<Theta> thetas = theta_values(c, f);
    std::vector<cocycle::GrowthProfile> profiles(thetas.size());
    std::vector<std::string> profile_errors(thetas.size());
    Artifact a;
    a.name = "trace";
    std::vector<std::vector<std::vector<Cell>>> parts(thetas.size());
    parallel_for(thetas.size(), [&](std::size_t i) {
        const Theta& t = thetas[i];
        cocycle::SolutionTrace tr =
            c.weyl ? cocycle::weyl_trace(kind, t.value, c.trace_min, c.trace_max, 64, c.precision_bits)
                   : cocycle::solve_trace(kind, t.value, Complex(1.0, 0.0, c.precision_bits),
                                          Complex(0.0, 0.0, c.precision_bits), c.trace_min, c.trace_max,
                                          c.precision_bits);
        for (std::int64_t n = tr.n_min; n < tr.n_max; ++n)
            parts[i].push_back(with_theta(t, d, {integer(n), num(tr.phi_log_at(n), d)}));
        try {
            profiles[i] = cocycle::growth_profile(tr);
        } catch (const Error& e) {
            profile_errors[i] = e.what();
        }
    });
    a.table.columns = {"theta", "n", "phi_log"};
    for (auto& p : parts)
        for (auto& r : p) a.table.rows.push_back(std::move(r));
    json doc = config_document("trace", c);
    json prof = json::array();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        json p{{"theta", format_real(thetas[i].value, d)}};
        if (profile_errors[i].empty()) {
            p["peak_index"] = profiles[i].peak_index;
            p["rise_slope"] = format_double(profiles[i].rise_slope, d);
            p["fall_slope"] = format_double(profiles[i].fall_slope, d);
            p["turning_detected"] = profiles[i].turning_detected;
        } else {
            p["error"] = profile_errors[i];
        }
        prof.push_back(std::move(p));
    }
    doc["profiles"] = prof;
    a.document = doc;
    return a;
}

Artifact cmd_gordon(const RunConfig& c) {
    cf::Frequency f = build_frequency(c);
    const int d = c.digits;
    cocycle::CocycleKind kind = cocycle_kind(c, cf::cf_value(f, 0, c.precision_bits));
    std::size_t m_max = c.m_list.empty() ? 1 : *std::max_element(c.m_list.begin(), c.m_list.end());
    cf::ConvergentTable table = cf::convergents(f, m_max);
    cocycle::GordonOptions opt;
    opt.bits = c.precision_bits;
    Artifact a;
    a.name = "gordon";
    a.table = sweep(theta_values(c, f),
                    {"theta", "initial_condition", "m", "q_m", "phi0_log", "phi_plus_q_log", "phi_minus_q_log",
                     "phi_plus_2q_log", "phi_minus_2q_log", "ratio"},
                    [&](const Theta& t) {
                        std::vector<std::vector<Cell>> rows;
                        for (const auto& rep : cocycle::gordon_check(kind, t.value, table, c.m_list, opt))
                            for (const auto& e : rep.entries)
                                rows.push_back(with_theta(
                                    t, d,
                                    {text(rep.initial_condition), integer(static_cast<long long>(e.m)), big(e.q),
                                     num(e.phi0_log, d), num(e.phi_plus_q_log, d), num(e.phi_minus_q_log, d),
                                     num(e.phi_plus_2q_log, d), num(e.phi_minus_2q_log, d), num(e.ratio, d)}));
                        return rows;
                    });
    a.document = config_document("gordon", c);
    return a;
}

Artifact cmd_renorm(const RunConfig& c) {
    cf::Frequency f = build_frequency(c);
    const int d = c.digits;
    const Bits bits = c.precision_bits;
    Real omega = cf::cf_value(f, 0, bits);
    Real lam = lambda_value(c, bits);
    Artifact a;
    a.name = "renorm";
    a.table = sweep(theta_values(c, f),
                    {"theta", "k", "k1", "theta1", "residual", "sign", "lhs_log_norm", "rhs_log_norm",
                     "working_bits", "condition_log2"},
                    [&](const Theta& t) {
                        std::vector<std::vector<Cell>> rows;
                        for (std::int64_t k = 1; k <= c.k_max; ++k) {
                            renorm::RenormResidual r = renorm::renorm_residual(lam, omega, t.value, k, bits);
                            rows.push_back(with_theta(
                                t, d,
                                {integer(k), big(r.k1), num(r.theta1, d), num(r.residual, d), integer(r.sign),
                                 num(r.lhs_log_norm, d), num(r.rhs_log_norm, d), integer(r.working_bits),
                                 num(r.condition_log2, d)}));
                        }
                        return rows;
                    });
    a.document = config_document("renorm", c);
    return a;
}

Artifact cmd_cascade(const RunConfig& c) {
    cf::Frequency f = build_frequency(c);
    const int d = c.digits;
    const Bits bits = c.cf_precision_bits;
    Real lam = lambda_value(c, bits);
    std::size_t depth = std::min<std::size_t>(f.depth() - 1, 30);
    Artifact a;
    a.name = "cascade";
    a.table = sweep(theta_values(c, f),
                    {"theta", "j", "k_j", "theta_j", "theta_radius", "omega_j", "omega_gauss", "omega_radius",
                     "log_lambda_j", "short"},
                    [&](const Theta& t) {
                        renorm::Cascade cs = renorm::cascade(f, lam, t.value.at(bits), c.k_max, depth, bits);
                        std::vector<std::vector<Cell>> rows;
                        for (const auto& l : cs.levels)
                            rows.push_back(with_theta(
                                t, d,
                                {integer(static_cast<long long>(l.j)), big(l.k), num(l.theta, d),
                                 num(l.theta_radius, d), num(l.omega, d), num(l.omega_gauss, d),
                                 num(l.omega_radius, d), num(l.log_lambda, d),
                                 integer(cs.first_short_level && l.j >= *cs.first_short_level)}));
                        return rows;
                    });
    a.document = config_document("cascade", c);
    return a;
}

Artifact cmd_badset(const RunConfig& c) {
    cf::Frequency f = build_frequency(c);
    const int d = c.digits;
    Real lam = lambda_value(c, c.precision_bits);
    cf::Schedule sched = cf::Schedule::from_name(c.schedule);
    std::vector<std::optional<phase::BadSetSlice>> parts(c.badset_levels.size());
    parallel_for(parts.size(), [&](std::size_t i) { parts[i] = phase::theta_bad_set(f, lam, sched, c.badset_levels[i]); });
    std::vector<phase::BadSetSlice> slices;
    for (auto& p : parts) slices.push_back(std::move(*p));
    Artifact a{"badset", {{"L", "M", "intervals", "total_measure", "union_bound", "growth_bound"}, {}}, std::nullopt};
    json doc = config_document("badset", c);
    json detail = json::array();
    for (const auto& s : slices) {
        a.table.rows.push_back({integer(s.L), integer(s.M), integer(static_cast<long long>(s.intervals.size())),
                                num(s.total_measure, d), num(s.union_bound, d), num(s.growth_bound, d)});
        json iv = json::array();
        for (std::size_t i = 0; i < s.intervals.size(); ++i)
            iv.push_back({{"k", s.points[i].first},
                          {"l", s.points[i].second},
                          {"center", format_real(s.intervals[i].first, d)},
                          {"radius", format_real(s.intervals[i].second, d)}});
        detail.push_back({{"L", s.L}, {"intervals", iv}});
    }
    doc["levels"] = detail;
    a.document = doc;
    return a;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"cf",    "freq",   "liouville", "phase",   "lyap",
                                                "trace", "gordon", "renorm",    "cascade", "badset"};
    return names;
}

Artifact run_command(std::string_view name, const RunConfig& config) {
    if (name == "cf") return cmd_cf(config);
    if (name == "freq") return cmd_freq(config);
    if (name == "liouville") return cmd_liouville(config);
    if (name == "phase") return cmd_phase(config);
    if (name == "lyap") return cmd_lyap(config);
    if (name == "trace") return cmd_trace(config);
    if (name == "gordon") return cmd_gordon(config);
    if (name == "renorm") return cmd_renorm(config);
    if (name == "cascade") return cmd_cascade(config);
    if (name == "badset") return cmd_badset(config);
    fail(ErrorCode::ValueError, "unknown command '" + std::string(name) + "'");
}

}  // namespace qplab::cli
