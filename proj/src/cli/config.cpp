#include "qplab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace qplab::cli {

using cf::parse_decimal;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
    fail(ErrorCode::SchemaError, path + ": " + what);
}

// Reads a field object, rejecting unknown keys.
class Fields {
public:
    Fields(const json& obj, std::string path, std::vector<std::string> allowed) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) schema(path_.empty() ? "<root>" : path_, "expected an object");
        for (const auto& [key, value] : obj_.items())
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) schema(at(key), "unknown field");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return obj_.contains(key); }
    const json& get(const std::string& key) const { return obj_.at(key); }

private:
    const json& obj_;
    std::string path_;
};

std::string number_text(const json& v, const std::string& path) {
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        try {
            (void)parse_decimal(s);
        } catch (const Error&) {
            schema(path, "'" + s + "' is not a decimal number");
        }
        return s;
    }
    if (v.is_number_integer()) return v.dump();
    if (v.is_number_float()) {
        char buf[64];
        auto r = std::to_chars(buf, buf + sizeof buf, v.get<double>());
        return std::string(buf, r.ptr);
    }
    schema(path, "expected a number or a decimal string");
}

long long integer_value(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema(path, "expected an integer");
    return v.get<long long>();
}

std::size_t count_value(const json& v, const std::string& path) {
    long long x = integer_value(v, path);
    if (x < 0) schema(path, "expected a non-negative integer");
    return static_cast<std::size_t>(x);
}

BigInt big_value(const json& v, const std::string& path) {
    if (v.is_number_integer()) return BigInt(v.dump());
    if (v.is_string()) {
        BigInt b;
        if (b.set_str(v.get<std::string>(), 10) != 0) schema(path, "expected an integer string");
        return b;
    }
    schema(path, "expected an integer");
}

std::vector<BigInt> big_list(const json& v, const std::string& path) {
    if (!v.is_array()) schema(path, "expected an array");
    std::vector<BigInt> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::string p = path + "[" + std::to_string(i) + "]";
        BigInt b = big_value(v[i], p);
        if (b < 1) schema(p, "continued fraction elements must be positive");
        out.push_back(b);
    }
    return out;
}

template <class T>
std::vector<T> int_list(const json& v, const std::string& path) {
    if (!v.is_array()) schema(path, "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(static_cast<T>(integer_value(v[i], path + "[" + std::to_string(i) + "]")));
    return out;
}

json big_json(const BigInt& b) { return b.get_str(); }

json big_list_json(const std::vector<BigInt>& v) {
    json a = json::array();
    for (const auto& b : v) a.push_back(big_json(b));
    return a;
}

void parse_omega(const json& v, FrequencySpec& spec) {
    Fields f(v, "omega", {"cf", "closure", "decimal", "depth", "liouville"});
    int forms = f.has("cf") + f.has("decimal") + f.has("liouville");
    if (forms != 1) schema("omega", "exactly one of cf, decimal, liouville is required");
    if (f.has("cf")) {
        spec.kind = FrequencySpec::Kind::Cf;
        spec.elements = big_list(f.get("cf"), f.at("cf"));
        if (spec.elements.empty()) schema(f.at("cf"), "at least one element is required");
        if (f.has("closure")) {
            spec.closure = big_list(f.get("closure"), f.at("closure"));
            if (spec.closure.empty()) schema(f.at("closure"), "closure block must not be empty");
        }
        if (f.has("depth")) schema(f.at("depth"), "only valid with decimal");
    } else if (f.has("decimal")) {
        spec.kind = FrequencySpec::Kind::Decimal;
        if (!f.get("decimal").is_string()) schema(f.at("decimal"), "expected a decimal string");
        spec.decimal = number_text(f.get("decimal"), f.at("decimal"));
        if (f.has("depth")) spec.depth = count_value(f.get("depth"), f.at("depth"));
        if (spec.depth < 1) schema(f.at("depth"), "depth must be positive");
        if (f.has("closure")) spec.closure = big_list(f.get("closure"), f.at("closure"));
    } else {
        spec.kind = FrequencySpec::Kind::Liouville;
        Fields l(f.get("liouville"), f.at("liouville"), {"lambda", "a1", "levels"});
        for (const char* key : {"lambda", "a1", "levels"})
            if (!l.has(key)) schema(l.at(key), "required");
        spec.liouville_lambda = number_text(l.get("lambda"), l.at("lambda"));
        spec.a1 = big_value(l.get("a1"), l.at("a1"));
        spec.levels = count_value(l.get("levels"), l.at("levels"));
        if (spec.a1 < 1) schema(l.at("a1"), "must be positive");
        if (spec.levels < 1) schema(l.at("levels"), "must be positive");
    }
}

void parse_theta(const json& v, ThetaSpec& spec) {
    if (v.is_number() || v.is_string()) {
        spec.kind = ThetaSpec::Kind::Single;
        spec.value = number_text(v, "theta");
        return;
    }
    Fields f(v, "theta", {"value", "grid", "lattice"});
    if (f.has("value") + f.has("grid") + f.has("lattice") != 1)
        schema("theta", "exactly one of value, grid, lattice is required");
    if (f.has("value")) {
        spec.kind = ThetaSpec::Kind::Single;
        spec.value = number_text(f.get("value"), f.at("value"));
    } else if (f.has("grid")) {
        spec.kind = ThetaSpec::Kind::Grid;
        Fields g(f.get("grid"), f.at("grid"), {"lo", "hi", "count"});
        if (g.has("lo")) spec.lo = number_text(g.get("lo"), g.at("lo"));
        if (g.has("hi")) spec.hi = number_text(g.get("hi"), g.at("hi"));
        if (g.has("count")) spec.count = count_value(g.get("count"), g.at("count"));
        if (spec.count < 1) schema(g.at("count"), "must be positive");
    } else {
        spec.kind = ThetaSpec::Kind::Lattice;
        Fields l(f.get("lattice"), f.at("lattice"), {"k", "l"});
        if (!l.has("k") || !l.has("l")) schema(f.at("lattice"), "k and l are required");
        spec.k = big_value(l.get("k"), l.at("k"));
        spec.l = big_value(l.get("l"), l.at("l"));
    }
}

void check_unit(const std::string& text, const std::string& path) {
    BigRat q = parse_decimal(text);
    if (q < 0 || q > 1) fail(ErrorCode::ValueError, path + ": theta must lie in [0,1]");
}

void validate(const RunConfig& c) {
    if (parse_decimal(c.lambda) <= 1) fail(ErrorCode::ValueError, "lambda must exceed 1");
    if (c.precision_bits < 32 || c.cf_precision_bits < 32)
        fail(ErrorCode::ValueError, "precision must be at least 32 bits");
    if (c.kind != "model" && c.kind != "amo") fail(ErrorCode::ValueError, "kind must be model or amo");
    if (c.format != "csv" && c.format != "json") fail(ErrorCode::ValueError, "format must be csv or json");
    if (c.digits < 1 || c.digits > 60) fail(ErrorCode::ValueError, "digits must lie in [1, 60]");
    (void)cf::Schedule::from_name(c.schedule);
    if (c.L_min < 1 || c.L_max < c.L_min) fail(ErrorCode::ValueError, "phase levels need 1 <= L_min <= L_max");
    if (c.horizons.empty()) fail(ErrorCode::ValueError, "horizons must not be empty");
    for (std::size_t i = 0; i < c.horizons.size(); ++i)
        if (c.horizons[i] < 1 || (i && c.horizons[i] <= c.horizons[i - 1]))
            fail(ErrorCode::ValueError, "horizons must be positive and increasing");
    if (c.trace_min > 0 || c.trace_max < 0) fail(ErrorCode::ValueError, "trace range must contain 0");
    if (c.k_max < 1) fail(ErrorCode::ValueError, "k_max must be positive");
    if (!(c.liouville_c > 0)) fail(ErrorCode::ValueError, "liouville_c must be positive");
    switch (c.theta.kind) {
        case ThetaSpec::Kind::Single: check_unit(c.theta.value, "theta"); break;
        case ThetaSpec::Kind::Grid:
            check_unit(c.theta.lo, "theta.grid.lo");
            check_unit(c.theta.hi, "theta.grid.hi");
            if (parse_decimal(c.theta.hi) < parse_decimal(c.theta.lo))
                fail(ErrorCode::ValueError, "theta.grid: hi below lo");
            break;
        case ThetaSpec::Kind::Lattice: break;
    }
}

}  // namespace

RunConfig default_config() {
    RunConfig c;
    c.omega.kind = FrequencySpec::Kind::Cf;
    c.omega.elements.assign(32, BigInt(1));
    return c;
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::SchemaError, std::string("<root>: malformed JSON: ") + e.what());
    }
    Fields f(doc, "", {"omega", "lambda", "theta", "precision_bits", "cf_precision_bits", "schedule", "horizons",
                       "seed", "kind", "energy", "phase", "trace", "k_max", "m_list", "badset_levels",
                       "liouville_c", "output"});
    RunConfig c;
    if (!f.has("omega")) schema("omega", "required");
    if (!f.has("lambda")) schema("lambda", "required");
    parse_omega(f.get("omega"), c.omega);
    c.lambda = number_text(f.get("lambda"), "lambda");
    if (f.has("theta")) parse_theta(f.get("theta"), c.theta);
    if (f.has("precision_bits")) c.precision_bits = static_cast<Bits>(integer_value(f.get("precision_bits"), "precision_bits"));
    if (f.has("cf_precision_bits"))
        c.cf_precision_bits = static_cast<Bits>(integer_value(f.get("cf_precision_bits"), "cf_precision_bits"));
    if (f.has("schedule")) {
        if (!f.get("schedule").is_string()) schema("schedule", "expected a string");
        c.schedule = f.get("schedule").get<std::string>();
    }
    if (f.has("horizons")) c.horizons = int_list<std::int64_t>(f.get("horizons"), "horizons");
    if (f.has("seed")) {
        const json& s = f.get("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            schema("seed", "expected a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    if (f.has("kind")) {
        if (!f.get("kind").is_string()) schema("kind", "expected a string");
        c.kind = f.get("kind").get<std::string>();
    }
    if (f.has("energy")) c.energy = number_text(f.get("energy"), "energy");
    if (f.has("phase")) {
        Fields p(f.get("phase"), "phase", {"L_min", "L_max"});
        if (p.has("L_min")) c.L_min = static_cast<long>(integer_value(p.get("L_min"), p.at("L_min")));
        if (p.has("L_max")) c.L_max = static_cast<long>(integer_value(p.get("L_max"), p.at("L_max")));
    }
    if (f.has("trace")) {
        Fields t(f.get("trace"), "trace", {"n_min", "n_max", "weyl"});
        if (t.has("n_min")) c.trace_min = integer_value(t.get("n_min"), t.at("n_min"));
        if (t.has("n_max")) c.trace_max = integer_value(t.get("n_max"), t.at("n_max"));
        if (t.has("weyl")) {
            if (!t.get("weyl").is_boolean()) schema(t.at("weyl"), "expected a boolean");
            c.weyl = t.get("weyl").get<bool>();
        }
    }
    if (f.has("k_max")) c.k_max = integer_value(f.get("k_max"), "k_max");
    if (f.has("m_list")) c.m_list = int_list<std::size_t>(f.get("m_list"), "m_list");
    if (f.has("badset_levels")) c.badset_levels = int_list<long>(f.get("badset_levels"), "badset_levels");
    if (f.has("liouville_c")) {
        if (!f.get("liouville_c").is_number()) schema("liouville_c", "expected a number");
        c.liouville_c = f.get("liouville_c").get<double>();
    }
    if (f.has("output")) {
        Fields o(f.get("output"), "output", {"dir", "format", "digits"});
        if (o.has("dir")) {
            if (!o.get("dir").is_string()) schema(o.at("dir"), "expected a string");
            c.out_dir = o.get("dir").get<std::string>();
        }
        if (o.has("format")) {
            if (!o.get("format").is_string()) schema(o.at("format"), "expected a string");
            c.format = o.get("format").get<std::string>();
        }
        if (o.has("digits")) c.digits = static_cast<int>(integer_value(o.get("digits"), o.at("digits")));
    }
    validate(c);
    cf::Frequency freq = build_frequency(c);
    if (c.theta.kind == ThetaSpec::Kind::Lattice) (void)theta_values(c, freq);
    return c;
}

json to_json(const RunConfig& c) {
    json j;
    json om;
    switch (c.omega.kind) {
        case FrequencySpec::Kind::Cf:
            om["cf"] = big_list_json(c.omega.elements);
            om["closure"] = big_list_json(c.omega.closure);
            break;
        case FrequencySpec::Kind::Decimal:
            om["decimal"] = c.omega.decimal;
            om["depth"] = c.omega.depth;
            om["closure"] = big_list_json(c.omega.closure);
            break;
        case FrequencySpec::Kind::Liouville:
            om["liouville"] = {{"lambda", c.omega.liouville_lambda}, {"a1", big_json(c.omega.a1)},
                               {"levels", c.omega.levels}};
            break;
    }
    j["omega"] = om;
    j["lambda"] = c.lambda;
    switch (c.theta.kind) {
        case ThetaSpec::Kind::Single: j["theta"] = {{"value", c.theta.value}}; break;
        case ThetaSpec::Kind::Grid:
            j["theta"] = {{"grid", {{"lo", c.theta.lo}, {"hi", c.theta.hi}, {"count", c.theta.count}}}};
            break;
        case ThetaSpec::Kind::Lattice:
            j["theta"] = {{"lattice", {{"k", big_json(c.theta.k)}, {"l", big_json(c.theta.l)}}}};
            break;
    }
    j["precision_bits"] = c.precision_bits;
    j["cf_precision_bits"] = c.cf_precision_bits;
    j["schedule"] = c.schedule;
    j["horizons"] = c.horizons;
    j["seed"] = c.seed;
    j["kind"] = c.kind;
    j["energy"] = c.energy;
    j["phase"] = {{"L_min", c.L_min}, {"L_max", c.L_max}};
    j["trace"] = {{"n_min", c.trace_min}, {"n_max", c.trace_max}, {"weyl", c.weyl}};
    j["k_max"] = c.k_max;
    j["m_list"] = c.m_list;
    j["badset_levels"] = c.badset_levels;
    j["liouville_c"] = c.liouville_c;
    j["output"] = {{"dir", c.out_dir}, {"format", c.format}, {"digits", c.digits}};
    return j;
}

cf::Frequency build_frequency(const RunConfig& c) {
    const Bits bits = c.cf_precision_bits;
    switch (c.omega.kind) {
        case FrequencySpec::Kind::Cf: return cf::Frequency(c.omega.elements, bits, c.omega.closure);
        case FrequencySpec::Kind::Decimal: {
            cf::Frequency f = cf::cf_expand_decimal(c.omega.decimal, c.omega.depth, bits);
            return cf::Frequency(f.elements(), bits, c.omega.closure);
        }
        case FrequencySpec::Kind::Liouville: {
            // the exponent a_1 ... a_L needs lambda to matching precision
            for (Bits b = bits;; b *= 2) {
                try {
                    Real lam = Real::parse(c.omega.liouville_lambda, b);
                    cf::LiouvilleBuild built = cf::liouville_build(lam, c.omega.a1, c.omega.levels);
                    return built.freq.with_precision(bits);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::PrecisionExhausted || b >= (1 << 16)) throw;
                }
            }
        }
    }
    fail(ErrorCode::SchemaError, "omega: unknown form");
}

Real lambda_value(const RunConfig& c, Bits bits) { return Real(parse_decimal(c.lambda), bits); }

std::vector<Theta> theta_values(const RunConfig& c, const cf::Frequency& freq) {
    const Bits bits = c.precision_bits;
    std::vector<Theta> out;
    switch (c.theta.kind) {
        case ThetaSpec::Kind::Single: out.push_back({Real(parse_decimal(c.theta.value), bits), std::nullopt}); break;
        case ThetaSpec::Kind::Grid: {
            BigRat lo = parse_decimal(c.theta.lo), hi = parse_decimal(c.theta.hi);
            for (std::size_t i = 0; i < c.theta.count; ++i) {
                BigRat t = c.theta.count == 1 ? lo : lo + (hi - lo) * BigRat(static_cast<long>(i)) /
                                                            BigRat(static_cast<long>(c.theta.count - 1));
                out.push_back({Real(t, bits), std::nullopt});
            }
            break;
        }
        case ThetaSpec::Kind::Lattice: {
            const BigInt& k = c.theta.k;
            const BigInt& l = c.theta.l;
            bool at_one = k == 1 && l == 0;
            if (!at_one && !phase::in_unit_interval(freq, 0, k, l))
                fail(ErrorCode::ValueError, "theta: k + l omega must lie in [0,1]");
            Real w = cf::cf_value(freq, 0, bits + 64);
            out.push_back({(Real(k, bits + 64) + Real(l, bits + 64) * w).at(bits), phase::LatticePoint{k, l}});
            break;
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Theta& a, const Theta& b) { return a.value < b.value; });
    return out;
}

}  // namespace qplab::cli
