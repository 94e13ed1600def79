#include "qplab/cf_core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>

namespace qplab::cf {

namespace {

constexpr Bits kGuardBits = 32;

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

BigInt floor_rat(const BigRat& x) { return floor_div(x.get_num(), x.get_den()); }

BigRat inverse(const BigRat& x) {
    BigRat r;
    mpq_inv(r.get_mpq_t(), x.get_mpq_t());
    return r;
}

BigRat pow2_rat(long k) {
    BigRat r(1);
    if (k >= 0) {
        mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(k));
    } else {
        mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-k));
    }
    return r;
}

// Convergent numerators/denominators of [0; b_1, ..., b_n]: returns
// (p_n, q_n, p_{n-1}, q_{n-1}).
struct Mobius {
    BigInt p, q, p_prev, q_prev;
};

template <class ElementAt>
Mobius convergent_pair(std::size_t n, ElementAt&& b) {
    Mobius m{BigInt(0), BigInt(1), BigInt(1), BigInt(0)};
    for (std::size_t j = 1; j <= n; ++j) {
        const BigInt& a = b(j);
        BigInt p = a * m.p + m.p_prev;
        BigInt q = a * m.q + m.q_prev;
        m.p_prev = std::move(m.p);
        m.q_prev = std::move(m.q);
        m.p = std::move(p);
        m.q = std::move(q);
    }
    return m;
}

double to_log(const Real& x) { return log(x).to_double(); }

// Least-squares slope of y against its index.
double ls_slope(const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    const double den = n * sxx - sx * sx;
    return den == 0 ? 0.0 : (n * sxy - sx * sy) / den;
}

bool trending_down(const std::vector<double>& y) {
    return y.size() >= 2 && ls_slope(y) < 0 && y.back() < y.front();
}

bool trending_up(const std::vector<double>& y) {
    return y.size() >= 2 && ls_slope(y) > 0 && y.back() > y.front();
}

}  // namespace

// ---- Frequency ------------------------------------------------------------

Frequency::Frequency(std::vector<BigInt> elements, Bits precision_bits, std::vector<BigInt> closure)
    : elements_(std::move(elements)), closure_(std::move(closure)), bits_(precision_bits) {
    if (closure_.empty()) fail(ErrorCode::DomainError, "closure block must not be empty");
    for (const auto& a : elements_)
        if (a < 1) fail(ErrorCode::DomainError, "continued fraction elements must be >= 1");
    for (const auto& a : closure_)
        if (a < 1) fail(ErrorCode::DomainError, "closure elements must be >= 1");
    if (bits_ < 16) fail(ErrorCode::DomainError, "precision must be at least 16 bits");
}

Frequency Frequency::golden(std::size_t depth, Bits precision_bits) {
    return Frequency(std::vector<BigInt>(depth, BigInt(1)), precision_bits);
}

Frequency Frequency::periodic(std::vector<BigInt> prefix, std::vector<BigInt> period, std::size_t depth,
                              Bits precision_bits) {
    if (period.empty()) fail(ErrorCode::DomainError, "period must not be empty");
    if (depth < prefix.size()) fail(ErrorCode::DomainError, "depth shorter than the prefix");
    std::vector<BigInt> elems = std::move(prefix);
    std::size_t phase = 0;
    while (elems.size() < depth) {
        elems.push_back(period[phase]);
        phase = (phase + 1) % period.size();
    }
    std::rotate(period.begin(), period.begin() + static_cast<std::ptrdiff_t>(phase), period.end());
    return Frequency(std::move(elems), precision_bits, std::move(period));
}

const BigInt& Frequency::element(std::size_t j) const {
    if (j == 0) fail(ErrorCode::DomainError, "element index is 1-based");
    if (j <= elements_.size()) return elements_[j - 1];
    return closure_[(j - elements_.size() - 1) % closure_.size()];
}

Frequency Frequency::truncated(std::size_t depth) const {
    if (depth > elements_.size()) fail(ErrorCode::InsufficientDepth, "cannot truncate beyond depth");
    return Frequency(std::vector<BigInt>(elements_.begin(), elements_.begin() + static_cast<std::ptrdiff_t>(depth)),
                     bits_, closure_);
}

// ---- expansion ------------------------------------------------------------

Frequency cf_expand_interval(const BigRat& center, const BigRat& radius, std::size_t depth, Bits precision_bits) {
    if (center <= 0 || center >= 1) fail(ErrorCode::DomainError, "value must lie in (0,1)");
    BigRat c = center;
    BigRat lo = center - radius;
    BigRat hi = center + radius;
    std::vector<BigInt> elems;
    elems.reserve(depth);
    for (std::size_t j = 1; j <= depth; ++j) {
        BigRat inv_c = inverse(c);
        BigInt a = floor_rat(inv_c);
        c = inv_c - BigRat(a);
        if (c == 0)
            fail(ErrorCode::RationalInput, "tail vanishes at step " + std::to_string(j));
        if (lo <= 0 || hi >= 1)
            fail(ErrorCode::PrecisionExhausted, "element " + std::to_string(j) + " undecidable at "
                                                    + std::to_string(precision_bits) + " bits");
        BigRat inv_hi = inverse(hi);
        BigRat inv_lo = inverse(lo);
        if (floor_rat(inv_hi) != a || floor_rat(inv_lo) != a)
            fail(ErrorCode::PrecisionExhausted, "element " + std::to_string(j) + " undecidable at "
                                                    + std::to_string(precision_bits) + " bits");
        lo = inv_hi - BigRat(a);
        hi = inv_lo - BigRat(a);
        elems.push_back(std::move(a));
    }
    return Frequency(std::move(elems), precision_bits);
}

Frequency cf_expand(const Real& x, std::size_t depth) {
    const Bits p = x.precision();
    return cf_expand_interval(x.to_rational(), pow2_rat(-static_cast<long>(p)), depth, p);
}

Frequency cf_expand(const std::function<Real(Bits)>& generator, std::size_t depth, Bits start_bits, Bits max_bits) {
    for (Bits bits = start_bits;; bits *= 2) {
        try {
            Frequency f = cf_expand(generator(bits), depth);
            return f.with_precision(start_bits);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PrecisionExhausted || bits * 2 > max_bits) throw;
        }
    }
}

BigRat parse_decimal(std::string_view text) {
    std::size_t i = 0;
    auto bad = [&]() -> BigRat { fail(ErrorCode::ValueError, "malformed decimal '" + std::string(text) + "'"); };
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
    std::string digits;
    long scale = 0;
    bool seen_digit = false, seen_point = false;
    for (; i < text.size(); ++i) {
        char ch = text[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits.push_back(ch);
            seen_digit = true;
            if (seen_point) --scale;
        } else if (ch == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) return bad();
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        std::string ex;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) ex.push_back(text[i++]);
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ex.push_back(text[i++]);
        if (ex.empty() || ex == "+" || ex == "-") return bad();
        scale += std::stol(ex);
    }
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i != text.size()) return bad();
    BigInt num(digits, 10);
    BigInt ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    BigRat r = scale >= 0 ? BigRat(num * ten_pow) : BigRat(num, ten_pow);
    r.canonicalize();
    return negative ? BigRat(-r) : r;
}

Frequency cf_expand_decimal(std::string_view decimal, std::size_t depth, Bits precision_bits) {
    return cf_expand_interval(parse_decimal(decimal), pow2_rat(-static_cast<long>(precision_bits)), depth,
                              precision_bits);
}

// ---- evaluation -------------------------------------------------------------

Real closure_value(const std::vector<BigInt>& block, Bits bits) {
    Mobius m = convergent_pair(block.size(), [&](std::size_t j) -> const BigInt& { return block[j - 1]; });
    // t = (p + t p') / (q + t q')  =>  q' t^2 + (q - p') t - p = 0, positive root.
    Real A(m.q_prev, bits), B(BigInt(m.q - m.p_prev), bits), C(m.p, bits);
    Real disc = sqrt(B * B + 4L * A * C);
    return (2L * C) / (B + disc);
}

Real cf_value(const Frequency& freq, std::size_t level) { return cf_value(freq, level, freq.precision_bits()); }

Real cf_value(const Frequency& freq, std::size_t level, Bits bits) {
    if (level >= freq.depth())
        fail(ErrorCode::InsufficientDepth, "no known element beyond level " + std::to_string(level));
    return tail_value(freq, level, bits);
}

Real tail_value(const Frequency& freq, std::size_t level, Bits bits) {
    if (level >= freq.depth()) {
        // past the known elements the tail is a rotation of the closure block
        const auto& c = freq.closure();
        const std::size_t shift = (level - freq.depth()) % c.size();
        std::vector<BigInt> block(c.begin() + static_cast<std::ptrdiff_t>(shift), c.end());
        block.insert(block.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(shift));
        return closure_value(block, bits + kGuardBits).at(bits);
    }
    const Bits work = bits + kGuardBits;
    Real t = closure_value(freq.closure(), work);
    Mobius m = convergent_pair(freq.depth() - level,
                               [&](std::size_t j) -> const BigInt& { return freq.element(level + j); });
    Real num = Real(m.p, work) + t * Real(m.p_prev, work);
    Real den = Real(m.q, work) + t * Real(m.q_prev, work);
    return (num / den).at(bits);
}

std::vector<Real> tails(const Frequency& freq, std::size_t count) {
    std::vector<Real> out;
    out.reserve(count);
    for (std::size_t L = 0; L < count; ++L) out.push_back(cf_value(freq, L));
    return out;
}

std::pair<BigRat, BigRat> tail_bracket(const Frequency& freq, std::size_t level, std::size_t terms) {
    if (terms == 0) terms = 1;
    Mobius m = convergent_pair(terms, [&](std::size_t j) -> const BigInt& { return freq.element(level + j); });
    BigRat a(m.p, m.q), b(m.p_prev, m.q_prev);
    a.canonicalize();
    b.canonicalize();
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

BigInt floor_times_tail(const Frequency& freq, std::size_t level, const BigInt& k) {
    if (k == 0) return BigInt(0);
    // Successive convergents of omega_level bracket it strictly (the closed
    // number is irrational), so floor(k x) is decided once k*lo and k*hi land
    // in the same unit cell.
    BigInt p_prev(1), q_prev(0), p(0), q(1);
    constexpr std::size_t kMaxTerms = 20000;
    for (std::size_t j = 1; j <= kMaxTerms; ++j) {
        const BigInt& a = freq.element(level + j);
        BigInt pn = a * p + p_prev;
        BigInt qn = a * q + q_prev;
        p_prev = std::move(p);
        q_prev = std::move(q);
        p = std::move(pn);
        q = std::move(qn);
        if (q_prev == 0) continue;
        // bracket endpoints p/q and p_prev/q_prev
        BigInt num_a = k * p, num_b = k * p_prev;
        // k*x lies strictly between num_a/q and num_b/q_prev
        BigInt fa = floor_div(num_a, q), fb = floor_div(num_b, q_prev);
        const bool a_is_lower = num_a * q_prev < num_b * q;
        const BigInt& n = a_is_lower ? fa : fb;
        const BigInt& upper_num = a_is_lower ? num_b : num_a;
        const BigInt& upper_den = a_is_lower ? q_prev : q;
        if (upper_num <= (n + 1) * upper_den) return n;
    }
    fail(ErrorCode::PrecisionExhausted, "floor(k*omega_L) undecided after bracketing");
}

// ---- convergents ------------------------------------------------------------

ConvergentTable convergents(const Frequency& freq, std::size_t L) {
    if (L > freq.depth())
        fail(ErrorCode::InsufficientDepth, "convergent index " + std::to_string(L) + " exceeds depth");
    ConvergentTable table;
    BigInt p_prev(1), q_prev(0), p(0), q(1);
    // Size the working precision so |omega - p/q| keeps full relative accuracy.
    std::vector<std::pair<BigInt, BigInt>> pq{{p, q}};
    for (std::size_t l = 1; l <= L; ++l) {
        const BigInt& a = freq.element(l);
        BigInt pn = a * p + p_prev, qn = a * q + q_prev;
        p_prev = std::move(p);
        q_prev = std::move(q);
        p = std::move(pn);
        q = std::move(qn);
        pq.emplace_back(p, q);
    }
    const Bits bits = freq.precision_bits();
    // err_L ~ 1/(q_L q_{L+1}); q_{L+1} <= (a_{L+1}+1) q_L
    const long qbits = static_cast<long>(mpz_sizeinbase(pq.back().second.get_mpz_t(), 2));
    const long abits = static_cast<long>(mpz_sizeinbase(freq.element(L + 1).get_mpz_t(), 2));
    const Bits work = bits + 2 * qbits + abits + kGuardBits;
    Real omega = freq.depth() > 0 ? cf_value(freq, 0, work) : closure_value(freq.closure(), work);
    for (std::size_t l = 0; l <= L; ++l) {
        const auto& [pl, ql] = pq[l];
        Real err = abs(omega - Real(BigRat(pl, ql), work));
        table.rows.push_back({l, pl, ql, err.at(bits)});
    }
    return table;
}

std::vector<std::string> convergent_violations(const Frequency& freq, const ConvergentTable& table) {
    std::vector<std::string> out;
    const auto& rows = table.rows;
    BigInt prod(1);
    BigRat partial(1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string tag = "row " + std::to_string(r.l) + ": ";
        if (r.l == 0) {
            if (r.q != 1 || r.p != 0) out.push_back(tag + "expected p_0/q_0 = 0/1");
        } else if (r.l == 1) {
            if (r.q != freq.element(1)) out.push_back(tag + "q_1 != a_1");
        } else if (r.q != freq.element(r.l) * rows[i - 1].q + rows[i - 2].q) {
            out.push_back(tag + "three-term recursion for q fails");
        }
        // err_l <= 1 / (a_{l+1} q_l^2)
        const Bits bits = r.err.precision();
        Real bound = 1L / (Real(freq.element(r.l + 1), bits) * Real(BigInt(r.q * r.q), bits));
        if (r.err > bound) out.push_back(tag + "err_l exceeds 1/(a_{l+1} q_l^2)");
        if (r.l >= 1) {
            prod *= freq.element(r.l);
            if (r.l >= 2) {
                partial *= BigRat(freq.element(r.l - 1) * freq.element(r.l) + 1,
                                  freq.element(r.l - 1) * freq.element(r.l));
                partial.canonicalize();
            }
            const bool lower_ok = r.l == 1 ? prod <= r.q : prod < r.q;
            if (!lower_ok) out.push_back(tag + "a_l...a_1 < q_l fails");
            if (BigRat(r.q) > partial * BigRat(prod)) out.push_back(tag + "q_l < P a_l...a_1 fails");
        }
    }
    return out;
}

// ---- ladder -----------------------------------------------------------------

CouplingLadder ladder(const Frequency& freq, const Real& lambda, std::size_t depth) {
    if (!(lambda > 1L)) fail(ErrorCode::DomainError, "lambda must exceed 1");
    if (depth > freq.depth()) fail(ErrorCode::InsufficientDepth, "ladder depth exceeds frequency depth");
    const Bits bits = freq.precision_bits();
    CouplingLadder out{lambda, {}, {}};
    Real log_lambda = log(lambda.at(std::max(bits, lambda.precision())));
    Real beta(1L, bits);
    for (std::size_t L = 0; L <= depth; ++L) {
        if (L > 0) beta *= cf_value(freq, L - 1);
        out.beta_levels.push_back(beta);
        out.log_lambda_levels.push_back((log_lambda / beta).at(bits));
    }
    return out;
}

// ---- frequency classes --------------------------------------------------------

Schedule::Schedule(Kind kind) {
    if (kind == Kind::Half) {
        name_ = "half";
        fn_ = [](long L) { return L / 2; };
    } else {
        name_ = "minus_one";
        fn_ = [](long L) { return L - 1; };
    }
}

Schedule Schedule::custom(std::string name, std::function<long(long)> fn) {
    Schedule s(Kind::Half);
    s.name_ = std::move(name);
    s.fn_ = std::move(fn);
    return s;
}

Schedule Schedule::from_name(std::string_view name) {
    if (name == "half") return half();
    if (name == "minus_one") return minus_one();
    fail(ErrorCode::ValueError, "unknown schedule '" + std::string(name) + "' (expected half|minus_one)");
}

long Schedule::operator()(long L) const { return fn_(L); }

FrequencyClassReport classify_frequency(const Frequency& freq, const Real& lambda, const Schedule& schedule,
                                        std::size_t depth) {
    if (depth > freq.depth()) fail(ErrorCode::InsufficientDepth, "depth exceeds frequency depth");
    if (depth < 2) fail(ErrorCode::InsufficientDepth, "need at least two levels");
    CouplingLadder lad = ladder(freq, lambda, depth);
    std::vector<double> log_omega;
    for (std::size_t L = 0; L < depth; ++L) log_omega.push_back(to_log(cf_value(freq, L)));

    FrequencyClassReport rep;
    rep.schedule = schedule.name();
    double partial = 0.0;
    for (long L = 1; L < static_cast<long>(depth); ++L) {
        const long M = schedule(L);
        if (M >= L || M < 0)
            fail(ErrorCode::ScheduleInvalid, "M(" + std::to_string(L) + ") = " + std::to_string(M));
        FrequencyLevel lv{};
        lv.L = L;
        lv.M = M;
        double tail = 0.0;
        for (long l = M; l < L; ++l) tail += log_omega[static_cast<std::size_t>(l)];
        lv.tail_product_log = tail;
        lv.growth_term_log = lad.log_lambda_levels[static_cast<std::size_t>(M)].to_double() + tail
                             + log_omega[static_cast<std::size_t>(L)];
        partial += std::exp(-lv.growth_term_log);
        lv.good_theta0_partial_sum = partial;
        lv.omega_L_log = log_omega[static_cast<std::size_t>(L)];
        const double pair = log_omega[static_cast<std::size_t>(L - 1)] + log_omega[static_cast<std::size_t>(L)];
        lv.omega1_growth_log = lad.log_lambda_levels[static_cast<std::size_t>(L - 1)].to_double() + pair;
        lv.shifted_growth_log = lad.log_lambda_levels[static_cast<std::size_t>(L)].to_double() + pair;
        rep.levels.push_back(lv);
    }
    const std::size_t n = rep.levels.size();
    rep.window = std::min(n, std::max<std::size_t>(2, (depth + 2) / 3));
    std::vector<double> tail_w, growth_w, omega_w, omega1_w;
    bool above_p_series = true;
    for (std::size_t i = n - rep.window; i < n; ++i) {
        const auto& lv = rep.levels[i];
        tail_w.push_back(lv.tail_product_log);
        growth_w.push_back(lv.growth_term_log);
        omega_w.push_back(lv.omega_L_log);
        omega1_w.push_back(lv.omega1_growth_log);
        if (lv.growth_term_log < 2.0 * std::log(static_cast<double>(lv.L))) above_p_series = false;
    }
    rep.omega_trend_ok = trending_down(tail_w);
    rep.lambda_trend_ok = trending_up(growth_w);
    rep.omega1_ok = trending_down(omega_w) && trending_up(omega1_w);
    rep.summable_ok = rep.lambda_trend_ok && above_p_series;
    return rep;
}

Real khinchin_mean(const Frequency& freq, std::size_t L) {
    if (L == 0 || L > freq.depth()) fail(ErrorCode::InsufficientDepth, "need 1 <= L <= depth");
    const Bits bits = freq.precision_bits();
    Real sum(bits);
    for (std::size_t l = 1; l <= L; ++l) sum += log(Real(freq.element(l), bits));
    return exp(sum / static_cast<long>(L));
}

Frequency random_uniform_frequency(std::uint64_t seed, std::size_t depth, Bits bits) {
    auto generator = [seed](Bits b) {
        std::mt19937_64 rng(seed);
        const std::size_t words = static_cast<std::size_t>((b + 63) / 64);
        BigInt m(0);
        for (std::size_t i = 0; i < words; ++i) {
            m <<= 64;
            const std::uint64_t w = rng();
            m += BigInt(static_cast<unsigned long>(w >> 32)) * BigInt(1UL << 32) + BigInt(static_cast<unsigned long>(w & 0xffffffffUL));
        }
        // keep the leading b bits of the stream; force the value into (0,1)
        const long extra = static_cast<long>(words * 64) - static_cast<long>(b);
        if (extra > 0) m >>= static_cast<mp_bitcnt_t>(extra);
        if (m == 0) m = 1;
        Real x(m, b);
        return ldexp(x, -static_cast<long>(b));
    };
    return cf_expand(generator, depth, bits);
}

Frequency random_bounded_frequency(std::uint64_t seed, std::size_t depth, long max_element, Bits bits) {
    if (max_element < 1) fail(ErrorCode::DomainError, "max_element must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> dist(1, max_element);
    std::vector<BigInt> elems;
    for (std::size_t i = 0; i < depth; ++i) elems.emplace_back(dist(rng));
    return Frequency(std::move(elems), bits);
}

// ---- Liouville numbers --------------------------------------------------------

LiouvilleBuild liouville_build(const Real& lambda, const BigInt& a1, std::size_t levels,
                               const LiouvilleOptions& options) {
    if (!(lambda > 1L)) fail(ErrorCode::DomainError, "lambda must exceed 1");
    if (a1 < 1) fail(ErrorCode::DomainError, "a_1 must be >= 1");
    if (levels == 0) fail(ErrorCode::DomainError, "levels must be >= 1");
    const Bits lam_bits = lambda.precision();
    std::vector<BigInt> elems{a1};
    std::vector<Real> window_log;
    BigInt A = a1;
    Real log_lambda = log(lambda);
    const Real ln2 = log2_const(lam_bits);
    for (std::size_t L = 1; L < levels; ++L) {
        Real logX = Real(A, lam_bits) * log_lambda - log(Real(A, lam_bits));
        window_log.push_back(logX);
        if (logX < log(Real(2L, lam_bits)))
            fail(ErrorCode::WindowEmpty, "X_" + std::to_string(L) + " = exp(" + logX.str(8) + ") < 2");
        const double log2X = (logX / ln2).to_double();
        if (log2X > static_cast<double>(options.max_element_bits))
            fail(ErrorCode::OverflowPolicyExceeded,
                 "a_" + std::to_string(L + 1) + " needs ~" + std::to_string(static_cast<long>(log2X)) + " bits");
        // Relative error of X is about (A log lambda) 2^-lam_bits; decide the floor with that margin.
        const Bits work = lam_bits + static_cast<Bits>(log2X) + 64;
        Real lam_w = lambda.at(work);
        Real X = exp(Real(A, work) * log(lam_w) - log(Real(A, work)));
        BigInt a = floor_to_int(X);
        Real frac_part = X - Real(a, work);
        Real err_bound = X * Real(A, work) * pow2(-static_cast<long>(lam_bits) + 8, work);
        if (frac_part < err_bound || (1L - frac_part) < err_bound)
            fail(ErrorCode::PrecisionExhausted, "floor(X) undecidable; supply lambda with more precision");
        elems.push_back(a);
        A *= a;
    }
    return {Frequency(std::move(elems), std::max<Bits>(256, lam_bits)), std::move(window_log)};
}

LiouvilleReport liouville_verify(const Frequency& freq, const LiouvilleForm& form) {
    if (freq.depth() < 2) fail(ErrorCode::InsufficientDepth, "need at least two convergents");
    ConvergentTable table = convergents(freq, freq.depth());
    LiouvilleReport rep{form.kind, {}};
    double log_lambda = 0.0;
    if (form.kind == LiouvilleForm::Kind::Lambda) {
        if (!(form.lambda > 1L)) fail(ErrorCode::DomainError, "lambda must exceed 1");
        log_lambda = log(form.lambda).to_double();
    }
    for (const auto& row : table.rows) {
        if (row.l == 0) continue;
        const Bits bits = row.err.precision();
        const double err_log = log(row.err).to_double();
        const double q_log = log(Real(row.q, bits)).to_double();
        const double q = Real(row.q, bits).to_double();
        LiouvilleRow out{row.l, row.q, err_log, false, std::numeric_limits<double>::quiet_NaN()};
        if (form.kind == LiouvilleForm::Kind::Lambda) {
            out.c_max = (-q_log - err_log) / (q * log_lambda);
            out.holds = err_log <= -q_log - form.c * q * log_lambda;
        } else {
            out.holds = err_log <= -q * std::log(static_cast<double>(row.l));
        }
        rep.rows.push_back(out);
    }
    return rep;
}

}  // namespace qplab::cf
