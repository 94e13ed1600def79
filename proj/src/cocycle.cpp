#include "qplab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qplab::cocycle {

namespace {

constexpr Bits kArgGuard = 16;

bool odd_integer(const Real& n) {
    if (mpfr_fits_slong_p(n.raw(), MPFR_RNDN)) return (mpfr_get_si(n.raw(), MPFR_RNDN) & 1L) != 0;
    if (n.exponent() > n.precision()) return false;
    return mpz_odd_p(floor_to_int(n).get_mpz_t()) != 0;
}

// Reusable buffers for sin(pi x), cos(pi x) with exact reduction by the
// nearest integer; avoids allocation inside long products.
class TrigPi {
public:
    explicit TrigPi(Bits bits)
        : pi_(pi(bits + kArgGuard)), n_(bits), r_(bits), arg_(bits + kArgGuard) {}

    void sin_into(Real& out, const Real& x) { eval(out, x, true); }
    void cos_into(Real& out, const Real& x) { eval(out, x, false); }

private:
    void eval(Real& out, const Real& x, bool sine) {
        if (n_.precision() < x.precision()) {
            n_ = Real(x.precision());
            r_ = Real(x.precision());
        }
        mpfr_rint(n_.raw(), x.raw(), MPFR_RNDN);
        mpfr_sub(r_.raw(), x.raw(), n_.raw(), MPFR_RNDN);
        if (r_.is_zero()) {
            if (sine)
                mpfr_set_zero(out.raw(), 1);
            else
                mpfr_set_si(out.raw(), 1, MPFR_RNDN);
        } else {
            mpfr_mul(arg_.raw(), r_.raw(), pi_.raw(), MPFR_RNDN);
            if (sine)
                mpfr_sin(out.raw(), arg_.raw(), MPFR_RNDN);
            else
                mpfr_cos(out.raw(), arg_.raw(), MPFR_RNDN);
        }
        if (odd_integer(n_)) mpfr_neg(out.raw(), out.raw(), MPFR_RNDN);
    }

    Real pi_, n_, r_, arg_;
};

// Evaluates the cocycle along sites theta + j omega.
class Sites {
public:
    Sites(const CocycleKind& kind, const Real& theta, Bits bits)
        : kind_(kind), theta_(theta.at(bits + kArgGuard)), omega_(kind.omega.at(bits + kArgGuard)),
          x_(bits + kArgGuard), trig_(bits + kArgGuard), s_(bits), c_(bits), coef_(bits), bits_(bits) {
        if (kind.type == CocycleKind::Type::Model) {
            // lambda * 2 e^{i pi omega / 2}
            Complex ph = Complex::polar_pi(kind.omega.at(bits + kArgGuard) / 2L);
            coef_ = Complex(ph.re * kind.lambda * 2L, ph.im * kind.lambda * 2L).at(bits);
        }
        two_lambda_ = (kind.lambda * 2L).at(bits);
    }

    void site(std::int64_t j) {
        mpfr_mul_si(x_.raw(), omega_.raw(), static_cast<long>(j), MPFR_RNDN);
        mpfr_add(x_.raw(), x_.raw(), theta_.raw(), MPFR_RNDN);
    }
    const Real& x() const { return x_; }

    /// a(x) at the current site (companion kinds).
    void potential_into(Complex& a) {
        if (kind_.type == CocycleKind::Type::Model) {
            trig_.sin_into(s_, x_);
            mpfr_mul(a.re.raw(), coef_.re.raw(), s_.raw(), MPFR_RNDN);
            mpfr_mul(a.im.raw(), coef_.im.raw(), s_.raw(), MPFR_RNDN);
        } else {
            Real x2 = x_ * 2L;
            trig_.cos_into(c_, x2);
            mpfr_mul(a.re.raw(), two_lambda_.raw(), c_.raw(), MPFR_RNDN);
            mpfr_sub(a.re.raw(), kind_.energy.raw(), a.re.raw(), MPFR_RNDN);
            mpfr_set_zero(a.im.raw(), 1);
        }
    }

    Mat2C matrix() {
        if (kind_.companion()) {
            Complex a(bits_);
            potential_into(a);
            return Mat2C(a, Complex(-1.0, 0.0, bits_), Complex(1.0, 0.0, bits_), Complex(bits_));
        }
        trig_.sin_into(s_, x_);
        Complex e = Complex::polar_pi(x_).at(bits_);
        return Mat2C(Complex(two_lambda_ * s_, Real(bits_)), -e.conj(), e, Complex(bits_));
    }

private:
    const CocycleKind& kind_;
    Real theta_, omega_, x_;
    TrigPi trig_;
    Real s_, c_;
    Complex coef_;
    Real two_lambda_;
    Bits bits_;
};

void renormalise(ScaledProduct& p, long window) {
    const long e = p.matrix.max_exponent();
    if (e > window || e < -window) {
        p.matrix.scale2(-e);
        p.exponent += e;
    }
}

// P <- C P with C = ((a, -1), (1, 0)).
void companion_left(Mat2C& P, const Complex& a, Complex& t) {
    mul_into(t, a, P.a);
    t -= P.c;
    swap(P.c, P.a);
    swap(P.a, t);
    mul_into(t, a, P.b);
    t -= P.d;
    swap(P.d, P.b);
    swap(P.b, t);
}

// P <- C^{-1} P with C^{-1} = ((0, 1), (-1, a)).
void companion_inverse_left(Mat2C& P, const Complex& a, Complex& t) {
    mul_into(t, a, P.c);
    t -= P.a;
    swap(P.a, P.c);
    swap(P.c, t);
    mul_into(t, a, P.d);
    t -= P.b;
    swap(P.b, P.d);
    swap(P.d, t);
}

// Incremental product along consecutive sites.
class Stepper {
public:
    Stepper(const CocycleKind& kind, const Real& theta, const ProductOptions& opt)
        : sites_(kind, theta, opt.bits), kind_(kind), opt_(opt), a_(opt.bits), t_(opt.bits) {
        prod_.matrix = Mat2C::identity(opt.bits);
        tol_ = pow2(-opt.bits / 2, 64);
    }

    void forward_site(std::int64_t j) {
        sites_.site(j);
        if (kind_.companion()) {
            sites_.potential_into(a_);
            companion_left(prod_.matrix, a_, t_);
        } else {
            prod_.matrix = sites_.matrix() * prod_.matrix;
        }
        finish();
    }

    void inverse_site(std::int64_t j) {
        sites_.site(j);
        if (kind_.companion()) {
            sites_.potential_into(a_);
            companion_inverse_left(prod_.matrix, a_, t_);
        } else {
            prod_.matrix = sites_.matrix().inverse(tol_) * prod_.matrix;
        }
        finish();
    }

    const ScaledProduct& result() const { return prod_; }

private:
    void finish() {
        ++prod_.factor_count;
        renormalise(prod_, opt_.window);
    }

    Sites sites_;
    const CocycleKind& kind_;
    ProductOptions opt_;
    ScaledProduct prod_;
    Complex a_, t_;
    Real tol_;
};

}  // namespace

// ---- Mat2C ----------------------------------------------------------------------

Mat2C Mat2C::identity(Bits bits) {
    return Mat2C(Complex(1.0, 0.0, bits), Complex(bits), Complex(bits), Complex(1.0, 0.0, bits));
}

Complex Mat2C::det() const { return a * d - b * c; }

Mat2C Mat2C::inverse(const Real& tol) const {
    Complex dt = det();
    if (!(dt.abs() >= tol)) fail(ErrorCode::SingularInverse, "determinant below tolerance");
    Complex one(1.0, 0.0, precision());
    Complex r = one / dt;
    return Mat2C(d * r, -(b * r), -(c * r), a * r);
}

Real Mat2C::frobenius() const { return sqrt(a.norm2() + b.norm2() + c.norm2() + d.norm2()); }

Real Mat2C::norm() const {
    Real f2 = a.norm2() + b.norm2() + c.norm2() + d.norm2();
    Real ad = det().abs() * 2L;
    Real lo = f2 - ad;
    if (lo.sign() < 0) lo = Real(f2.precision());  // F^2 >= 2|det| exactly; only rounding can flip it
    return sqrt((f2 + sqrt(lo * (f2 + ad))) / 2L);
}

long Mat2C::max_exponent() const {
    return std::max({a.exponent(), b.exponent(), c.exponent(), d.exponent()});
}

void Mat2C::scale2(long e) {
    for (Complex* z : {&a, &b, &c, &d}) {
        mpfr_mul_2si(z->re.raw(), z->re.raw(), e, MPFR_RNDN);
        mpfr_mul_2si(z->im.raw(), z->im.raw(), e, MPFR_RNDN);
    }
}

Mat2C operator*(const Mat2C& x, const Mat2C& y) {
    const Bits bits = std::max(x.precision(), y.precision());
    Mat2C r(bits);
    Real t(bits);
    mul_add_into(r.a, x.a, y.a, x.b, y.c, t);
    mul_add_into(r.b, x.a, y.b, x.b, y.d, t);
    mul_add_into(r.c, x.c, y.a, x.d, y.c, t);
    mul_add_into(r.d, x.c, y.b, x.d, y.d, t);
    return r;
}

Mat2C operator+(const Mat2C& x, const Mat2C& y) { return Mat2C(x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d); }
Mat2C operator-(const Mat2C& x, const Mat2C& y) { return Mat2C(x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d); }

// ---- kinds --------------------------------------------------------------------------

CocycleKind CocycleKind::model(const Real& lambda, const Real& omega) {
    return {Type::Model, lambda, omega, Real(lambda.precision())};
}

CocycleKind CocycleKind::amo(const Real& lambda, const Real& omega, const Real& energy) {
    return {Type::Amo, lambda, omega, energy};
}

CocycleKind CocycleKind::renorm_gauge(const Real& lambda, const Real& omega) {
    return {Type::RenormGauge, lambda, omega, Real(lambda.precision())};
}

std::string CocycleKind::name() const {
    switch (type) {
        case Type::Model: return "model";
        case Type::Amo: return "amo";
        case Type::RenormGauge: return "renorm_gauge";
    }
    return "model";
}

Mat2C transfer_matrix(const CocycleKind& kind, const Real& x, Bits bits) {
    Sites s(kind, x, bits);
    s.site(0);
    return s.matrix();
}

Complex potential(const CocycleKind& kind, const Real& x, Bits bits) {
    if (!kind.companion()) fail(ErrorCode::DomainError, "the gauge cocycle has no companion potential");
    Sites s(kind, x, bits);
    s.site(0);
    Complex a(bits);
    s.potential_into(a);
    return a;
}

// ---- products -----------------------------------------------------------------------

Real ScaledProduct::log_scale() const {
    return Real(static_cast<long>(exponent), matrix.precision()) * log2_const(matrix.precision());
}

Real ScaledProduct::log_norm() const { return log_scale() + log(matrix.norm()); }

ScaledProduct cocycle_segment(const CocycleKind& kind, const Real& theta, std::int64_t first, std::int64_t count,
                              const ProductOptions& options) {
    if (count < 0) fail(ErrorCode::DomainError, "segment length must be >= 0");
    Stepper st(kind, theta, options);
    for (std::int64_t j = first; j < first + count; ++j) st.forward_site(j);
    return st.result();
}

ScaledProduct cocycle_product(const CocycleKind& kind, const Real& theta, std::int64_t n, Direction direction,
                              const ProductOptions& options) {
    if (n < 1) fail(ErrorCode::DomainError, "product length must be >= 1");
    if (direction == Direction::Forward) return cocycle_segment(kind, theta, 0, n, options);
    Stepper st(kind, theta, options);
    for (std::int64_t j = 1; j <= n; ++j) st.inverse_site(-j);
    return st.result();
}

ScaledProduct compose(const ScaledProduct& left, const ScaledProduct& right, const ProductOptions& options) {
    ScaledProduct p;
    p.matrix = left.matrix * right.matrix;
    p.exponent = left.exponent + right.exponent;
    p.factor_count = left.factor_count + right.factor_count;
    renormalise(p, options.window);
    return p;
}

LyapunovEstimate lyapunov_estimate(const CocycleKind& kind, const Real& theta, const std::vector<std::int64_t>& horizons,
                                   Direction direction, const ProductOptions& options) {
    if (horizons.empty()) fail(ErrorCode::DomainError, "no horizons given");
    if (!std::is_sorted(horizons.begin(), horizons.end()) || horizons.front() < 1)
        fail(ErrorCode::DomainError, "horizons must be positive and ascending");
    LyapunovEstimate est{direction, horizons, {}, log(kind.lambda)};
    Stepper st(kind, theta, options);
    std::int64_t done = 0;
    for (std::int64_t h : horizons) {
        for (; done < h; ++done) {
            if (direction == Direction::Forward)
                st.forward_site(done);
            else
                st.inverse_site(-(done + 1));
        }
        const ScaledProduct& p = st.result();
        est.values.push_back(p.log_norm() / static_cast<long>(h));
    }
    return est;
}

// ---- traces ---------------------------------------------------------------------------

Complex SolutionTrace::psi_at(std::int64_t n) const { return psi.at(static_cast<std::size_t>(n - n_min)); }
std::int64_t SolutionTrace::scale_at(std::int64_t n) const { return scale.at(static_cast<std::size_t>(n - n_min)); }
double SolutionTrace::phi_log_at(std::int64_t n) const { return phi_log.at(static_cast<std::size_t>(n - n_min)); }

double SolutionTrace::log_abs_psi(std::int64_t n) const {
    const Complex z = psi_at(n);
    if (z.is_zero()) return -std::numeric_limits<double>::infinity();
    return log(z.abs()).to_double() + static_cast<double>(scale_at(n)) * std::log(2.0);
}

namespace {

// Runs psi(n -/+ 1) = a(x_n) psi(n) - psi(n +/- 1) and stores every value.
void run_recursion(const CocycleKind& kind, const Real& theta, Bits bits, SolutionTrace& tr, std::int64_t n_start,
                   const Complex& psi_start, const Complex& psi_beside, std::int64_t n_stop, int step,
                   std::int64_t scale0 = 0) {
    // psi_start = psi(n_start), psi_beside = psi(n_start - step); iterate while n != n_stop
    Sites sites(kind, theta, bits);
    Complex cur = psi_start.at(bits), other = psi_beside.at(bits), a(bits), t(bits);
    std::int64_t E = scale0;
    auto store = [&](std::int64_t n, const Complex& v) {
        if (n < tr.n_min || n > tr.n_max) return;
        const auto i = static_cast<std::size_t>(n - tr.n_min);
        tr.psi[i] = v;
        tr.scale[i] = E;
    };
    store(n_start, cur);
    for (std::int64_t n = n_start; n != n_stop; n += step) {
        sites.site(n);
        sites.potential_into(a);
        mul_into(t, a, cur);
        t -= other;
        swap(other, cur);
        swap(cur, t);
        const long e = std::max(cur.exponent(), other.exponent());
        if (e > 8 || e < -8) {
            for (Complex* z : {&cur, &other}) {
                mpfr_mul_2si(z->re.raw(), z->re.raw(), -e, MPFR_RNDN);
                mpfr_mul_2si(z->im.raw(), z->im.raw(), -e, MPFR_RNDN);
            }
            E += e;
        }
        store(n + step, cur);
    }
}

void fill_phi(SolutionTrace& tr) {
    tr.phi_log.clear();
    const double ln2 = std::log(2.0);
    for (std::int64_t n = tr.n_min; n < tr.n_max; ++n) {
        const auto i = static_cast<std::size_t>(n - tr.n_min);
        const std::int64_t s = std::max(tr.scale[i], tr.scale[i + 1]);
        Real u = tr.psi[i].norm2(), v = tr.psi[i + 1].norm2();
        u = ldexp(u, 2 * static_cast<long>(tr.scale[i] - s));
        v = ldexp(v, 2 * static_cast<long>(tr.scale[i + 1] - s));
        Real sum = u + v;
        tr.phi_log.push_back(sum.is_zero() ? -std::numeric_limits<double>::infinity()
                                           : log(sum).to_double() / 2 + static_cast<double>(s) * ln2);
    }
}

SolutionTrace empty_trace(std::int64_t n_min, std::int64_t n_max, Bits bits) {
    if (n_min > n_max) fail(ErrorCode::DomainError, "empty trace range");
    SolutionTrace tr;
    tr.n_min = n_min;
    tr.n_max = n_max;
    tr.psi.assign(static_cast<std::size_t>(n_max - n_min + 1), Complex(bits));
    tr.scale.assign(tr.psi.size(), 0);
    return tr;
}

}  // namespace

SolutionTrace solve_trace(const CocycleKind& kind, const Real& theta, const Complex& psi0, const Complex& psi1,
                          std::int64_t n_min, std::int64_t n_max, Bits bits) {
    if (!kind.companion()) fail(ErrorCode::DomainError, "traces need a companion-form cocycle");
    if (n_min > 0 || n_max < 1) fail(ErrorCode::DomainError, "trace range must contain 0 and 1");
    if (psi0.is_zero() && psi1.is_zero()) fail(ErrorCode::DomainError, "initial data must not vanish");
    SolutionTrace tr = empty_trace(n_min, n_max, bits);
    // forward from n = 1 (psi(0) beside it), backward from n = 0 (psi(1) beside it)
    run_recursion(kind, theta, bits, tr, 1, psi1, psi0, n_max, +1);
    run_recursion(kind, theta, bits, tr, 0, psi0, psi1, n_min, -1);
    fill_phi(tr);
    return tr;
}

SolutionTrace weyl_trace(const CocycleKind& kind, const Real& theta, std::int64_t n_min, std::int64_t n_max,
                         std::int64_t padding, Bits bits) {
    if (!kind.companion()) fail(ErrorCode::DomainError, "traces need a companion-form cocycle");
    if (padding < 0) fail(ErrorCode::DomainError, "padding must be >= 0");
    SolutionTrace tr = empty_trace(n_min, n_max, bits);
    const std::int64_t N = n_max + padding;
    run_recursion(kind, theta, bits, tr, N, Complex(1.0, 0.0, bits), Complex(bits), n_min, -1);
    fill_phi(tr);
    if (n_min <= 0 && 0 < n_max) {
        // divide by phi(0) so that it equals 1
        const auto i0 = static_cast<std::size_t>(-n_min);
        const std::int64_t s = std::max(tr.scale[i0], tr.scale[i0 + 1]);
        Real u = ldexp(tr.psi[i0].norm2(), 2 * static_cast<long>(tr.scale[i0] - s));
        Real v = ldexp(tr.psi[i0 + 1].norm2(), 2 * static_cast<long>(tr.scale[i0 + 1] - s));
        Real phi0 = sqrt(u + v);
        for (std::size_t i = 0; i < tr.psi.size(); ++i) {
            tr.psi[i].re /= phi0;
            tr.psi[i].im /= phi0;
            tr.scale[i] -= s;
        }
        fill_phi(tr);
    }
    return tr;
}

double trace_residual(const SolutionTrace& tr, const CocycleKind& kind, const Real& theta, Bits bits) {
    Sites sites(kind, theta, bits);
    Complex a(bits);
    double worst = 0;
    for (std::int64_t n = tr.n_min + 1; n < tr.n_max; ++n) {
        const auto i = static_cast<std::size_t>(n - tr.n_min);
        const std::int64_t s = std::max({tr.scale[i - 1], tr.scale[i], tr.scale[i + 1]});
        auto bring = [&](std::size_t j) {
            Complex z = tr.psi[j];
            z.re = ldexp(z.re, static_cast<long>(tr.scale[j] - s));
            z.im = ldexp(z.im, static_cast<long>(tr.scale[j] - s));
            return z;
        };
        Complex lo = bring(i - 1), mid = bring(i), hi = bring(i + 1);
        sites.site(n);
        sites.potential_into(a);
        Complex am = a * mid;
        Real num = (hi + lo - am).abs();
        Real den = hi.abs() + lo.abs() + am.abs();
        if (!den.is_zero()) worst = std::max(worst, (num / den).to_double());
    }
    return worst;
}

std::vector<GordonReport> gordon_check(const CocycleKind& kind, const Real& theta, const cf::ConvergentTable& table,
                                       const std::vector<std::size_t>& m_list, const GordonOptions& options) {
    if (m_list.empty()) fail(ErrorCode::DomainError, "no m requested");
    BigInt q_max(0);
    for (std::size_t m : m_list) {
        if (m == 0 || m >= table.rows.size())
            fail(ErrorCode::InsufficientDepth, "no convergent q_" + std::to_string(m) + " in the table");
        q_max = std::max(q_max, table.rows[m].q);
    }
    if (q_max * 4 + 2 > options.max_sites)
        fail(ErrorCode::HorizonTooLarge, "2 q_m = " + BigInt(q_max * 2).get_str() + " exceeds the trace budget");
    const std::int64_t Q = q_max.get_si();
    const Bits bits = options.bits;
    std::vector<GordonReport> out;
    const std::pair<const char*, std::pair<double, double>> ics[] = {{"psi0=1,psi1=0", {1.0, 0.0}},
                                                                     {"psi0=0,psi1=1", {0.0, 1.0}}};
    for (const auto& [name, ic] : ics) {
        SolutionTrace tr = solve_trace(kind, theta, Complex(ic.first, 0.0, bits), Complex(ic.second, 0.0, bits),
                                       -2 * Q, 2 * Q + 1, bits);
        GordonReport rep{name, {}};
        const double p0 = tr.phi_log_at(0);
        for (std::size_t m : m_list) {
            const std::int64_t q = table.rows[m].q.get_si();
            GordonEntry e{m, table.rows[m].q, tr.phi_log_at(q), tr.phi_log_at(-q), tr.phi_log_at(2 * q),
                          tr.phi_log_at(-2 * q), p0, 0.0};
            const double best = std::max({e.phi_plus_q_log, e.phi_minus_q_log, e.phi_plus_2q_log, e.phi_minus_2q_log});
            e.ratio = std::exp(best - p0);
            rep.entries.push_back(e);
        }
        out.push_back(std::move(rep));
    }
    return out;
}

// ---- growth profile -----------------------------------------------------------------------

namespace {

struct LineFit {
    double slope = 0;
    double sse = 0;
};

LineFit fit_line(const std::vector<double>& y, std::size_t lo, std::size_t hi) {
    const double n = static_cast<double>(hi - lo + 1);
    double mx = 0, my = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
        mx += static_cast<double>(i);
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double dx = static_cast<double>(i) - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.sse = std::max(0.0, syy - f.slope * sxy);
    return f;
}

}  // namespace

GrowthProfile growth_profile(const std::vector<double>& y, std::int64_t first_index) {
    if (y.size() < 16) fail(ErrorCode::TraceTooShort, "growth profile needs at least 16 sites");
    for (double v : y)
        if (!std::isfinite(v)) fail(ErrorCode::DomainError, "phi_log contains a non-finite value");
    const std::size_t N = y.size();
    GrowthProfile best;
    std::size_t best_p = 0;
    bool have = false;
    for (std::size_t p = 1; p + 1 < N; ++p) {
        LineFit a = fit_line(y, 0, p), b = fit_line(y, p, N - 1);
        const double sse = a.sse + b.sse;
        if (!have || sse < best.sse - 1e-12 * (1.0 + best.sse)) {
            have = true;
            best_p = p;
            best.sse = sse;
            best.rise_slope = a.slope;
            best.fall_slope = b.slope;
        }
    }
    best.peak_index = first_index + static_cast<std::int64_t>(best_p);
    best.turning_detected = best.rise_slope > 0 && best.fall_slope < 0 && best_p >= 4 && N - 1 - best_p >= 4;
    return best;
}

GrowthProfile growth_profile(const SolutionTrace& trace) { return growth_profile(trace.phi_log, trace.n_min); }

}  // namespace qplab::cocycle
