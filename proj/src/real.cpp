#include "qplab/real.hpp"
#include "qplab/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qplab {

Real Real::parse(std::string_view text, Bits bits) {
    Real r(bits);
    std::string s(text);
    char* end = nullptr;
    if (!s.empty()) mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
    if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return r;
}

std::string Real::str(int digits) const {
    if (!is_finite()) return mpfr_nan_p(v_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
    std::vector<char> buf(static_cast<size_t>(digits) + 32);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, v_);
    return std::string(buf.data());
}

BigRat Real::to_rational() const {
    if (is_zero()) return BigRat(0);
    if (!is_finite()) fail(ErrorCode::DomainError, "non-finite value has no rational form");
    BigInt m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
    BigRat q(m);
    if (e >= 0) {
        mpz_mul_2exp(q.get_num_mpz_t(), q.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
    } else {
        mpz_mul_2exp(q.get_den_mpz_t(), q.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    }
    q.canonicalize();
    return q;
}

Real abs(const Real& x) { Real r(x.precision()); mpfr_abs(r.raw(), x.raw(), MPFR_RNDN); return r; }
Real sqrt(const Real& x) { Real r(x.precision()); mpfr_sqrt(r.raw(), x.raw(), MPFR_RNDN); return r; }
Real log(const Real& x) { Real r(x.precision()); mpfr_log(r.raw(), x.raw(), MPFR_RNDN); return r; }
Real exp(const Real& x) { Real r(x.precision()); mpfr_exp(r.raw(), x.raw(), MPFR_RNDN); return r; }
Real sin(const Real& x) { Real r(x.precision()); mpfr_sin(r.raw(), x.raw(), MPFR_RNDN); return r; }
Real cos(const Real& x) { Real r(x.precision()); mpfr_cos(r.raw(), x.raw(), MPFR_RNDN); return r; }
Real floor(const Real& x) { Real r(x.precision()); mpfr_floor(r.raw(), x.raw()); return r; }

Real frac(const Real& x) {
    // mpfr_frac keeps the sign of x; shift negatives into [0,1).
    Real r(x.precision());
    mpfr_frac(r.raw(), x.raw(), MPFR_RNDN);
    if (r.sign() < 0) {
        r += 1L;
        if (r == 1L) r = Real(x.precision());
    }
    return r;
}

BigInt round_to_int(const Real& x) {
    BigInt z;
    mpfr_get_z(z.get_mpz_t(), x.raw(), MPFR_RNDNA);
    return z;
}

BigInt floor_to_int(const Real& x) {
    BigInt z;
    mpfr_get_z(z.get_mpz_t(), x.raw(), MPFR_RNDD);
    return z;
}

Real ldexp(const Real& x, long e) {
    Real r(x.precision());
    mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
    return r;
}

Real pi(Bits bits) { Real r(bits); mpfr_const_pi(r.raw(), MPFR_RNDN); return r; }
Real log2_const(Bits bits) { Real r(bits); mpfr_const_log2(r.raw(), MPFR_RNDN); return r; }
Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }

Real pow2(long k, Bits bits) {
    Real r(1L, bits);
    mpfr_mul_2si(r.raw(), r.raw(), k, MPFR_RNDN);
    return r;
}

void sincos_pi(const Real& x, Real& s, Real& c) {
    const Bits bits = x.precision();
    // x = n + r with |r| <= 1/2; x - n is exact for |x| < 2^bits.
    Real n(bits);
    mpfr_rint(n.raw(), x.raw(), MPFR_RNDN);
    Real r = x - n;
    bool odd = false;
    if (mpfr_fits_slong_p(n.raw(), MPFR_RNDN)) {
        odd = (mpfr_get_si(n.raw(), MPFR_RNDN) & 1L) != 0;
    } else if (n.exponent() <= bits) {
        odd = mpz_odd_p(floor_to_int(n).get_mpz_t()) != 0;
    }
    if (s.precision() != bits) s = Real(bits);
    if (c.precision() != bits) c = Real(bits);
    if (r.is_zero()) {
        mpfr_set_zero(s.raw(), 1);
        mpfr_set_si(c.raw(), 1, MPFR_RNDN);
    } else {
        Real arg = r * pi(bits + 16).at(bits + 16);
        Real ss(bits + 16), cc(bits + 16);
        mpfr_sin_cos(ss.raw(), cc.raw(), arg.raw(), MPFR_RNDN);
        mpfr_set(s.raw(), ss.raw(), MPFR_RNDN);
        mpfr_set(c.raw(), cc.raw(), MPFR_RNDN);
    }
    if (odd) {
        mpfr_neg(s.raw(), s.raw(), MPFR_RNDN);
        mpfr_neg(c.raw(), c.raw(), MPFR_RNDN);
    }
}

Real sin_pi(const Real& x) {
    Real s(x.precision()), c(x.precision());
    sincos_pi(x, s, c);
    return s;
}

Bits bits_for_digits(int digits) {
    return static_cast<Bits>(std::ceil(digits * 3.321928094887362)) + 4;
}

Complex Complex::polar_pi(const Real& a) {
    Complex z(a.precision());
    sincos_pi(a, z.im, z.re);
    return z;
}

Complex operator*(const Complex& a, const Complex& b) {
    Complex z(a.precision() > b.precision() ? a.precision() : b.precision());
    mul_into(z, a, b);
    return z;
}

Complex operator/(const Complex& a, const Complex& b) {
    Real d = b.norm2();
    Complex num = a * b.conj();
    num.re /= d;
    num.im /= d;
    return num;
}

void mul_into(Complex& z, const Complex& a, const Complex& b) {
    mpfr_fmms(z.re.raw(), a.re.raw(), b.re.raw(), a.im.raw(), b.im.raw(), MPFR_RNDN);
    mpfr_fmma(z.im.raw(), a.re.raw(), b.im.raw(), a.im.raw(), b.re.raw(), MPFR_RNDN);
}

void mul_add_into(Complex& z, const Complex& a, const Complex& b, const Complex& c, const Complex& d,
                  Real& t) {
    mpfr_fmms(z.re.raw(), a.re.raw(), b.re.raw(), a.im.raw(), b.im.raw(), MPFR_RNDN);
    mpfr_fmms(t.raw(), c.re.raw(), d.re.raw(), c.im.raw(), d.im.raw(), MPFR_RNDN);
    mpfr_add(z.re.raw(), z.re.raw(), t.raw(), MPFR_RNDN);
    mpfr_fmma(z.im.raw(), a.re.raw(), b.im.raw(), a.im.raw(), b.re.raw(), MPFR_RNDN);
    mpfr_fmma(t.raw(), c.re.raw(), d.im.raw(), c.im.raw(), d.re.raw(), MPFR_RNDN);
    mpfr_add(z.im.raw(), z.im.raw(), t.raw(), MPFR_RNDN);
}

}  // namespace qplab
