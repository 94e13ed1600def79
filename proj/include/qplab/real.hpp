#pragma once

// Arbitrary precision scalars used throughout the lab.
//
// Real is a value-semantic RAII handle around an mpfr_t with an explicit
// bit precision. Binary operations produce a result at the larger of the two
// operand precisions, so precision never silently drops inside an expression.
// There is no process-wide default precision: every constructor that creates a
// value out of nothing takes the precision as an argument.

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace qplab {

using BigInt = mpz_class;
using BigRat = mpq_class;
using Bits = mpfr_prec_t;

class Real {
public:
    explicit Real(Bits bits = 128) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
    Real(double x, Bits bits) { mpfr_init2(v_, bits); mpfr_set_d(v_, x, MPFR_RNDN); }
    Real(long x, Bits bits) { mpfr_init2(v_, bits); mpfr_set_si(v_, x, MPFR_RNDN); }
    Real(int x, Bits bits) : Real(static_cast<long>(x), bits) {}
    Real(const BigInt& x, Bits bits) { mpfr_init2(v_, bits); mpfr_set_z(v_, x.get_mpz_t(), MPFR_RNDN); }
    Real(const BigRat& x, Bits bits) { mpfr_init2(v_, bits); mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN); }

    /// Parses a decimal (or MPFR-syntax) string, rounding to nearest. Throws
    /// std::invalid_argument when the whole string is not a number.
    static Real parse(std::string_view text, Bits bits);

    Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    friend void swap(Real& x, Real& y) noexcept { mpfr_swap(x.v_, y.v_); }

    Bits precision() const { return mpfr_get_prec(v_); }
    /// Copy rounded (or exactly extended) to `bits`.
    Real at(Bits bits) const {
        Real r(bits);
        mpfr_set(r.v_, v_, MPFR_RNDN);
        return r;
    }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    /// Scientific notation with `digits` significant digits.
    std::string str(int digits = 20) const;
    /// Exact rational value of this (dyadic) number.
    BigRat to_rational() const;

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    /// Binary exponent e with 0.5 <= |x| 2^-e < 1; a very negative value for zero.
    long exponent() const { return is_zero() ? -(1L << 40) : static_cast<long>(mpfr_get_exp(v_)); }

    Real operator-() const { Real r(precision()); mpfr_neg(r.v_, v_, MPFR_RNDN); return r; }

    Real& operator+=(const Real& o) { grow(o); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { grow(o); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { grow(o); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { grow(o); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator+=(long o) { mpfr_add_si(v_, v_, o, MPFR_RNDN); return *this; }
    Real& operator-=(long o) { mpfr_sub_si(v_, v_, o, MPFR_RNDN); return *this; }
    Real& operator*=(long o) { mpfr_mul_si(v_, v_, o, MPFR_RNDN); return *this; }
    Real& operator/=(long o) { mpfr_div_si(v_, v_, o, MPFR_RNDN); return *this; }

    friend Real operator+(Real a, const Real& b) { return a += b; }
    friend Real operator-(Real a, const Real& b) { return a -= b; }
    friend Real operator*(Real a, const Real& b) { return a *= b; }
    friend Real operator/(Real a, const Real& b) { return a /= b; }
    friend Real operator+(Real a, long b) { return a += b; }
    friend Real operator-(Real a, long b) { return a -= b; }
    friend Real operator*(Real a, long b) { return a *= b; }
    friend Real operator/(Real a, long b) { return a /= b; }
    // doubles would silently narrow to long through the overloads above
    friend Real operator+(Real, double) = delete;
    friend Real operator-(Real, double) = delete;
    friend Real operator*(Real, double) = delete;
    friend Real operator/(Real, double) = delete;
    friend Real operator*(double, Real) = delete;
    friend Real operator+(long a, Real b) { return b += a; }
    friend Real operator*(long a, Real b) { return b *= a; }
    friend Real operator-(long a, const Real& b) {
        Real r(b.precision());
        mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator/(long a, const Real& b) {
        Real r(b.precision());
        mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN);
        return r;
    }

    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend std::partial_ordering operator<=>(const Real& a, const Real& b) {
        if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
        int c = mpfr_cmp(a.v_, b.v_);
        return c < 0 ? std::partial_ordering::less
                     : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
    }
    friend bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
    friend std::partial_ordering operator<=>(const Real& a, long b) {
        int c = mpfr_cmp_si(a.v_, b);
        return c < 0 ? std::partial_ordering::less
                     : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
    }
    friend bool operator==(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) == 0; }
    friend std::partial_ordering operator<=>(const Real& a, double b) {
        int c = mpfr_cmp_d(a.v_, b);
        return c < 0 ? std::partial_ordering::less
                     : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
    }

private:
    void grow(const Real& o) {
        if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    }
    mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real exp(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real floor(const Real& x);
/// x - floor(x), in [0, 1).
Real frac(const Real& x);
/// Nearest integer as a big integer (ties away from zero).
BigInt round_to_int(const Real& x);
BigInt floor_to_int(const Real& x);
/// x * 2^e, exact.
Real ldexp(const Real& x, long e);
Real pi(Bits bits);
Real log2_const(Bits bits);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
/// 2^k at the given precision (exact).
Real pow2(long k, Bits bits);

/// sin(pi x) and cos(pi x) with exact argument reduction: exact integers give
/// an exact zero sine, and the result is 2-periodic to the last bit.
void sincos_pi(const Real& x, Real& s, Real& c);
Real sin_pi(const Real& x);

/// Precision in bits for a given count of significant decimal digits.
Bits bits_for_digits(int digits);

class Complex {
public:
    explicit Complex(Bits bits = 128) : re(bits), im(bits) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Complex(double r, double i, Bits bits) : re(r, bits), im(i, bits) {}

    static Complex polar_pi(const Real& angle_over_pi);   ///< exp(i pi a)

    Bits precision() const { return re.precision() > im.precision() ? re.precision() : im.precision(); }
    Complex at(Bits bits) const { return Complex(re.at(bits), im.at(bits)); }

    Complex operator-() const { return Complex(-re, -im); }
    Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
    Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
    Complex& operator*=(const Real& o) { re *= o; im *= o; return *this; }
    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Real& b) { return a *= b; }
    friend Complex operator*(const Real& b, Complex a) { return a *= b; }
    friend Complex operator*(const Complex& a, const Complex& b);
    friend Complex operator/(const Complex& a, const Complex& b);

    Complex conj() const { return Complex(re, -im); }
    Real norm2() const { return re * re + im * im; }
    Real abs() const { return qplab::sqrt(norm2()); }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    /// Largest binary exponent among the two components.
    long exponent() const { return re.exponent() > im.exponent() ? re.exponent() : im.exponent(); }

    friend void swap(Complex& x, Complex& y) noexcept {
        swap(x.re, y.re);
        swap(x.im, y.im);
    }

    Real re;
    Real im;
};

/// z = a*b written into z without temporaries (z must not alias a or b).
void mul_into(Complex& z, const Complex& a, const Complex& b);
/// z = a*b + c*d written into z (z must not alias any argument).
void mul_add_into(Complex& z, const Complex& a, const Complex& b, const Complex& c, const Complex& d,
                  Real& scratch);

}  // namespace qplab
