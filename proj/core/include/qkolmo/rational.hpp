// Exact rational scalars: Rational (arbitrary precision, canonical form) and
// CRat (complex with rational real/imaginary parts). All arithmetic is exact.
#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qkolmo {

// mpq_class keeps denominators positive and fractions in lowest terms after
// canonicalize(); every constructor we use goes through canonical form.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Parses "a/b" or "a". Exact; rejects trailing garbage.
Rational parse_rational(const std::string& text);

std::string rational_str(const Rational& r);

double to_double(const Rational& r);

// floor(log2(r)) for r > 0, exact.
long floor_log2(const Rational& r);

struct CRat {
    Rational re;
    Rational im;

    // mpq equality assumes canonical form; constructors are the trust boundary
    CRat() : re(0), im(0) {}
    CRat(Rational r) : re(std::move(r)), im(0) { re.canonicalize(); }
    CRat(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }
    CRat(long r, long i = 0) : re(r), im(i) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    CRat conj() const { return CRat(re, -im); }
    Rational norm_sq() const { return re * re + im * im; }

    std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

    CRat& operator+=(const CRat& o) { re += o.re; im += o.im; return *this; }
    CRat& operator-=(const CRat& o) { re -= o.re; im -= o.im; return *this; }

    friend CRat operator+(const CRat& a, const CRat& b) { return CRat(a.re + b.re, a.im + b.im); }
    friend CRat operator-(const CRat& a, const CRat& b) { return CRat(a.re - b.re, a.im - b.im); }
    friend CRat operator-(const CRat& a) { return CRat(-a.re, -a.im); }
    friend CRat operator*(const CRat& a, const CRat& b) {
        return CRat(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend CRat operator*(const Rational& s, const CRat& a) { return CRat(s * a.re, s * a.im); }
    friend CRat operator/(const CRat& a, const CRat& b) {
        Rational n = b.norm_sq();
        if (n == 0) throw std::domain_error("division by zero CRat");
        CRat num = a * b.conj();
        return CRat(num.re / n, num.im / n);
    }
    friend bool operator==(const CRat& a, const CRat& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const CRat& a, const CRat& b) { return !(a == b); }
};

// Parses "a/b+c/di" (also "-", plain "a/b", "a/bi"). Exact.
CRat parse_crat(const std::string& text);

std::string crat_str(const CRat& z);

}  // namespace qkolmo
