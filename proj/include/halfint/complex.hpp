#pragma once

#include "halfint/real.hpp"

namespace halfint {

// Complex number over Real.  Principal-branch conventions: arg() lands in
// (-pi, pi] and every fractional power routes through exp(s * log z).
class Complex {
  public:
    Real re, im;

    explicit Complex(mpfr_prec_t prec = MPFR_PREC_MIN) : re(prec), im(prec) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    explicit Complex(Real r) : re(std::move(r)), im(re.prec()) {}

    static Complex of(double r, double i, mpfr_prec_t prec) {
        return {Real::of(r, prec), Real::of(i, prec)};
    }
    static Complex unit_i(mpfr_prec_t prec) {
        return {Real::of(0L, prec), Real::of(1L, prec)};
    }

    mpfr_prec_t prec() const { return std::max(re.prec(), im.prec()); }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    double re_d() const { return re.to_double(); }
    double im_d() const { return im.to_double(); }

    std::string str(int digits = 20) const {
        return "(" + re.str(digits) + ", " + im.str(digits) + ")";
    }

    Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
    Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
    Complex& operator*=(const Complex& o) {
        Real a = re * o.re - im * o.im;
        Real b = re * o.im + im * o.re;
        re = std::move(a);
        im = std::move(b);
        return *this;
    }
    Complex& operator*=(const Real& x) { re *= x; im *= x; return *this; }
    Complex& operator*=(long x) { re *= x; im *= x; return *this; }
    Complex& operator*=(double x) { re *= x; im *= x; return *this; }
    Complex& operator*=(int x) { return *this *= long(x); }
    Complex& operator/=(const Complex& o) {
        Real n = o.re * o.re + o.im * o.im;
        Real a = (re * o.re + im * o.im) / n;
        Real b = (im * o.re - re * o.im) / n;
        re = std::move(a);
        im = std::move(b);
        return *this;
    }
    Complex& operator/=(long x) { re /= x; im /= x; return *this; }

    friend Complex operator+(Complex a, const Complex& b) { a += b; return a; }
    friend Complex operator-(Complex a, const Complex& b) { a -= b; return a; }
    friend Complex operator*(Complex a, const Complex& b) { a *= b; return a; }
    friend Complex operator/(Complex a, const Complex& b) { a /= b; return a; }
    friend Complex operator*(Complex a, const Real& b) { a *= b; return a; }
    friend Complex operator*(const Real& b, Complex a) { a *= b; return a; }
    friend Complex operator*(Complex a, long b) { a *= b; return a; }
    friend Complex operator*(long b, Complex a) { a *= b; return a; }
    friend Complex operator/(Complex a, long b) { a /= b; return a; }
    friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
    friend Complex operator+(Complex a, const Real& b) { a.re += b; return a; }
    friend Complex operator-(Complex a, const Real& b) { a.re -= b; return a; }
};

inline Complex conj(const Complex& z) { return {z.re, -z.im}; }
inline Real abs(const Complex& z) { return hypot(z.re, z.im); }
inline Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }
inline Real arg(const Complex& z) { return atan2(z.im, z.re); }

inline Complex exp(const Complex& z) {
    Real m = exp(z.re);
    Real s(z.prec()), c(z.prec());
    sin_cos(s, c, z.im);
    return {m * c, m * s};
}

inline Complex log(const Complex& z) { return {log(abs(z)), arg(z)}; }

// Principal power z^s = exp(s log z), Arg in (-pi, pi].
inline Complex cpow(const Complex& z, const Complex& s) { return exp(s * log(z)); }

inline Complex cpow(const Complex& z, const Real& s) {
    Complex lz = log(z);
    return exp(Complex{lz.re * s, lz.im * s});
}

inline Complex sqrt(const Complex& z) {
    if (z.im.is_zero() && z.re.sgn() >= 0) return Complex{sqrt(z.re), Real(z.prec())};
    return cpow(z, Real::of(mpq_class(1, 2), z.prec()));
}

// e(x) = exp(2 pi i x) for real x.
inline Complex unit_exp(const Real& x) {
    Real t = x * 2 * Real::pi(x.prec());
    Real s(x.prec()), c(x.prec());
    sin_cos(s, c, t);
    return {std::move(c), std::move(s)};
}

// i^e for integer e.
inline Complex i_power(long e, mpfr_prec_t prec) {
    e = ((e % 4) + 4) % 4;
    Complex r(prec);
    switch (e) {
        case 0: r.re += 1; break;
        case 1: r.im += 1; break;
        case 2: r.re -= 1; break;
        default: r.im -= 1; break;
    }
    return r;
}

} // namespace halfint
