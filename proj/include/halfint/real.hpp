#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <cmath>
#include <string>
#include <utility>

namespace halfint {

// Arbitrary-precision real, a thin RAII wrapper over mpfr_t.  Every value
// carries its own precision; binary operations work at the larger operand
// precision.  Rounding is to nearest throughout.
class Real {
  public:
    explicit Real(mpfr_prec_t prec = MPFR_PREC_MIN) {
        mpfr_init2(v_, prec < MPFR_PREC_MIN ? MPFR_PREC_MIN : prec);
        mpfr_set_zero(v_, 1);
    }
    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
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

    static Real of(long x, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_si(r.v_, x, MPFR_RNDN);
        return r;
    }
    static Real of(double x, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_d(r.v_, x, MPFR_RNDN);
        return r;
    }
    static Real of(const mpz_class& x, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_z(r.v_, x.get_mpz_t(), MPFR_RNDN);
        return r;
    }
    static Real of(const mpq_class& x, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_q(r.v_, x.get_mpq_t(), MPFR_RNDN);
        return r;
    }
    static Real pi(mpfr_prec_t prec) {
        Real r(prec);
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_); }
    int sgn() const { return mpfr_sgn(v_); }

    std::string str(int digits = 20) const {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%%.%dRe", digits);
        char out[160];
        mpfr_snprintf(out, sizeof out, buf, v_);
        return out;
    }

    Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator+=(long x) { mpfr_add_si(v_, v_, x, MPFR_RNDN); return *this; }
    Real& operator-=(long x) { mpfr_sub_si(v_, v_, x, MPFR_RNDN); return *this; }
    Real& operator*=(long x) { mpfr_mul_si(v_, v_, x, MPFR_RNDN); return *this; }
    Real& operator/=(long x) { mpfr_div_si(v_, v_, x, MPFR_RNDN); return *this; }
    Real& operator+=(double x) { mpfr_add_d(v_, v_, x, MPFR_RNDN); return *this; }
    Real& operator-=(double x) { mpfr_sub_d(v_, v_, x, MPFR_RNDN); return *this; }
    Real& operator*=(double x) { mpfr_mul_d(v_, v_, x, MPFR_RNDN); return *this; }
    Real& operator/=(double x) { mpfr_div_d(v_, v_, x, MPFR_RNDN); return *this; }
    Real& operator+=(int x) { return *this += long(x); }
    Real& operator-=(int x) { return *this -= long(x); }
    Real& operator*=(int x) { return *this *= long(x); }
    Real& operator/=(int x) { return *this /= long(x); }

    friend Real operator+(Real a, const Real& b) { promote(a, b); a += b; return a; }
    friend Real operator-(Real a, const Real& b) { promote(a, b); a -= b; return a; }
    friend Real operator*(Real a, const Real& b) { promote(a, b); a *= b; return a; }
    friend Real operator/(Real a, const Real& b) { promote(a, b); a /= b; return a; }
    friend Real operator+(Real a, long b) { a += b; return a; }
    friend Real operator-(Real a, long b) { a -= b; return a; }
    friend Real operator*(Real a, long b) { a *= b; return a; }
    friend Real operator/(Real a, long b) { a /= b; return a; }
    friend Real operator*(long a, Real b) { b *= a; return b; }
    friend Real operator+(Real a, double b) { a += b; return a; }
    friend Real operator-(Real a, double b) { a -= b; return a; }
    friend Real operator*(Real a, double b) { a *= b; return a; }
    friend Real operator/(Real a, double b) { a /= b; return a; }
    friend Real operator*(double a, Real b) { b *= a; return b; }
    friend Real operator+(Real a, int b) { a += long(b); return a; }
    friend Real operator-(Real a, int b) { a -= long(b); return a; }
    friend Real operator*(Real a, int b) { a *= long(b); return a; }
    friend Real operator/(Real a, int b) { a /= long(b); return a; }
    friend Real operator*(int a, Real b) { b *= long(a); return b; }
    friend Real operator-(const Real& a) {
        Real r(a.prec());
        mpfr_neg(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator/(long a, const Real& b) {
        Real r(b.prec());
        mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN);
        return r;
    }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
    friend bool operator<(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
    friend bool operator>(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }
    friend bool operator<=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) <= 0; }
    friend bool operator>=(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) >= 0; }

  private:
    static void promote(Real& a, const Real& b) {
        if (a.prec() < b.prec()) mpfr_prec_round(a.v_, b.prec(), MPFR_RNDN);
    }
    mpfr_t v_;
};

inline Real sqrt(const Real& a) {
    Real r(a.prec());
    mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}
inline Real exp(const Real& a) {
    Real r(a.prec());
    mpfr_exp(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}
inline Real log(const Real& a) {
    Real r(a.prec());
    mpfr_log(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}
inline Real sin(const Real& a) {
    Real r(a.prec());
    mpfr_sin(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}
inline Real cos(const Real& a) {
    Real r(a.prec());
    mpfr_cos(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}
inline void sin_cos(Real& s, Real& c, const Real& a) {
    mpfr_sin_cos(s.raw(), c.raw(), a.raw(), MPFR_RNDN);
}
inline Real atan2(const Real& y, const Real& x) {
    Real r(std::max(y.prec(), x.prec()));
    mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
    return r;
}
inline Real hypot(const Real& x, const Real& y) {
    Real r(std::max(y.prec(), x.prec()));
    mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}
inline Real pow(const Real& b, const Real& e) {
    Real r(std::max(b.prec(), e.prec()));
    mpfr_pow(r.raw(), b.raw(), e.raw(), MPFR_RNDN);
    return r;
}
inline Real pow(const Real& b, long e) {
    Real r(b.prec());
    mpfr_pow_si(r.raw(), b.raw(), e, MPFR_RNDN);
    return r;
}
inline Real abs(const Real& a) {
    Real r(a.prec());
    mpfr_abs(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}

} // namespace halfint
