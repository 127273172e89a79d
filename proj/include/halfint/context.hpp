#pragma once

#include "halfint/complex.hpp"
#include "halfint/errors.hpp"

#include <cmath>

namespace halfint {

// A numeric value together with an absolute error bound.  Bounds are kept
// in double: they never need more than a couple of digits and the smallest
// bounds we produce (~1e-100) are still comfortably inside double range.
struct CertifiedReal {
    Real value;
    double err = 0.0;
};
struct CertifiedComplex {
    Complex value;
    double err = 0.0;
};

// Working-precision policy.  `digits` is the requested decimal accuracy of
// reported results; internal arithmetic runs with `guard_digits` extra.
// Every numeric result produced under a context must carry an error bound
// <= 10^-(digits-10) (relative to its natural scale) or be rejected.
struct EvalContext {
    long digits = 50;
    double tail_safety = 10.0;
    long max_terms = 4000000;
    long guard_digits = 18;

    mpfr_prec_t prec() const {
        double bits = (double(digits) + double(guard_digits)) * 3.3219280948873623 + 16.0;
        return mpfr_prec_t(bits);
    }
    mpfr_prec_t prec_plus(long extra_digits) const {
        double bits =
            (double(digits) + double(guard_digits) + double(extra_digits)) * 3.3219280948873623 +
            16.0;
        return mpfr_prec_t(bits);
    }
    // Acceptance budget for a result of unit scale.
    double budget() const { return std::pow(10.0, -double(digits - 10)); }
    // Target used internally when computing: leaves headroom below budget.
    double target() const { return std::pow(10.0, -double(digits + 5)); }

    Real R(long x) const { return Real::of(x, prec()); }
    Real R(double x) const { return Real::of(x, prec()); }
    Real R(const mpz_class& x) const { return Real::of(x, prec()); }
    Real R(const mpq_class& x) const { return Real::of(x, prec()); }
    Complex C(double re, double im) const { return Complex::of(re, im, prec()); }
    Complex C(const Real& re) const { return Complex{re, Real(prec())}; }
    Real pi() const { return Real::pi(prec()); }
    Real two_pi() const { return Real::pi(prec()) * 2; }
    Complex I() const { return Complex::unit_i(prec()); }

    EvalContext with_digits(long d) const {
        EvalContext c = *this;
        c.digits = d;
        return c;
    }
};

} // namespace halfint
