#pragma once

#include "halfint/arith.hpp"
#include "halfint/context.hpp"

#include <mutex>
#include <vector>

namespace halfint::special {

// ---------------------------------------------------------------------------
// Bernoulli numbers B_m as exact rationals, cached.
// ---------------------------------------------------------------------------

namespace detail {

struct BernoulliCache {
    std::vector<mpq_class> b; // b[m] = B_m
    std::mutex mu;

    mpq_class get(size_t m) {
        std::lock_guard<std::mutex> lock(mu);
        if (b.empty()) {
            b.push_back(mpq_class(1));
            b.push_back(mpq_class(-1, 2));
        }
        while (b.size() <= m) {
            size_t n = b.size();
            // sum_{j=0}^{n} binom(n+1, j) B_j = 0
            mpq_class acc = 0;
            mpz_class binom = 1; // binom(n+1, 0)
            for (size_t j = 0; j < n; ++j) {
                acc += mpq_class(binom) * b[j];
                binom *= (long)(n + 1 - j);
                binom /= (long)(j + 1);
            }
            mpq_class bn = -acc / mpq_class(binom); // binom(n+1, n) = n+1
            bn.canonicalize();
            b.push_back(bn);
        }
        return b[m];
    }
};

inline BernoulliCache& bernoulli_cache() {
    static BernoulliCache c;
    return c;
}

} // namespace detail

inline mpq_class bernoulli(long m) {
    if (m < 0) throw std::domain_error("bernoulli: negative index");
    if (m > 1 && (m & 1)) return mpq_class(0);
    return detail::bernoulli_cache().get(size_t(m));
}

// ---------------------------------------------------------------------------
// Gamma(s) for complex s via the Stirling series with argument shift and
// reflection.  The remainder after N terms is bounded by the first omitted
// term times sec(arg z / 2)^{2N+2}; the shift keeps |arg z| <= pi/4 so the
// factor stays harmless.
// ---------------------------------------------------------------------------

namespace detail {

// log Gamma(z) for Re(z) > 0 with |z| large enough; returns absolute error
// bound on the log.
inline CertifiedComplex log_gamma_stirling(const Complex& z, mpfr_prec_t prec, double target) {
    Complex lz = log(z);
    Complex acc = (z - Real::of(mpq_class(1, 2), prec)) * lz - z;
    Real half_log_2pi = log(Real::pi(prec) * 2) / 2;
    acc.re += half_log_2pi;

    Complex z2 = z * z;
    Complex zpow = z; // z^{2n-1}
    double azd = abs(z).to_double();
    double secf = 1.0 / std::cos(std::atan2(std::abs(z.im_d()), z.re_d()) / 2.0);
    double err = 1e300;
    for (long n = 1; n < 400; ++n) {
        mpq_class c = bernoulli(2 * n) / mpq_class(2 * n * (2 * n - 1));
        Complex term = Complex{Real::of(c, prec), Real(prec)} / zpow;
        double tsz = abs(term).to_double();
        double bound = tsz * std::pow(secf, 2.0 * n + 2.0);
        acc += term;
        if (bound < err) {
            err = bound;
            if (err < target) break;
        } else {
            break; // divergent tail reached; err is the best bound
        }
        zpow *= z2;
        (void)azd;
    }
    return {acc, err};
}

} // namespace detail

inline CertifiedComplex gamma(const Complex& s, const EvalContext& ctx) {
    mpfr_prec_t prec = ctx.prec();
    double target = ctx.target();

    // Pole detection at non-positive integers.
    if (s.im.is_zero()) {
        Real r = s.re;
        if (r <= 0) {
            Real n(prec);
            mpfr_round(n.raw(), r.raw());
            if ((r - n).is_zero()) throw pole_error(r.to_long());
        }
    }

    // Reflection onto Re(s) >= 1/2.
    if (s.re < Real::of(0.5, prec)) {
        Complex one_minus(prec);
        one_minus.re += 1;
        one_minus -= s;
        CertifiedComplex g = gamma(one_minus, ctx);
        Real pi = Real::pi(prec);
        Complex sp = s * pi;
        // sin(pi s) for complex s.
        Real sr(prec), cr(prec);
        sin_cos(sr, cr, sp.re);
        Real ch = (exp(sp.im) + exp(-sp.im)) / 2;
        Real sh = (exp(sp.im) - exp(-sp.im)) / 2;
        Complex sin_pis{sr * ch, cr * sh};
        Complex denom = sin_pis * g.value;
        Complex val = Complex{pi, Real(prec)} / denom;
        double rel = g.err / std::max(abs(g.value).to_double(), 1e-300) + 1e3 * std::pow(2.0, -double(prec));
        return {val, abs(val).to_double() * (rel + 1e-2 * target)};
    }

    // Shift until the Stirling zone: |z| >= z0 and Re z >= |Im z|.
    double z0 = 0.3665 * double(ctx.digits + ctx.guard_digits + 8) + 4.0;
    long shift = 0;
    double re = s.re_d(), im = std::abs(s.im_d());
    while (std::hypot(re + shift, im) < z0 || (re + shift) < im) ++shift;

    Complex zs = s;
    zs.re += shift;
    CertifiedComplex lg = detail::log_gamma_stirling(zs, prec, target * 1e-2);
    Complex val = exp(lg.value);
    double lgerr = lg.err;
    if (shift > 0) {
        Complex prod(prec);
        prod.re += 1;
        Complex f = s;
        for (long j = 0; j < shift; ++j) {
            prod *= f;
            f.re += 1;
        }
        val /= prod;
    }
    double rounding = 1e2 * double(shift + 40) * std::pow(2.0, -double(prec));
    double rel = lgerr + rounding;
    return {val, abs(val).to_double() * rel};
}

// ---------------------------------------------------------------------------
// Upper incomplete gamma Gamma(s, x) for complex s and real x > 0, valid for
// all s (entire in s).  Power series for small x relative to |s|, continued
// fraction for large x; both regimes cross-validated on the overlap band.
// ---------------------------------------------------------------------------

namespace detail {

// gamma_lower(s, x) = x^s e^{-x} sum_{n>=0} x^n / (s (s+1) ... (s+n)).
// Fails (throws) if s is a non-positive integer.
inline CertifiedComplex lower_gamma_series(const Complex& s, const Real& x,
                                           const EvalContext& ctx, mpfr_prec_t prec,
                                           double target) {
    Complex acc(prec);
    Complex denom = s; // (s)(s+1)...(s+n)
    Complex term = Complex{Real::of(1L, prec), Real(prec)} / denom;
    acc += term;
    double xd = x.to_double();
    double tail = 1e300;
    long n = 1;
    for (; n < ctx.max_terms; ++n) {
        Complex next = s;
        next.re += n;
        if (abs(next).to_double() < 1e-30)
            throw algorithm_selection_error("lower_gamma_series: pochhammer vanishes");
        term *= x;
        term /= next;
        acc += term;
        double ratio = xd / std::abs(double(n + 1) + s.re_d());
        if (ratio < 0.5) {
            tail = abs(term).to_double() * ratio / (1.0 - ratio);
            if (tail < target) break;
        }
    }
    if (tail > target)
        throw algorithm_selection_error("lower_gamma_series: no convergence within max_terms");
    Complex pref = cpow(Complex{x, Real(prec)}, s) * exp(Complex{-x, Real(prec)});
    Complex val = pref * acc;
    double scale = abs(pref).to_double() * (abs(acc).to_double() + 1.0);
    return {val, (tail + 1e2 * double(n) * std::pow(2.0, -double(prec))) * scale};
}

// Continued fraction, modified Lentz, for
//   Gamma(s,x) = e^{-x} x^s / (b_0 + K_{j>=1}(a_j / b_j)),
//   a_j = j (s - j),  b_j = x + 2j + 1 - s.
// Reliable for x moderately larger than |s|; stops when the running
// correction is below target.
inline CertifiedComplex upper_gamma_cf(const Complex& s, const Real& x, const EvalContext& ctx,
                                       mpfr_prec_t prec, double target) {
    Real tiny = Real::of(1e-280, prec);
    Complex one{Real::of(1L, prec), Real(prec)};
    Complex b(prec); // b_0 = x + 1 - s
    b.re += x;
    b.re += 1;
    b -= s;
    if (abs(b).to_double() < 1e-270) b.re += tiny;
    Complex f = b, c0 = b, d0(prec); // D_0 = 0
    bool converged = false;
    double corr = 1.0;
    for (long j = 1; j < ctx.max_terms; ++j) {
        Complex a = s;
        a.re -= j;
        a *= j; // a_j = j (s - j)
        b.re += 2;
        Complex d1 = b + a * d0;
        if (abs(d1).to_double() < 1e-270) d1.re += tiny;
        Complex c1 = b + a / c0;
        if (abs(c1).to_double() < 1e-270) c1.re += tiny;
        d1 = one / d1;
        Complex delta = c1 * d1;
        f *= delta;
        d0 = d1;
        c0 = c1;
        delta.re -= 1;
        corr = abs(delta).to_double();
        if (corr < target * 1e-2 && j > 4) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw algorithm_selection_error("upper_gamma_cf: no convergence within max_terms");
    Complex pref = cpow(Complex{x, Real(prec)}, s) * exp(Complex{-x, Real(prec)});
    Complex val = pref / f;
    double err =
        abs(val).to_double() * (corr * ctx.tail_safety + 1e3 * std::pow(2.0, -double(prec)));
    return {val, err};
}

// E_1(x) = Gamma(0, x) by its classical series; small/moderate x only.
inline CertifiedComplex exponential_integral_e1(const Real& x, const EvalContext& ctx,
                                                mpfr_prec_t prec, double target) {
    Real acc(prec);
    mpfr_const_euler(acc.raw(), MPFR_RNDN);
    acc = -acc - log(x);
    Real term = Real::of(1L, prec); // (-x)^k / k!
    double xd = x.to_double();
    long k = 1;
    double tail = 1e300;
    for (; k < ctx.max_terms; ++k) {
        term *= x;
        term /= -k;
        acc -= term / k;
        if (double(k + 1) > 2.0 * xd) {
            tail = abs(term).to_double() * xd / double(k + 1);
            if (tail < target) break;
        }
    }
    double err = tail + 1e2 * double(k) * std::pow(2.0, -double(prec)) * (std::exp(xd) + 1.0);
    return {Complex{acc, Real(prec)}, err};
}

} // namespace detail

inline CertifiedComplex gamma(const Complex& s, const EvalContext& ctx);

inline CertifiedComplex upper_gamma(const Complex& s, const Real& x, const EvalContext& ctx) {
    if (x.sgn() < 0) throw std::domain_error("upper_gamma: x must be >= 0");
    if (x.is_zero()) return gamma(s, ctx);
    double xd = x.to_double();
    double sd = std::hypot(s.re_d(), s.im_d());
    double target = ctx.target();
    if (xd >= 1.2 * sd + 6.0) {
        return detail::upper_gamma_cf(s, x, ctx, ctx.prec(), target);
    }

    // Cancellation between Gamma(s) and gamma(s, x) costs ~0.44 x digits.
    long extra = long(0.4343 * xd) + 12;

    // s at a non-positive integer: the split through Gamma(s) is unusable,
    // but Gamma(s, x) itself is entire in s.  Walk down from Gamma(0, x).
    bool integer_s = s.im.is_zero();
    long n_int = 0;
    if (integer_s) {
        Real r(s.re.prec());
        mpfr_round(r.raw(), s.re.raw());
        integer_s = (s.re - r).is_zero() && s.re <= 0;
        n_int = -r.to_long();
    }
    if (integer_s) {
        EvalContext bumped = ctx;
        bumped.guard_digits += extra + 2 * n_int;
        mpfr_prec_t prec = bumped.prec();
        Real xb = Real::of(0L, prec) + x;
        CertifiedComplex g = detail::exponential_integral_e1(xb, bumped, prec, target * 1e-2);
        Complex val = g.value;
        double err = g.err;
        Real ex = exp(-xb);
        Real xpow = Real::of(1L, prec);
        for (long n = 1; n <= n_int; ++n) {
            // Gamma(-n, x) = (x^{-n} e^{-x} - Gamma(-n+1, x)) / n
            xpow /= xb;
            Complex num{xpow * ex, Real(prec)};
            val = (num - val) / n;
            err = (err + 1e2 * std::pow(2.0, -double(prec)) * abs(num.re).to_double()) / double(n);
        }
        return {val, err + std::abs(abs(val).to_double()) * 1e2 * std::pow(2.0, -double(prec))};
    }

    // Near-integer s loses digits through the small Pochhammer factors.
    if (std::abs(s.im_d()) < 1.0 && s.re_d() < 0.6) {
        double dist = std::abs(s.re_d() - std::round(s.re_d()));
        if (dist > 1e-12 && dist < 0.5) extra += long(-std::log10(dist)) + 2;
    }

    EvalContext bumped = ctx;
    bumped.guard_digits += extra;
    mpfr_prec_t prec = bumped.prec();
    CertifiedComplex g = gamma(s, bumped);
    CertifiedComplex lo =
        detail::lower_gamma_series(s, Real::of(0L, prec) + x, bumped, prec,
                                   target * std::max(1.0, abs(g.value).to_double()) * 1e-2);
    Complex val = g.value - lo.value;
    return {val, g.err + lo.err};
}

// Lower incomplete complement, for consistency checks.
inline CertifiedComplex lower_gamma(const Complex& s, const Real& x, const EvalContext& ctx) {
    CertifiedComplex g = gamma(s, ctx);
    CertifiedComplex u = upper_gamma(s, x, ctx);
    return {g.value - u.value, g.err + u.err};
}

} // namespace halfint::special
