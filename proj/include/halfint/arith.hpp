#pragma once

#include "halfint/context.hpp"

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <vector>

namespace halfint::arith {

// ---------------------------------------------------------------------------
// Factorization kernel: smallest-prime-factor sieve, grown on demand.
// Inputs beyond the hard cap are rejected rather than silently slow.
// ---------------------------------------------------------------------------

inline constexpr long factor_limit = 10000000;

namespace detail {

struct Sieve {
    std::vector<uint32_t> spf;
    std::mutex mu;

    void ensure(long n) {
        std::lock_guard<std::mutex> lock(mu);
        if ((long)spf.size() > n) return;
        long cap = 1L << 17;
        while (cap <= n) cap <<= 1;
        if (cap > (factor_limit << 1)) cap = factor_limit + 1;
        spf.assign(cap, 0);
        for (long i = 2; i < cap; ++i) {
            if (spf[i] == 0) {
                for (long j = i; j < cap; j += i)
                    if (spf[j] == 0) spf[j] = uint32_t(i);
            }
        }
    }
};

inline Sieve& sieve() {
    static Sieve s;
    return s;
}

} // namespace detail

inline std::vector<std::pair<long, int>> factor(long n) {
    if (n < 1) throw std::domain_error("factor: argument must be positive");
    if (n > factor_limit)
        throw std::domain_error("factor: argument exceeds sieve limit 10^7");
    auto& s = detail::sieve();
    s.ensure(n);
    std::vector<std::pair<long, int>> out;
    while (n > 1) {
        long p = s.spf[n];
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    return out;
}

inline bool is_prime(long n) {
    if (n < 2) return false;
    auto f = factor(n);
    return f.size() == 1 && f[0].second == 1;
}

// ---------------------------------------------------------------------------
// Kronecker symbol (a/n), total on integer pairs.  For odd denominators this
// is Shimura's extension of the Jacobi symbol: completely multiplicative in
// the numerator, (0/±1) = 1, and for n < 0 the sign of a enters.  The d < 0
// convention is pinned wholesale by the theta-multiplier consistency suite.
// ---------------------------------------------------------------------------

inline int kronecker(long long a, long long n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) result = -result;
    }
    int e = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++e;
    }
    if (e) {
        if ((a & 1) == 0) return 0;
        long long am = ((a % 8) + 8) % 8;
        if ((e & 1) && (am == 3 || am == 5)) result = -result;
    }
    a %= n;
    if (a < 0) a += n;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            long long nm = n % 8;
            if (nm == 3 || nm == 5) result = -result;
        }
        std::swap(a, n);
        if ((a % 4) == 3 && (n % 4) == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

// ---------------------------------------------------------------------------
// epsilon_d: the sign of the quadratic Gauss sum mod d.  Returned as the
// exponent of i, so epsilon_d = i^i_exponent with value 1 for d = 1 (mod 4)
// and i for d = 3 (mod 4).
// ---------------------------------------------------------------------------

struct EpsilonD {
    long d;
    int i_exponent; // 0 or 1
    Complex value(mpfr_prec_t prec) const { return i_power(i_exponent, prec); }
};

inline EpsilonD epsilon(long d) {
    if ((d & 1) == 0) throw std::domain_error("epsilon: d must be odd");
    long m = ((d % 4) + 4) % 4;
    return EpsilonD{d, m == 1 ? 0 : 1};
}

// ---------------------------------------------------------------------------
// Standard arithmetic functions, exact.
// ---------------------------------------------------------------------------

inline int mobius(long r) {
    if (r < 1) throw std::domain_error("mobius: argument must be positive");
    int m = 1;
    for (auto& [p, e] : factor(r)) {
        (void)p;
        if (e > 1) return 0;
        m = -m;
    }
    return m;
}

// m = t * n^2 with t square-free; unique.
inline std::pair<long, long> squarefree_decompose(long m) {
    if (m < 1) throw std::domain_error("squarefree_decompose: argument must be positive");
    long t = 1, n = 1;
    for (auto& [p, e] : factor(m)) {
        if (e & 1) t *= p;
        for (int i = 0; i < e / 2; ++i) n *= p;
    }
    return {t, n};
}

inline bool is_squarefree(long n) {
    for (auto& [p, e] : factor(n)) {
        (void)p;
        if (e > 1) return false;
    }
    return true;
}

inline bool is_cubefree(long n) {
    for (auto& [p, e] : factor(n)) {
        (void)p;
        if (e > 2) return false;
    }
    return true;
}

inline std::vector<long> divisors(long n) {
    std::vector<long> out{1};
    for (auto& [p, e] : factor(n)) {
        size_t sz = out.size();
        long q = 1;
        for (int i = 1; i <= e; ++i) {
            q *= p;
            for (size_t j = 0; j < sz; ++j) out.push_back(out[j] * q);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline mpz_class sigma(int nu, long n) {
    mpz_class s = 0;
    for (long d : divisors(n)) {
        mpz_class t;
        mpz_ui_pow_ui(t.get_mpz_t(), (unsigned long)d, (unsigned long)nu);
        s += t;
    }
    return s;
}

inline long euler_phi(long n) {
    long r = n;
    for (auto& [p, e] : factor(n)) {
        (void)e;
        r -= r / p;
    }
    return r;
}

inline long mod_inverse(long a, long m) {
    if (m == 1) return 0;
    long g = m, x = 0, x1 = 1, a1 = ((a % m) + m) % m;
    while (a1 != 0) {
        long q = g / a1;
        g -= q * a1;
        std::swap(g, a1);
        x -= q * x1;
        std::swap(x, x1);
    }
    if (g != 1) throw std::domain_error("mod_inverse: arguments not coprime");
    return ((x % m) + m) % m;
}

// ---------------------------------------------------------------------------
// Integer 2x2 matrices and the theta multiplier system on Gamma_0(4).
// ---------------------------------------------------------------------------

struct Mat2 {
    long long a, b, c, d;

    long long det() const { return a * d - b * c; }
    bool in_gamma0_4() const { return det() == 1 && c % 4 == 0; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    friend bool operator==(const Mat2& x, const Mat2& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
    }

    Complex apply(const Complex& z) const {
        Complex num = z * (long)a;
        num.re += (long)b;
        Complex den = z * (long)c;
        den.re += (long)d;
        return num / den;
    }
};

// j(gamma, z) = epsilon_d^{-1} (c/d) (cz+d)^{1/2}, the automorphy factor of
// the theta series.  Principal square root; |j|^2 = |cz+d|.
inline Complex theta_multiplier(const Mat2& g, const Complex& z, const EvalContext& ctx) {
    if (!g.in_gamma0_4())
        throw std::domain_error("theta_multiplier: matrix not in Gamma_0(4)");
    if (!(z.im > 0)) throw std::domain_error("theta_multiplier: Im z must be positive");
    int kr = kronecker(g.c, g.d);
    // c = 0 forces d = +-1, where the symbol is 1 and the formula is exact.
    Complex czd = z * (long)g.c;
    czd.re += (long)g.d;
    Complex r = sqrt(czd);
    r *= i_power(-epsilon(g.d).i_exponent, ctx.prec());
    r *= (long)kr;
    return r;
}

// theta(z) = sum_{n in Z} e(n^2 z) = 1 + 2 sum_{n>=1} e(n^2 z), Im z > 0.
inline CertifiedComplex theta_value(const Complex& z, const EvalContext& ctx) {
    if (!(z.im > 0)) throw std::domain_error("theta_value: Im z must be positive");
    mpfr_prec_t prec = ctx.prec();
    Complex acc(prec);
    acc.re += 1;
    double y = z.im.to_double();
    double logtarget = (double(ctx.digits) + 8.0) * 2.302585092994046;
    long nmax = (long)std::ceil(std::sqrt(logtarget / (6.283185307179586 * y))) + 2;
    Real two_pi = ctx.two_pi();
    for (long n = 1; n <= nmax; ++n) {
        Real angle = Real::of(n * n, prec) * z.re * two_pi;
        Real s(prec), c(prec);
        sin_cos(s, c, angle);
        Real damp = exp(-(two_pi * (n * n) * z.im));
        acc.re += 2 * damp * c;
        acc.im += 2 * damp * s;
    }
    double tail = 2.0 * std::exp(-6.283185307179586 * y * double((nmax + 1) * (nmax + 1)));
    return {acc, tail * ctx.tail_safety};
}

// Quadratic Gauss sum sum_{n=1}^{d} e(n^2/d); equals epsilon_d sqrt(d) for
// odd positive d.
inline Complex gauss_sum(long d, const EvalContext& ctx) {
    mpfr_prec_t prec = ctx.prec();
    Complex acc(prec);
    for (long n = 1; n <= d; ++n) {
        long r = (n % d) * (n % d) % d;
        acc += unit_exp(Real::of(mpq_class(r, d), prec));
    }
    return acc;
}

} // namespace halfint::arith
