#pragma once

#include "halfint/arith.hpp"
#include "halfint/context.hpp"
#include "halfint/qspace.hpp"

#include <vector>

namespace halfint::lift {

// The real character attached to the twist: chi_t(n) = ((-1)^{(k-1)/2} t / n)
// for odd n, and 0 at even n.  The vanishing at 2 is pinned by the exact
// Shimura identity: c(4t)/c(t) is independent of t mod 8, so the 2-part sits
// entirely in A(2^j) and the character has even modulus.
inline int chi_t(long t, long n, long k) {
    if (t < 1 || !arith::is_squarefree(t))
        throw std::domain_error("chi_t: t must be square-free positive");
    if ((n & 1) == 0) return 0;
    long lambda = (k - 1) / 2;
    long long d = (lambda & 1) ? -(long long)t : (long long)t;
    return arith::kronecker(d, n);
}

// Fourier coefficients A(m) of the weight k-1 level 2 eigenform attached to
// a half-integral weight eigenform by the Shimura correspondence.  A(p) for
// odd p is the Hecke eigenvalue; A(2) is determined from the coefficient
// identity itself and re-verified across every other square-free index.
struct LiftCoefficients {
    long k = 0;
    long M = 0;
    std::vector<mpq_class> A; // index 1..M
    mpq_class A2 = 0;
    long a2_solved_at = 0;     // the t0 used to pin A(2)
    long a2_confirmations = 0; // further t with c(t) != 0 confirming A(2)

    const mpq_class& at(long m) const {
        if (m < 1 || m > M) throw needs_more_coefficients(m);
        return A[m];
    }
};

inline LiftCoefficients lift_from_eigenvalues(const qspace::HalfIntegralForm& f, long M) {
    LiftCoefficients L;
    L.k = f.k;
    L.M = M;
    L.A.assign(M + 1, mpq_class(0));
    if (M >= 1) L.A[1] = 1;

    // A(2) from the identity at (t0, n=2): with chi_t(2) = 0,
    // c(4 t0) = c(t0) A(2).
    long t0 = 0;
    for (long t = 1; 4 * t <= f.N; ++t) {
        if (!arith::is_squarefree(t) || f.c[t] == 0) continue;
        t0 = t;
        break;
    }
    if (t0 == 0) throw needs_more_coefficients(4);
    L.A2 = mpq_class(f.c[4 * t0], f.c[t0]);
    L.A2.canonicalize();
    L.a2_solved_at = t0;
    for (long t = t0 + 1; 4 * t <= f.N; ++t) {
        if (!arith::is_squarefree(t) || f.c[t] == 0) continue;
        if (mpq_class(f.c[4 * t]) == L.A2 * mpq_class(f.c[t])) ++L.a2_confirmations;
    }

    // prime powers by the Hecke recursions, composites by multiplicativity
    mpz_class pk2;
    for (long p = 2; p <= M; ++p) {
        if (!arith::is_prime(p)) continue;
        mpq_class ap;
        if (p == 2) {
            ap = L.A2;
        } else {
            auto it = f.eigenvalues.find(p);
            if (it == f.eigenvalues.end()) throw eigenvalue_gap_error(p);
            ap = it->second;
        }
        if (p <= M) L.A[p] = ap;
        mpz_ui_pow_ui(pk2.get_mpz_t(), (unsigned long)p, (unsigned long)(f.k - 2));
        mpq_class prev = 1, cur = ap;
        long q = p;
        while (q <= M / p) {
            q *= p;
            mpq_class next;
            if (p == 2)
                next = cur * ap; // A(2^{j+1}) = A(2)^{j+1}
            else
                next = ap * cur - mpq_class(pk2) * prev;
            L.A[q] = next;
            prev = cur;
            cur = next;
        }
    }
    for (long m = 2; m <= M; ++m) {
        auto fac = arith::factor(m);
        if (fac.size() <= 1) continue;
        mpq_class v = 1;
        for (auto& [p, e] : fac) {
            long q = 1;
            for (int i = 0; i < e; ++i) q *= p;
            v *= L.A[q];
        }
        L.A[m] = v;
    }
    return L;
}

// Exact integer form of the coefficient identity linking the half-integral
// form to its lift:
//   c(t n^2) = c(t) sum_{m|n} chi_t(n/m) mu(n/m) (n/m)^{(k-3)/2} A(m).
// (The stated a(.)-identity with the n^{-1/2} m^{-(k-3)/2} weights becomes
// this after multiplying through by (t n^2)^{k/4-1/2} and clearing powers.)
struct PrebReport {
    bool ok = false;
    long t = 0, n = 0;
    mpq_class lhs, rhs;
};

inline PrebReport verify_preb(const qspace::HalfIntegralForm& f, const LiftCoefficients& L,
                              long t, long n) {
    if (!arith::is_squarefree(t)) throw std::domain_error("verify_preb: t not square-free");
    if (t * n * n > f.N) throw needs_more_coefficients(t * n * n);
    PrebReport r;
    r.t = t;
    r.n = n;
    r.lhs = mpq_class(f.c[t * n * n]);
    mpq_class acc = 0;
    for (long m : arith::divisors(n)) {
        long d = n / m;
        int chi = chi_t(t, d, f.k);
        if (chi == 0) continue;
        int mu = arith::mobius(d);
        if (mu == 0) continue;
        mpz_class dpw;
        mpz_ui_pow_ui(dpw.get_mpz_t(), (unsigned long)d, (unsigned long)((f.k - 3) / 2));
        acc += mpq_class(chi * mu) * mpq_class(dpw) * L.at(m);
    }
    r.rhs = mpq_class(f.c[t]) * acc;
    r.ok = (r.lhs == r.rhs);
    return r;
}

// Scan of the coefficient bound a(t n^2) << |a(t)| n^eps: reports the
// maximal ratio |a(tn^2)| / (|a(t)| n^eps) over the grid, rows with
// a(t) = 0 excluded and counted separately.
struct LemmaBoundReport {
    double max_ratio = 0;
    long max_t = 0, max_n = 0;
    long rows = 0;
    long zero_rows = 0;
    bool growth_flag = false; // ratio at n > Nmax/2 exceeds twice the small-n fit
};

inline LemmaBoundReport lemma_bound_check(const qspace::HalfIntegralForm& f, long T, long Nmax,
                                          double eps) {
    LemmaBoundReport rep;
    double small_max = 0;
    for (long t = 1; t <= T; ++t) {
        if (!arith::is_squarefree(t)) continue;
        if (f.c[t] == 0) {
            ++rep.zero_rows;
            continue;
        }
        for (long n = 1; n <= Nmax && t * n * n <= f.N; ++n) {
            double at = std::abs(f.a_double(t));
            double atn = std::abs(f.a_double(t * n * n));
            double ratio = atn / (at * std::pow(double(n), eps));
            ++rep.rows;
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.max_t = t;
                rep.max_n = n;
            }
            if (n <= Nmax / 2) small_max = std::max(small_max, ratio);
        }
    }
    // flag if the large-n half of the grid escapes the small-n envelope
    for (long t = 1; t <= T; ++t) {
        if (!arith::is_squarefree(t) || f.c[t] == 0) continue;
        for (long n = Nmax / 2 + 1; n <= Nmax && t * n * n <= f.N; ++n) {
            double at = std::abs(f.a_double(t));
            double ratio = std::abs(f.a_double(t * n * n)) / (at * std::pow(double(n), eps));
            if (ratio > 2.0 * small_max) rep.growth_flag = true;
        }
    }
    return rep;
}

// Deligne bound |A(m)| <= d(m) m^{(k-2)/2}, exact.
inline bool deligne_bound_ok(const LiftCoefficients& L, long m) {
    mpz_class dm = arith::sigma(0, m);
    mpz_class mp;
    mpz_ui_pow_ui(mp.get_mpz_t(), (unsigned long)m, (unsigned long)(L.k - 2));
    mpq_class lhs = L.at(m) * L.at(m);
    return lhs <= mpq_class(dm * dm * mp);
}

// Truncated numerical check of the Dirichlet-series identity behind the
// coefficient relation, at real s = k/2 + 2:
//   sum_n a(tn^2) n^{-(s-k/2+1)}
//     = a(t) [sum_m chi_t(m) mu(m) m^{-(s-k/2+3/2)}] [sum_m A(m) m^{-s}].
struct Series45Report {
    double lhs = 0, rhs = 0;
    double lhs_tail = 0, rhs_tail = 0;
    bool ok = false;
};

inline Series45Report dirichlet_45_check(const qspace::HalfIntegralForm& f,
                                         const LiftCoefficients& L, long t,
                                         const EvalContext& ctx) {
    if (!arith::is_squarefree(t)) throw std::domain_error("dirichlet_45_check: t not square-free");
    mpfr_prec_t prec = ctx.prec();
    double s = double(f.k) / 2.0 + 2.0;
    double e1 = s - double(f.k) / 2.0 + 1.0;  // = 3
    double e2 = s - double(f.k) / 2.0 + 1.5;  // = 7/2
    long nmax = 1;
    while ((nmax + 1) * (nmax + 1) * t <= f.N) ++nmax;

    // fitted coefficient envelope |a(m)| <= C m^{1/4} on the table
    double C = 0;
    for (long m = 1; m <= f.N; ++m)
        C = std::max(C, std::abs(f.a_double(m)) / std::pow(double(m), 0.25));
    C *= ctx.tail_safety;

    Real lhs(prec);
    for (long n = 1; n <= nmax; ++n) {
        Real term = Real::of(f.c_normalized(t * n * n), prec);
        // a(tn^2) = c(tn^2)/(tn^2)^{(k-2)/4}
        term /= pow(Real::of(double(t) * double(n) * double(n), prec),
                    Real::of(double(f.k - 2) / 4.0, prec));
        term /= pow(Real::of((double)n, prec), Real::of(e1, prec));
        lhs += term;
    }
    // |a(tn^2)| <= C (t n^2)^{1/4}: tail sum C t^{1/4} n^{-5/2}
    double lhs_tail = C * std::pow(double(t), 0.25) * std::pow(double(nmax), -1.5) / 1.5;

    long mmax = L.M;
    Real rhs1(prec), rhs2(prec);
    for (long m = 1; m <= mmax; ++m) {
        int ch = chi_t(t, m, f.k);
        if (ch != 0) {
            int mu = arith::mobius(m);
            if (mu != 0) {
                Real term = Real::of((long)(ch * mu), prec);
                term /= pow(Real::of((double)m, prec), Real::of(e2, prec));
                rhs1 += term;
            }
        }
        rhs2 += Real::of(L.at(m), prec) / pow(Real::of((double)m, prec), Real::of(s, prec));
    }
    double rhs1_tail = std::pow(double(mmax), 1.0 - e2) / (e2 - 1.0);
    // |A(m)/m^s| <= d(m) m^{(k-2)/2 - s} <= 2 m^{(k-1)/2 - s}
    double expo = double(f.k - 1) / 2.0 - s; // = -5/2 at s = k/2+2
    double rhs2_tail = 2.0 * std::pow(double(mmax), expo + 1.0) / (-expo - 1.0);

    Real at = Real::of(f.c_normalized(t), prec) /
              pow(Real::of((double)t, prec), Real::of(double(f.k - 2) / 4.0, prec));
    Real rhs = at * rhs1 * rhs2;

    Series45Report rep;
    rep.lhs = lhs.to_double();
    rep.rhs = rhs.to_double();
    rep.lhs_tail = lhs_tail;
    double atd = std::abs(at.to_double());
    rep.rhs_tail = atd * (rhs1_tail * std::abs(rhs2.to_double()) +
                          rhs2_tail * std::abs(rhs1.to_double()) + rhs1_tail * rhs2_tail);
    rep.ok = std::abs(rep.lhs - rep.rhs) <= rep.lhs_tail + rep.rhs_tail + 1e-25;
    return rep;
}

} // namespace halfint::lift
