#pragma once

#include "halfint/arith.hpp"
#include "halfint/context.hpp"
#include "halfint/series.hpp"

#include <map>
#include <optional>

namespace halfint::qspace {

// ---------------------------------------------------------------------------
// Generators of the graded ring of modular forms on Gamma_0(4):
//   theta (weight 1/2) and F = sum_{n odd} sigma_1(n) q^n (weight 2).
// Monomials theta^a F^b with a + 4b = k span M_{k/2}(Gamma_0(4)).
// ---------------------------------------------------------------------------

inline ExactSeries theta_series(long N) {
    if (N < 1) throw std::domain_error("theta_series: order must be >= 1");
    ExactSeries s(1, N);
    s.num[0] = 1;
    for (long n = 1; n * n <= N; ++n) s.num[n * n] = 2;
    return s;
}

inline std::vector<long> sigma1_table(long N) {
    std::vector<long> s(N + 1, 0);
    for (long d = 1; d <= N; ++d)
        for (long m = d; m <= N; m += d) s[m] += d;
    return s;
}

inline ExactSeries f2_series(long N) {
    if (N < 1) throw std::domain_error("f2_series: order must be >= 1");
    auto sig = sigma1_table(N);
    ExactSeries s(1, N);
    for (long n = 1; n <= N; n += 2) s.num[n] = sig[n];
    return s;
}

// theta^4 by the closed form r_4(n) = 8 sigma(n) - 32 sigma(n/4); checked
// against theta^2 * theta^2 in the tests.
inline ExactSeries theta4_series(long N) {
    auto sig = sigma1_table(N);
    ExactSeries s(1, N);
    s.num[0] = 1;
    for (long n = 1; n <= N; ++n) {
        long v = 8 * sig[n];
        if (n % 4 == 0) v -= 32 * sig[n / 4];
        s.num[n] = v;
    }
    return s;
}

// theta expanded at the cusp 1/2: support (odd)^2 on the quarter-integer
// lattice, coefficient 2.  Order in lattice-4 units.
inline ExactSeries h_series(long N4) {
    ExactSeries s(4, N4);
    for (long n = 1; n * n <= N4; n += 2) s.num[n * n] = 2;
    return s;
}

// F - theta^4/16, the Fricke image of F up to the factor 4 z^2.
inline ExactSeries g_series(long N) {
    ExactSeries f = f2_series(N);
    f.scale(mpq_class(16));
    ExactSeries g = sub(f, theta4_series(N));
    g.scale(mpq_class(1, 16));
    return g;
}

inline std::vector<ExactSeries> monomial_basis(long k, long N) {
    if (k < 1 || k % 2 == 0) throw std::domain_error("monomial_basis: k must be odd >= 1");
    long B = k / 4;
    ExactSeries theta = theta_series(N);
    ExactSeries F = f2_series(N);
    std::vector<ExactSeries> out;
    for (long b = 0; b <= B; ++b) {
        ExactSeries m = pow(theta, k - 4 * b, N);
        if (b) m = mul(m, pow(F, b, N), N);
        out.push_back(std::move(m));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact linear algebra over Q (small dimensions).
// ---------------------------------------------------------------------------

namespace linalg {

using QMat = std::vector<std::vector<mpq_class>>;

inline void rref(QMat& A, std::vector<long>& pivots) {
    pivots.clear();
    if (A.empty()) return;
    size_t rows = A.size(), cols = A[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t sel = r;
        while (sel < rows && A[sel][c] == 0) ++sel;
        if (sel == rows) continue;
        std::swap(A[sel], A[r]);
        mpq_class inv = 1 / A[r][c];
        for (auto& x : A[r]) x *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == 0) continue;
            mpq_class f = A[i][c];
            for (size_t j = 0; j < cols; ++j) A[i][j] -= f * A[r][j];
        }
        pivots.push_back(long(c));
        ++r;
    }
}

inline std::vector<std::vector<mpq_class>> kernel_basis(QMat A) {
    if (A.empty()) return {};
    size_t cols = A[0].size();
    std::vector<long> pivots;
    rref(A, pivots);
    std::vector<bool> is_pivot(cols, false);
    for (long p : pivots) is_pivot[p] = true;
    std::vector<std::vector<mpq_class>> out;
    for (size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<mpq_class> v(cols, mpq_class(0));
        v[f] = 1;
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -A[r][f];
        out.push_back(std::move(v));
    }
    return out;
}

// Solve A x = b exactly; returns nullopt if inconsistent.
inline std::optional<std::vector<mpq_class>> solve(QMat A, std::vector<mpq_class> b) {
    size_t rows = A.size(), cols = A.empty() ? 0 : A[0].size();
    for (size_t i = 0; i < rows; ++i) A[i].push_back(b[i]);
    std::vector<long> pivots;
    rref(A, pivots);
    std::vector<mpq_class> x(cols, mpq_class(0));
    for (size_t r = 0; r < pivots.size(); ++r) {
        if (pivots[r] == long(cols)) return std::nullopt; // pivot in rhs column
        x[pivots[r]] = A[r][cols];
    }
    return x;
}

// Characteristic polynomial (monic), Faddeev-LeVerrier.
// Returns coefficients c so that p(x) = x^n + c[0] x^{n-1} + ... + c[n-1].
inline std::vector<mpq_class> char_poly(const QMat& M) {
    size_t n = M.size();
    QMat A(n, std::vector<mpq_class>(n, mpq_class(0)));
    std::vector<mpq_class> c;
    QMat P = M;
    for (size_t k = 1; k <= n; ++k) {
        if (k > 1) {
            // P = M (P + c_{k-1} I)
            QMat T = P;
            for (size_t i = 0; i < n; ++i) T[i][i] += c.back();
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j < n; ++j) {
                    mpq_class s = 0;
                    for (size_t l = 0; l < n; ++l) s += M[i][l] * T[l][j];
                    P[i][j] = s;
                }
        }
        mpq_class tr = 0;
        for (size_t i = 0; i < n; ++i) tr += P[i][i];
        c.push_back(-tr / mpq_class((long)k));
    }
    (void)A;
    return c;
}

inline mpq_class eval_poly(const std::vector<mpq_class>& c, const mpq_class& x) {
    mpq_class v = 1; // leading monic coefficient
    for (auto& ci : c) v = v * x + ci;
    return v;
}

} // namespace linalg

// ---------------------------------------------------------------------------
// HalfIntegralForm: an element of S_{k/2}(Gamma_0(4)) with exact integer
// coefficient table, its monomial coordinates, and recorded eigenvalues.
// The table is primitive (content 1) with positive leading coefficient;
// `normalization` rescales it to the c(first nonzero) = 1 convention, so
// a(m) = normalization * c(m) / m^{k/4 - 1/2}.
// ---------------------------------------------------------------------------

struct HalfIntegralForm {
    long k = 0;
    long N = 0;
    std::vector<mpz_class> c;          // c[0..N]
    std::vector<mpq_class> coords;     // coordinates over theta^{k-4b} F^b
    std::map<long, mpq_class> eigenvalues;
    mpq_class normalization = 1;

    long first_nonzero() const {
        for (long m = 0; m <= N; ++m)
            if (c[m] != 0) return m;
        return -1;
    }
    mpq_class c_normalized(long m) const {
        if (m < 0 || m > N) throw needs_more_coefficients(m);
        return mpq_class(c[m]) * normalization;
    }
    double a_double(long m) const {
        mpq_class cm = c_normalized(m);
        return cm.get_d() / std::pow(double(m), double(k - 2) / 4.0);
    }
};

// Assemble sum_b coords[b] theta^{k-4b} F^b to order N, exactly.
inline ExactSeries assemble_form(const std::vector<mpq_class>& coords, long k, long N) {
    long B = k / 4;
    if ((long)coords.size() != B + 1)
        throw std::domain_error("assemble_form: coordinate size mismatch");
    ExactSeries theta = theta_series(N);
    ExactSeries F = f2_series(N);
    ExactSeries acc(1, N);
    std::vector<ExactSeries> Fp(B + 1);
    for (long b = 0; b <= B; ++b) {
        if (coords[b] == 0) continue;
        if (Fp[b].order < 0) Fp[b] = pow(F, b, N);
        ExactSeries term = mul(pow(theta, k - 4 * b, N), Fp[b], N);
        term.scale(coords[b]);
        acc = add(acc, term);
    }
    acc.order = N; // all inputs exact to N; zero coords do not limit the order
    return acc;
}

// Monomial-coordinate maps of the two nontrivial cusp expansions (exact):
//   at 0:   theta^a F^b -> (-1)^b theta^a (F - theta^4/16)^b, which in the
//           monomial family reads coords0_j = (-1)^j sum_{b>=j} x_b C(b,j) 16^{j-b};
//   at 1/2: theta^a F^b -> 16^{-b} h^a theta^{4b} on the quarter lattice.
inline std::vector<mpq_class> cusp0_coords(const std::vector<mpq_class>& x) {
    long B = (long)x.size() - 1;
    std::vector<mpq_class> out(B + 1, mpq_class(0));
    for (long j = 0; j <= B; ++j) {
        mpq_class s = 0;
        mpz_class binom;
        for (long b = j; b <= B; ++b) {
            mpz_bin_uiui(binom.get_mpz_t(), (unsigned long)b, (unsigned long)j);
            mpq_class pw(1);
            for (long t = 0; t < b - j; ++t) pw /= 16;
            s += x[b] * mpq_class(binom) * pw;
        }
        if (j & 1) s = -s;
        out[j] = s;
    }
    return out;
}

// Expansion at infinity / 0 (lattice 1) or 1/2 (lattice 4) of the form with
// the given monomial coordinates, to exponent bound `order` in lattice units.
inline ExactSeries expand_at_half_cusp(const std::vector<mpq_class>& coords, long k, long N4) {
    long B = k / 4;
    ExactSeries h = h_series(N4);
    ExactSeries theta4_l4 = theta4_series(N4 / 4 + 1).stretched(4).truncated(N4);
    ExactSeries acc(4, N4);
    std::vector<ExactSeries> t4p(B + 1);
    for (long b = 0; b <= B; ++b) {
        if (coords[b] == 0) continue;
        ExactSeries term = pow(h, k - 4 * b, N4);
        if (b) {
            if (t4p[b].order < 0) t4p[b] = pow(theta4_l4, b, N4);
            term = mul(term, t4p[b], N4);
        }
        mpq_class sc = coords[b];
        for (long t = 0; t < b; ++t) sc /= 16;
        term.scale(sc);
        acc = add(acc, term);
    }
    acc.order = N4;
    return acc;
}

// ---------------------------------------------------------------------------
// Cusp subspace: combinations of monomials whose constant terms vanish at
// all three cusps.  The constant terms are exact: 1 at infinity for b = 0
// only, 16^{-b} at 0, and 0 at 1/2 (the half-cusp expansions are supported
// on strictly positive quarter-integers).
// ---------------------------------------------------------------------------

inline std::vector<HalfIntegralForm> cusp_subspace(long k, long N, const EvalContext& ctx) {
    (void)ctx; // construction is exact; ctx kept for interface stability
    if (k < 5 || k % 2 == 0) throw std::domain_error("cusp_subspace: k must be odd and >= 5");
    long B = k / 4;
    long dimM = B + 1;
    if (N < 2 * dimM + 10)
        throw needs_more_coefficients(2 * dimM + 10);

    linalg::QMat constraints(3, std::vector<mpq_class>(B + 1, mpq_class(0)));
    constraints[0][0] = 1; // constant term at infinity
    for (long b = 0; b <= B; ++b) {
        mpq_class v(1);
        for (long t = 0; t < b; ++t) v /= 16;
        constraints[1][b] = v; // constant term at 0
        // constraints[2] stays zero: cusp 1/2 constant term vanishes identically
    }
    auto kernel = linalg::kernel_basis(constraints);

    std::vector<HalfIntegralForm> out;
    for (auto& v : kernel) {
        HalfIntegralForm f;
        f.k = k;
        f.N = N;
        f.coords = v;
        ExactSeries s = assemble_form(v, k, N);
        // integer-clear: the table is num/den with content removed
        s.normalize();
        mpz_class content = 0;
        for (auto& x : s.num)
            if (x != 0) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), x.get_mpz_t());
        if (content == 0) content = 1;
        long fn = -1;
        for (long m = 0; m <= N; ++m)
            if (s.num[m] != 0) {
                fn = m;
                break;
            }
        int flip = (fn >= 0 && sgn(s.num[fn]) < 0) ? -1 : 1;
        f.c.resize(N + 1);
        for (long m = 0; m <= N; ++m) f.c[m] = flip * s.num[m] / content;
        // keep coords consistent with the cleared integer table
        mpq_class rescale = mpq_class(flip) * mpq_class(s.den, content);
        rescale.canonicalize();
        for (auto& x : f.coords) x *= rescale;
        f.normalization = (fn >= 0) ? mpq_class(1) / mpq_class(f.c[fn]) : mpq_class(1);
        out.push_back(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hecke operators T(p^2) for odd primes p (Shimura's formula on the c(n)
// normalization), plus the U(4) map used only as a consistency check.
// ---------------------------------------------------------------------------

inline std::vector<mpz_class> hecke_T_p2(const std::vector<mpz_class>& c, long p, long k) {
    if (p < 3 || !arith::is_prime(p) || p % 2 == 0)
        throw std::domain_error("hecke_T_p2: p must be an odd prime");
    long lambda = (k - 1) / 2;
    long N = (long)c.size() - 1;
    long M = N / (p * p);
    mpz_class plm1, p2lm1;
    mpz_ui_pow_ui(plm1.get_mpz_t(), (unsigned long)p, (unsigned long)(lambda - 1));
    mpz_ui_pow_ui(p2lm1.get_mpz_t(), (unsigned long)p, (unsigned long)(2 * lambda - 1));
    int chi_m1 = arith::kronecker((lambda & 1) ? -1 : 1, p);
    std::vector<mpz_class> out(M + 1);
    for (long n = 0; n <= M; ++n) {
        mpz_class v = c[p * p * n];
        int chi = chi_m1 * arith::kronecker(n, p);
        if (chi) {
            if (chi > 0)
                v += plm1 * c[n];
            else
                v -= plm1 * c[n];
        }
        if (n % (p * p) == 0) v += p2lm1 * c[n / (p * p)];
        out[n] = v;
    }
    return out;
}

inline std::vector<mpz_class> hecke_U4(const std::vector<mpz_class>& c) {
    long N = (long)c.size() - 1;
    std::vector<mpz_class> out(N / 4 + 1);
    for (long n = 0; n <= N / 4; ++n) out[n] = c[4 * n];
    return out;
}

// ---------------------------------------------------------------------------
// Simultaneous eigenbasis over Q.
// ---------------------------------------------------------------------------

namespace detail {

// Express each hecke image in the basis of the given forms by exact solve
// at enough coordinate indices, then verify the identity on the whole
// common range.  Returns the matrix column-wise: image_j = sum_i M[i][j] f_i.
inline linalg::QMat hecke_matrix(const std::vector<HalfIntegralForm>& basis, long p) {
    size_t D = basis.size();
    long N = basis[0].N;
    long M = N / (p * p);
    std::vector<std::vector<mpz_class>> images(D);
    for (size_t j = 0; j < D; ++j) images[j] = hecke_T_p2(basis[j].c, p, basis[j].k);

    // choose probe indices making the basis matrix invertible
    std::vector<long> probes;
    linalg::QMat A;
    for (long m = 1; m <= M && probes.size() < D; ++m) {
        std::vector<mpq_class> row(D);
        bool nonzero = false;
        for (size_t i = 0; i < D; ++i) {
            row[i] = mpq_class(basis[i].c[m]);
            if (row[i] != 0) nonzero = true;
        }
        if (!nonzero) continue;
        A.push_back(row);
        probes.push_back(m);
        linalg::QMat T = A;
        std::vector<long> piv;
        linalg::rref(T, piv);
        if (piv.size() < A.size()) {
            A.pop_back();
            probes.pop_back();
        }
    }
    if (probes.size() < D)
        throw unsupported_weight_error("hecke_matrix: basis probes deficient (N too small)");

    linalg::QMat Mout(D, std::vector<mpq_class>(D, mpq_class(0)));
    for (size_t j = 0; j < D; ++j) {
        std::vector<mpq_class> rhs(D);
        for (size_t r = 0; r < D; ++r) rhs[r] = mpq_class(images[j][probes[r]]);
        auto sol = linalg::solve(A, rhs);
        if (!sol) throw unsupported_weight_error("hecke_matrix: image not in span");
        // stability verification: exact identity on the full computed range
        for (long m = 0; m <= M; ++m) {
            mpq_class acc = 0;
            for (size_t i = 0; i < D; ++i)
                if ((*sol)[i] != 0) acc += (*sol)[i] * mpq_class(basis[i].c[m]);
            if (acc != mpq_class(images[j][m]))
                throw unsupported_weight_error(
                    "hecke_matrix: T(p^2) image leaves the cusp subspace");
        }
        for (size_t i = 0; i < D; ++i) Mout[i][j] = (*sol)[i];
    }
    return Mout;
}

// Integer roots of a monic rational polynomial of degree <= 3, with exact
// verification; eigenvalues of Hecke operators are algebraic integers, so
// rational roots must be integers.
inline std::vector<mpq_class> integer_roots(const std::vector<mpq_class>& cp) {
    size_t deg = cp.size();
    std::vector<double> coef(deg);
    for (size_t i = 0; i < deg; ++i) coef[i] = cp[i].get_d();
    std::vector<double> approx;
    if (deg == 1) {
        approx = {-coef[0]};
    } else if (deg == 2) {
        double b = coef[0], c = coef[1];
        double disc = b * b - 4 * c;
        if (disc < 0) return {};
        approx = {(-b + std::sqrt(disc)) / 2, (-b - std::sqrt(disc)) / 2};
    } else if (deg == 3) {
        // depressed cubic, trigonometric/cardano, real roots only
        double a = coef[0], b = coef[1], c = coef[2];
        double p = b - a * a / 3, q = 2 * a * a * a / 27 - a * b / 3 + c;
        double disc = q * q / 4 + p * p * p / 27;
        if (disc > 0) {
            double u = std::cbrt(-q / 2 + std::sqrt(disc)), v = std::cbrt(-q / 2 - std::sqrt(disc));
            approx = {u + v - a / 3};
        } else {
            double r = std::sqrt(-p * p * p / 27);
            double phi = std::acos(std::clamp(-q / (2 * r), -1.0, 1.0));
            double m = 2 * std::sqrt(-p / 3);
            approx = {m * std::cos(phi / 3) - a / 3,
                      m * std::cos((phi + 2 * M_PI) / 3) - a / 3,
                      m * std::cos((phi + 4 * M_PI) / 3) - a / 3};
        }
    } else {
        throw unsupported_weight_error("integer_roots: degree > 3 not supported");
    }
    std::vector<mpq_class> out;
    for (double r : approx) {
        for (long delta = -1; delta <= 1; ++delta) {
            mpq_class cand((long)std::llround(r) + delta);
            if (linalg::eval_poly(cp, cand) == 0) {
                bool dup = false;
                for (auto& x : out) dup |= (x == cand);
                if (!dup) out.push_back(cand);
            }
        }
    }
    return out;
}

inline HalfIntegralForm combine(const std::vector<HalfIntegralForm>& basis,
                                const std::vector<mpq_class>& y) {
    const auto& any = basis[0];
    HalfIntegralForm f;
    f.k = any.k;
    f.N = any.N;
    f.coords.assign(any.coords.size(), mpq_class(0));
    std::vector<mpq_class> table(any.N + 1, mpq_class(0));
    for (size_t i = 0; i < basis.size(); ++i) {
        if (y[i] == 0) continue;
        for (long m = 0; m <= any.N; ++m) table[m] += y[i] * mpq_class(basis[i].c[m]);
        for (size_t b = 0; b < f.coords.size(); ++b) f.coords[b] += y[i] * basis[i].coords[b];
    }
    // clear denominators and content
    mpz_class lcm = 1;
    for (auto& q : table) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den_mpz_t());
    std::vector<mpz_class> ints(any.N + 1);
    for (long m = 0; m <= any.N; ++m) {
        mpq_class v = table[m] * mpq_class(lcm);
        ints[m] = v.get_num(); // denominator 1 by construction
    }
    mpz_class content = 0;
    for (auto& x : ints)
        if (x != 0) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), x.get_mpz_t());
    if (content == 0) content = 1;
    long fn = -1;
    for (long m = 0; m <= any.N; ++m)
        if (ints[m] != 0) {
            fn = m;
            break;
        }
    int flip = (fn >= 0 && sgn(ints[fn]) < 0) ? -1 : 1;
    f.c.resize(any.N + 1);
    for (long m = 0; m <= any.N; ++m) f.c[m] = flip * ints[m] / content;
    mpq_class rescale = mpq_class(flip * lcm, content);
    rescale.canonicalize();
    for (auto& b : f.coords) b *= rescale;
    f.normalization = (fn >= 0) ? mpq_class(1) / mpq_class(f.c[fn]) : mpq_class(1);
    return f;
}

// Reduce a basis sharing one eigensystem so leading table indices strictly
// increase; keeps the (eigenvalue tuple, first-nonzero) ordering total.
inline void echelonize_tables(std::vector<HalfIntegralForm>& basis) {
    size_t n = basis.size();
    for (size_t i = 0; i < n; ++i) {
        size_t best = i;
        for (size_t j = i + 1; j < n; ++j)
            if (basis[j].first_nonzero() < basis[best].first_nonzero()) best = j;
        std::swap(basis[i], basis[best]);
        long fi = basis[i].first_nonzero();
        for (size_t j = i + 1; j < n; ++j) {
            if (basis[j].c[fi] == 0) continue;
            // b_j <- b_j - (c_j(fi)/c_i(fi)) b_i, re-cleared by combine
            std::vector<HalfIntegralForm> pair{basis[j], basis[i]};
            std::vector<mpq_class> w{mpq_class(1),
                                     -mpq_class(basis[j].c[fi]) / mpq_class(basis[i].c[fi])};
            basis[j] = combine(pair, w);
        }
    }
}

} // namespace detail

// Record lambda_p (exact, verified on the full overlap range) for all odd
// primes p <= pmax with p^2 <= N.
inline void compute_eigenvalues(HalfIntegralForm& f, long pmax) {
    long n0 = f.first_nonzero();
    if (n0 < 0) throw std::domain_error("compute_eigenvalues: zero form");
    for (long p = 3; p <= pmax; p += 2) {
        if (!arith::is_prime(p)) continue;
        if (p * p * n0 > f.N) break;
        auto img = hecke_T_p2(f.c, p, f.k);
        mpq_class lam(img[n0], f.c[n0]);
        lam.canonicalize();
        long M = f.N / (p * p);
        for (long n = 0; n <= M; ++n) {
            if (mpq_class(img[n]) != lam * mpq_class(f.c[n]))
                throw unsupported_weight_error(
                    "compute_eigenvalues: form is not a T(p^2) eigenvector");
        }
        f.eigenvalues[p] = lam;
    }
}

// Simultaneous eigenbasis of the Hecke operators T(p^2), p in `primes`
// (odd), over Q.  Irrational eigenvalues raise unsupported_weight_error.
inline std::vector<HalfIntegralForm> eigenbasis(long k, long N, const std::vector<long>& primes,
                                                const EvalContext& ctx) {
    auto cusp = cusp_subspace(k, N, ctx);
    if (primes.empty() || cusp.empty()) return cusp;
    for (long p : primes)
        if (p % 2 == 0) throw std::domain_error("eigenbasis: primes must be odd");

    std::vector<std::vector<HalfIntegralForm>> spaces{cusp};
    for (long p : primes) {
        std::vector<std::vector<HalfIntegralForm>> next;
        for (auto& space : spaces) {
            if (space.size() == 1) {
                next.push_back(space);
                continue;
            }
            auto M = detail::hecke_matrix(space, p);
            auto cp = linalg::char_poly(M);
            auto roots = detail::integer_roots(cp);
            size_t total = 0;
            std::vector<std::vector<HalfIntegralForm>> parts;
            for (auto& lam : roots) {
                linalg::QMat A = M;
                for (size_t i = 0; i < A.size(); ++i) A[i][i] -= lam;
                auto kern = linalg::kernel_basis(A);
                if (kern.empty()) continue;
                std::vector<HalfIntegralForm> sub;
                for (auto& y : kern) sub.push_back(detail::combine(space, y));
                total += sub.size();
                parts.push_back(std::move(sub));
            }
            if (total != space.size())
                throw unsupported_weight_error(
                    "eigenbasis: characteristic polynomial does not split over Q");
            for (auto& s : parts) next.push_back(std::move(s));
        }
        spaces = std::move(next);
    }

    std::vector<HalfIntegralForm> out;
    for (auto& s : spaces) {
        if (s.size() > 1) detail::echelonize_tables(s);
        for (auto& f : s) out.push_back(std::move(f));
    }
    long pmax = 3;
    for (long p : primes) pmax = std::max(pmax, p);
    for (auto& f : out) compute_eigenvalues(f, pmax);
    std::sort(out.begin(), out.end(), [&](const HalfIntegralForm& a, const HalfIntegralForm& b) {
        for (long p : primes) {
            const auto& la = a.eigenvalues.at(p);
            const auto& lb = b.eigenvalues.at(p);
            if (la != lb) return la < lb;
        }
        return a.first_nonzero() < b.first_nonzero();
    });
    return out;
}

} // namespace halfint::qspace
