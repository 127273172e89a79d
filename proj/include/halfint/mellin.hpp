#pragma once

#include "halfint/lift.hpp"
#include "halfint/qspace.hpp"
#include "halfint/special.hpp"

#include <map>
#include <optional>

namespace halfint::mellin {

enum class Cusp { Infinity, Half, Zero };

inline const char* cusp_name(Cusp c) {
    switch (c) {
        case Cusp::Infinity: return "infinity";
        case Cusp::Half: return "1/2";
        default: return "0";
    }
}

// ---------------------------------------------------------------------------
// Series evaluation at a point of the upper half-plane, with certified tail.
// ---------------------------------------------------------------------------

inline CertifiedComplex eval_qseries(const qspace::ExactSeries& s, double env_C, double env_beta,
                                     const Complex& z, const EvalContext& ctx) {
    double y = z.im.to_double();
    if (y <= 0) throw std::domain_error("eval_qseries: Im z must be positive");
    mpfr_prec_t prec = ctx.prec();
    long L = s.lattice;
    double decay = 6.283185307179586 * y / double(L); // per index
    double target = ctx.target();

    long jmax = s.order;
    {
        // smallest j with env_C (j/L)^beta e^{-decay j} summed tail < target
        double logt = std::log(std::max(target, 1e-300) / (env_C * ctx.tail_safety + 1e-300));
        long j = std::max<long>(8, (long)std::ceil((-logt + env_beta * 12.0) / decay));
        while (env_C * ctx.tail_safety * std::pow(double(j) / L, env_beta) *
                   std::exp(-decay * double(j)) / (1.0 - std::exp(-decay * 0.5)) >
               target) {
            j = j * 5 / 4 + 4;
            if (j > s.order) break;
        }
        jmax = std::min(jmax, j);
    }
    double tail = env_C * ctx.tail_safety * std::pow(double(jmax + 1) / L, env_beta) *
                  std::exp(-decay * double(jmax + 1)) / (1.0 - std::exp(-decay * 0.5));
    if (jmax >= s.order && tail > target)
        throw needs_more_coefficients(s.order + 1);

    // w = e(z/L); iterate powers
    Complex w = [&] {
        Real t = z.re * 2 * Real::pi(prec) / L;
        Real sr(prec), cr(prec);
        sin_cos(sr, cr, t);
        Real damp = exp(-(Real::pi(prec) * 2 * z.im / (long)L));
        return Complex{damp * cr, damp * sr};
    }();
    Complex acc(prec), wp(prec);
    wp.re += 1;
    Real denr = Real::of(s.den, prec);
    for (long j = 0; j <= jmax; ++j) {
        if (j > 0) wp *= w;
        if (s.num[j] != 0) {
            Complex t = wp;
            t *= Real::of(s.num[j], prec);
            acc += t;
        }
    }
    acc /= Complex{denr, Real(prec)};
    double rounding = std::pow(2.0, -double(prec)) * double(jmax + 2) * 16.0;
    return {acc, tail + rounding};
}

// ---------------------------------------------------------------------------
// CuspExpansion: exact Fourier data of f_* at one of the three cusps.
// Expansions at 0 and 1/2 come from the closed-form images of the ring
// generators (theta is Fricke-stable; F maps to F - theta^4/16 at 0 and to
// theta^4/16 at 1/2, where the quarter-lattice theta h replaces theta); the
// assembled expansion is validated pointwise against the direct slash
// definition before use.
// ---------------------------------------------------------------------------

struct CuspExpansion {
    Cusp cusp = Cusp::Infinity;
    long k = 0;
    qspace::ExactSeries series;
    double env_C = 0; // |coeff(m)| <= env_C m^{(k+1)/4} over the computed range
    double env_A = 0; // |coeff(m)| <= env_A m^{(k-1)/4}: the Dirichlet-tail envelope

    long order_q() const { return series.order / series.lattice; }
    double envelope_beta() const { return double(k + 1) / 4.0; }
    double envelope_alpha() const { return double(k - 1) / 4.0; }
};

namespace detail {

inline void fit_envelope(CuspExpansion& e) {
    double beta = e.envelope_beta();
    double alpha = e.envelope_alpha();
    double C = 0, A = 0;
    const auto& s = e.series;
    double dend = mpz_get_d(s.den.get_mpz_t());
    for (long j = 1; j <= s.order; ++j) {
        if (s.num[j] == 0) continue;
        double c = std::abs(mpz_get_d(s.num[j].get_mpz_t())) / dend;
        double m = double(j) / s.lattice;
        C = std::max(C, c / std::pow(m, beta));
        A = std::max(A, c / std::pow(m, alpha));
    }
    e.env_C = C > 0 ? C : 1.0;
    e.env_A = A > 0 ? A : 1.0;
}

inline Complex slash_value(const qspace::HalfIntegralForm& f, const CuspExpansion& at_inf,
                           Cusp cusp, const Complex& z, const EvalContext& ctx) {
    mpfr_prec_t prec = ctx.prec();
    Real half_k = Real::of(-double(f.k) / 2.0, prec);
    if (cusp == Cusp::Infinity)
        return eval_qseries(at_inf.series, at_inf.env_C, at_inf.envelope_beta(), z, ctx).value;
    if (cusp == Cusp::Half) {
        // (-2z+1)^{-k/2} f(z / (-2z+1))
        Complex den = z * (-2L);
        den.re += 1;
        Complex az = z / den;
        Complex val = eval_qseries(at_inf.series, at_inf.env_C, at_inf.envelope_beta(), az, ctx).value;
        return val * cpow(den, half_k);
    }
    // (-2iz)^{-k/2} f(-1/(4z))
    Complex m2iz = z * Complex::of(0, -2, prec);
    Complex az = Complex::of(-1, 0, prec) / (z * 4L);
    Complex val = eval_qseries(at_inf.series, at_inf.env_C, at_inf.envelope_beta(), az, ctx).value;
    return val * cpow(m2iz, half_k);
}

} // namespace detail

// Build the expansion of f_* at a cusp to exponent bound order_q, exactly,
// then validate it pointwise against the direct slash definition at 20
// sample points.  Refuses (validation_error) if the residual exceeds the
// context budget.
inline CuspExpansion cusp_expansion(const qspace::HalfIntegralForm& f, Cusp cusp, long order_q,
                                    const EvalContext& ctx, bool validate = true) {
    if (order_q > f.N) throw needs_more_coefficients(order_q);
    CuspExpansion e;
    e.cusp = cusp;
    e.k = f.k;
    switch (cusp) {
        case Cusp::Infinity: {
            qspace::ExactSeries s(1, order_q);
            for (long m = 0; m <= order_q; ++m) s.num[m] = f.c[m];
            e.series = std::move(s);
            break;
        }
        case Cusp::Zero: {
            e.series = qspace::assemble_form(qspace::cusp0_coords(f.coords), f.k, order_q);
            break;
        }
        case Cusp::Half: {
            e.series = qspace::expand_at_half_cusp(f.coords, f.k, 4 * order_q);
            break;
        }
    }
    if (e.series.coeff(0) != 0)
        throw validation_error("cusp_expansion: nonvanishing constant term at cusp");
    detail::fit_envelope(e);
    if (!validate || cusp == Cusp::Infinity) return e;

    CuspExpansion at_inf;
    at_inf.cusp = Cusp::Infinity;
    at_inf.k = f.k;
    {
        qspace::ExactSeries s(1, f.N);
        for (long m = 0; m <= f.N; ++m) s.num[m] = f.c[m];
        at_inf.series = std::move(s);
    }
    detail::fit_envelope(at_inf);

    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        double x = -0.45 + 0.05 * double(i);
        double y = 0.45 + 0.02 * double(i % 5);
        Complex z = ctx.C(x, y);
        auto series_val = eval_qseries(e.series, e.env_C, e.envelope_beta(), z, ctx);
        Complex direct = detail::slash_value(f, at_inf, cusp, z, ctx);
        double resid = abs(series_val.value - direct).to_double();
        worst = std::max(worst, resid);
        double scale = std::max(1.0, abs(direct).to_double());
        if (resid > scale * std::pow(10.0, -double(ctx.digits - 10)))
            throw validation_error(std::string("cusp_expansion: pointwise validation failed at cusp ") +
                                   cusp_name(cusp) + ", residual " + std::to_string(resid));
    }
    (void)worst;
    return e;
}

// ---------------------------------------------------------------------------
// The functional-equation case decomposition of u/d.
// ---------------------------------------------------------------------------

struct FunctionalEquationCase {
    enum class Tag { FourDividesD, TwoExactlyDividesD, OddD } tag;
    long u = 0, d = 1, v = 1, e = 1;
    arith::Mat2 gamma{1, 0, 0, 1};
    Cusp target = Cusp::Zero;
    long c2 = 1;   // y1 = 1 / (c2 d^2 y0)
    long base = 1; // kappa(s) = base^{1-2s} * unit(k)

    // (-i)^{k/2} eps_v^k (d/v)   for 4|d and 2||d;
    // eps_d^{-k} (v/d)           for odd d.
    Complex unit(long k, mpfr_prec_t prec) const {
        if (tag == Tag::OddD) {
            Complex r = i_power(-arith::epsilon(d).i_exponent * k, prec);
            r *= (long)arith::kronecker(v, d);
            return r;
        }
        Real ang = Real::pi(prec) * (-k);
        ang /= 4;
        Real sr(prec), cr(prec);
        sin_cos(sr, cr, ang);
        Complex r{cr, sr}; // (-i)^{k/2}, principal
        r *= i_power(arith::epsilon(v).i_exponent * k, prec);
        r *= (long)arith::kronecker(d, v);
        return r;
    }

    Complex factor(const Complex& s, long k, mpfr_prec_t prec) const {
        Complex expo = s * (-2L);
        expo.re += 1;
        Complex r = exp(expo * log(Real::of(base, prec)));
        r *= unit(k, prec);
        return r;
    }
};

namespace detail {

// exact 2x2 rational matrices for the decomposition identities
struct QMat2 {
    mpq_class a, b, c, d;
    friend QMat2 operator*(const QMat2& x, const QMat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
                x.c * y.b + x.d * y.d};
    }
    friend bool operator==(const QMat2& x, const QMat2& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
    }
};

inline QMat2 q(long a, long b, long c, long d) {
    return {mpq_class(a), mpq_class(b), mpq_class(c), mpq_class(d)};
}

inline mpq_class qq(long a, long b) {
    mpq_class r(a, b);
    r.canonicalize();
    return r;
}

} // namespace detail

inline FunctionalEquationCase decompose_cusp(long u, long d) {
    if (d < 1) throw std::domain_error("decompose_cusp: d must be positive");
    u = ((u % d) + d) % d;
    if (std::gcd(u == 0 ? d : u, d) != 1)
        throw std::domain_error("decompose_cusp: gcd(u, d) must be 1");

    FunctionalEquationCase fe;
    fe.u = u;
    fe.d = d;
    using detail::QMat2;
    using detail::q;
    QMat2 lhs;

    if (d % 4 == 0) {
        fe.tag = FunctionalEquationCase::Tag::FourDividesD;
        fe.target = Cusp::Infinity;
        fe.c2 = 1;
        fe.base = d;
        long inv = arith::mod_inverse(u, d);
        fe.v = (inv == 0) ? d : d - inv; // v in [1, d], u v = -1 (mod d)
        fe.e = (u * fe.v + 1) / d;
        fe.gamma = arith::Mat2{-u, fe.e, -d, fe.v};
        lhs = detail::QMat2{mpq_class(1), detail::qq(u, d), mpq_class(0), mpq_class(1)} *
              detail::QMat2{detail::qq(4, d), mpq_class(0), mpq_class(0), mpq_class(d)};
        QMat2 rhs = q(-u, fe.e, -d, fe.v) *
                    QMat2{mpq_class(1), detail::qq(fe.v, d), mpq_class(0), mpq_class(1)} *
                    q(0, -1, 4, 0);
        if (!(lhs == rhs))
            throw validation_error("decompose_cusp: matrix identity failed (4|d)");
    } else if (d % 2 == 0) {
        fe.tag = FunctionalEquationCase::Tag::TwoExactlyDividesD;
        fe.target = Cusp::Half;
        fe.c2 = 1;
        fe.base = d;
        long inv = arith::mod_inverse(u, d);
        fe.v = (inv == 0) ? d : d - inv;
        fe.e = (u * fe.v + 1) / d;
        fe.gamma = arith::Mat2{2 * fe.e - u, fe.e, 2 * fe.v - d, fe.v};
        lhs = detail::QMat2{mpq_class(1), detail::qq(u, d), mpq_class(0), mpq_class(1)} *
              detail::QMat2{detail::qq(4, d), mpq_class(0), mpq_class(0), mpq_class(d)};
        QMat2 rhs = q(2 * fe.e - u, fe.e, 2 * fe.v - d, fe.v) * q(1, 0, -2, 1) *
                    QMat2{mpq_class(1), detail::qq(fe.v, d), mpq_class(0), mpq_class(1)} *
                    q(0, -1, 4, 0);
        if (!(lhs == rhs))
            throw validation_error("decompose_cusp: matrix identity failed (2||d)");
    } else {
        fe.tag = FunctionalEquationCase::Tag::OddD;
        fe.target = Cusp::Zero;
        fe.c2 = 4;
        fe.base = 2 * d;
        long inv = arith::mod_inverse(4 * u, d); // 0 when d = 1
        fe.v = (inv == 0) ? d : d - inv;         // 4 u v = -1 (mod d), v in [1, d]
        fe.e = (4 * u * fe.v + 1) / d;
        fe.gamma = arith::Mat2{fe.e, u, 4 * fe.v, d};
        lhs = detail::QMat2{mpq_class(1), mpq_class(u, d), mpq_class(0), mpq_class(1)} *
              detail::QMat2{mpq_class(1, d), mpq_class(0), mpq_class(0), mpq_class(d)};
        QMat2 rhs = q(fe.e, u, 4 * fe.v, d) *
                    QMat2{mpq_class(0), detail::qq(1, 4), mpq_class(-1), mpq_class(0)} *
                    QMat2{mpq_class(1), detail::qq(fe.v, d), mpq_class(0), mpq_class(1)} *
                    q(0, -1, 4, 0);
        if (!(lhs == rhs))
            throw validation_error("decompose_cusp: matrix identity failed (odd d)");
    }
    if (!fe.gamma.in_gamma0_4())
        throw validation_error("decompose_cusp: leftmost matrix not in Gamma_0(4)");
    return fe;
}

// The partner numerator: the u' whose case decomposition lands on v at the
// same d (the case congruences are involutions on units).
inline long dual_partner(Cusp label, long v, long d) {
    if (d == 1) return 0;
    long inv;
    if (label == Cusp::Zero)
        inv = arith::mod_inverse(4 * v, d);
    else
        inv = arith::mod_inverse(v, d);
    return (inv == 0) ? d % d : (d - inv) % d;
}

// ---------------------------------------------------------------------------
// Evaluation caches shared across twisted sums at a fixed s.
// ---------------------------------------------------------------------------

struct SideCache {
    Complex sprime;
    std::map<std::pair<long, long>, CertifiedComplex> gammas; // key: x/(2pi) as num/den
    std::map<long, Complex> jpows;                            // j^{-s'}

    const CertifiedComplex& gamma_at(long num, long den, const EvalContext& ctx) {
        long g = std::gcd(num, den);
        num /= g;
        den /= g;
        auto key = std::make_pair(num, den);
        auto it = gammas.find(key);
        if (it != gammas.end()) return it->second;
        Real x = Real::of(mpq_class(num, den), ctx.prec()) * ctx.two_pi();
        auto val = special::upper_gamma(sprime, x, ctx);
        return gammas.emplace(key, std::move(val)).first->second;
    }
    const Complex& jpow(long j, const EvalContext& ctx) {
        auto it = jpows.find(j);
        if (it != jpows.end()) return it->second;
        Complex v = exp(sprime * (-log(Real::of(j, ctx.prec()))));
        return jpows.emplace(j, std::move(v)).first->second;
    }
};

struct LambdaCaches {
    std::optional<SideCache> side_s, side_1ms; // s' and (1-s)'
    std::map<long, std::vector<Complex>> roots; // e(r/M) for modulus M

    const std::vector<Complex>& root_table(long M, const EvalContext& ctx) {
        auto it = roots.find(M);
        if (it != roots.end()) return it->second;
        std::vector<Complex> t;
        t.reserve(M);
        for (long r = 0; r < M; ++r)
            t.push_back(unit_exp(Real::of(mpq_class(r, M), ctx.prec())));
        return roots.emplace(M, std::move(t)).first->second;
    }
};

// ---------------------------------------------------------------------------
// The incomplete upper piece
//   U(g, w/d, s; y) = sum_m b_g(m) e(m w / d) (2 pi m)^{-s'} Gamma(s', 2 pi m y)
// with certified truncation tail from the fitted coefficient envelope.
// ---------------------------------------------------------------------------

inline CertifiedComplex incomplete_piece(const CuspExpansion& g, long w, long d,
                                         SideCache& side, const mpq_class& y,
                                         double abs_target, const EvalContext& ctx,
                                         LambdaCaches& caches) {
    mpfr_prec_t prec = ctx.prec();
    const long L = g.series.lattice;
    const double beta = g.envelope_beta();
    const double sig = side.sprime.re_d();
    const double yd = mpq_get_d(y.get_mpq_t());
    const double decay = 6.283185307179586 * yd / double(L);
    const double C = g.env_C * ctx.tail_safety;

    // choose truncation: certified tail below abs_target
    long j0 = std::max<long>(1, (long)std::ceil(double(L) * (2.0 + std::max(0.0, 2.0 * (sig - 1.0))) /
                                                (6.283185307179586 * yd)));
    auto tail_bound = [&](long J) {
        double ratio = std::exp(-decay) * std::exp(std::max(0.0, beta - 1.0) / double(J));
        if (ratio >= 0.999) return 1e300;
        double t = 2.0 * C * std::pow(double(J + 1) / L, beta - 1.0) *
                   std::pow(yd, sig - 1.0) / 6.283185307179586 * std::exp(-decay * double(J + 1));
        return t / (1.0 - ratio);
    };
    long jmax = j0;
    while (tail_bound(jmax) > abs_target && jmax < 100 * 1000 * 1000) jmax = jmax * 5 / 4 + 4;
    if (jmax > g.series.order) throw needs_more_coefficients(jmax / L + 1);

    const auto& roots = caches.root_table(L * d, ctx);
    Complex two_pi_L = Complex{ctx.two_pi() / L, Real(prec)};
    Complex pref = exp(side.sprime * (-log(two_pi_L.re))); // (2pi/L)^{-s'}

    Complex acc(prec);
    double err = 0;
    long wred = ((w % d) + d) % d;
    for (long j = g.series.valuation(); j <= jmax; ++j) {
        if (g.series.num[j] == 0) continue;
        const auto& gv = side.gamma_at(j * y.get_num().get_si(),
                                       L * y.get_den().get_si(), ctx);
        const Complex& jp = side.jpow(j, ctx);
        long ridx = (long)(((__int128)j * wred) % (L * d));
        Complex term = roots[ridx] * jp * gv.value;
        Real cf = Real::of(g.series.num[j], prec);
        term *= cf;
        acc += term;
        err += std::abs(cf.to_double()) * abs(jp).to_double() * gv.err;
    }
    acc /= Complex{Real::of(g.series.den, prec), Real(prec)};
    acc *= pref;
    double dend = std::abs(mpz_get_d(g.series.den.get_mpz_t()));
    double prefmag = abs(pref).to_double();
    err = err / dend * prefmag + tail_bound(jmax) * prefmag +
          std::pow(2.0, -double(prec)) * double(jmax + 2) * 32.0 * (abs(acc).to_double() + 1.0);
    return {acc, err};
}

// ---------------------------------------------------------------------------
// Lambda evaluators.
// ---------------------------------------------------------------------------

// Evaluation-ready bundle of the three cusp expansions of one eigenform.
struct MellinForm {
    const qspace::HalfIntegralForm* form = nullptr;
    CuspExpansion at_infinity, at_half, at_zero;

    const CuspExpansion& at(Cusp c) const {
        switch (c) {
            case Cusp::Infinity: return at_infinity;
            case Cusp::Half: return at_half;
            default: return at_zero;
        }
    }
    long k() const { return form->k; }
};

inline MellinForm prepare(const qspace::HalfIntegralForm& f, const EvalContext& ctx,
                          long order_q, bool validate = true) {
    MellinForm m;
    m.form = &f;
    m.at_infinity = cusp_expansion(f, Cusp::Infinity, std::min(order_q, f.N), ctx, false);
    m.at_half = cusp_expansion(f, Cusp::Half, std::min(order_q, f.N), ctx, validate);
    m.at_zero = cusp_expansion(f, Cusp::Zero, std::min(order_q, f.N), ctx, validate);
    return m;
}

inline Complex sprime_of(const Complex& s, long k, mpfr_prec_t prec) {
    Complex r = s;
    r.re += Real::of(mpq_class(k - 2, 4), prec);
    return r;
}

// Direct absolutely-convergent evaluation (oracle / overlap role):
//   Lambda(f, q, s) = Gamma(s') (2 pi)^{-s'} sum c(m) e(m q) m^{-s'}.
inline CertifiedComplex lambda_direct(const MellinForm& mf, const mpq_class& q, const Complex& s,
                                      const EvalContext& ctx) {
    if (!(s.re_d() > 1.25 + 1.0 / 64))
        throw convergence_error("lambda_direct: Re(s) must exceed 5/4 by a margin");
    mpfr_prec_t prec = ctx.prec();
    const auto& g = mf.at_infinity;
    Complex sp = sprime_of(s, mf.k(), prec);
    double sig = s.re_d();
    // |c(m) m^{-s'}| <= env_A m^{1/4 - sigma}, summable exactly on Re(s) > 5/4
    double expo = 0.25 - sig;
    long N = g.series.order;
    double C = g.env_A * ctx.tail_safety;
    double tail = C * std::pow(double(N), expo + 1.0) / (-expo - 1.0);

    mpq_class qr = q - mpq_class(mpz_class(q.get_num() / q.get_den()));
    if (qr < 0) qr += 1;
    long w = qr.get_num().get_si(), den = qr.get_den().get_si();

    Complex acc(prec);
    std::vector<Complex> roots;
    for (long r = 0; r < den; ++r) roots.push_back(unit_exp(Real::of(mpq_class(r, den), prec)));
    for (long m = 1; m <= N; ++m) {
        if (g.series.num[m] == 0) continue;
        Complex term = roots[(m % den) * (w % den) % den];
        term *= Real::of(g.series.num[m], prec);
        term *= exp(sp * (-log(Real::of(m, prec))));
        acc += term;
    }
    auto gam = special::gamma(sp, ctx);
    Complex pref = gam.value * exp(sp * (-log(ctx.two_pi())));
    Complex val = pref * acc;
    double prefmag = abs(pref).to_double();
    double err = prefmag * tail +
                 abs(acc).to_double() * (gam.err + prefmag * std::pow(2.0, -double(prec)) * 1e3) +
                 prefmag * std::pow(2.0, -double(prec)) * double(N) * 16.0;
    return {val, err};
}

// Entire evaluation by the two-piece incomplete-gamma split:
//   Lambda(f, u/d, s) = U(f, u/d, s; y0) + kappa(s) U(f_*, v/d, 1-s; y1),
// y1 = 1/(c2 d^2 y0).  For the dual expansions (label = Half or Zero) the
// same split runs backwards through the partner numerator u'.
struct LambdaResult {
    Complex value;
    double err = 0;
    long terms_primal = 0;
};

inline LambdaResult lambda_entire_at(const MellinForm& mf, Cusp label, long u, long d,
                                     const Complex& s, const EvalContext& ctx,
                                     LambdaCaches& caches,
                                     std::optional<mpq_class> y0_override = std::nullopt) {
    mpfr_prec_t prec = ctx.prec();
    long k = mf.k();
    Complex sp = sprime_of(s, k, prec);
    Complex one_minus_s = -s;
    one_minus_s.re += 1;
    Complex sp_dual = sprime_of(one_minus_s, k, prec);
    if (!caches.side_s) caches.side_s.emplace(SideCache{sp, {}, {}});
    if (!caches.side_1ms) caches.side_1ms.emplace(SideCache{sp_dual, {}, {}});

    mpq_class y0 = y0_override ? *y0_override : mpq_class(1, 2 * d);
    double target = ctx.target();

    if (label == Cusp::Infinity) {
        auto fe = decompose_cusp(u, d);
        mpq_class y1 = mpq_class(1) / (mpq_class(fe.c2) * d * d * y0);
        auto p1 = incomplete_piece(mf.at_infinity, u, d, *caches.side_s, y0, target, ctx, caches);
        auto p2 = incomplete_piece(mf.at(fe.target), fe.v, d, *caches.side_1ms, y1, target, ctx,
                                   caches);
        Complex kap = fe.factor(s, k, prec);
        Complex val = p1.value + kap * p2.value;
        double kmag = abs(kap).to_double();
        return {val, p1.err + kmag * p2.err + 1e2 * std::pow(2.0, -double(prec)), 0};
    }

    // dual labels: Lambda(f_*, v/d, s) = U(f_*, v/d, s; y0)
    //                + kappa_{u'}(1-s)^{-1} U(f, u'/d, 1-s; y1)
    if (label == Cusp::Half && !(d % 4 == 2))
        throw std::domain_error("lambda_entire_at: cusp-1/2 expansion pairs with 2||d");
    if (label == Cusp::Zero && (d % 2 == 0))
        throw std::domain_error("lambda_entire_at: cusp-0 expansion pairs with odd d");
    long uprime = dual_partner(label, u, d);
    auto fe = decompose_cusp(uprime, d);
    if (fe.v != ((u % d) + d) % d && d > 1)
        throw validation_error("lambda_entire_at: partner involution mismatch");
    mpq_class y1 = mpq_class(1) / (mpq_class(fe.c2) * d * d * y0);
    auto p1 = incomplete_piece(mf.at(label), u, d, *caches.side_s, y0, target, ctx, caches);
    auto p2 = incomplete_piece(mf.at_infinity, uprime, d, *caches.side_1ms, y1, target, ctx,
                               caches);
    Complex kap_inv = fe.factor(one_minus_s, k, prec);
    Complex one{Real::of(1L, prec), Real(prec)};
    kap_inv = one / kap_inv;
    Complex val = p1.value + kap_inv * p2.value;
    double kmag = abs(kap_inv).to_double();
    return {val, p1.err + kmag * p2.err + 1e2 * std::pow(2.0, -double(prec)), 0};
}

inline LambdaResult lambda_entire(const MellinForm& mf, long u, long d, const Complex& s,
                                  const EvalContext& ctx, LambdaCaches& caches,
                                  std::optional<mpq_class> y0_override = std::nullopt) {
    if (std::gcd(((u % d) + d) % d == 0 ? d : ((u % d) + d) % d, d) != 1)
        throw std::domain_error("lambda_entire: gcd(u, d) must be 1");
    return lambda_entire_at(mf, Cusp::Infinity, u, d, s, ctx, caches, y0_override);
}

// ---------------------------------------------------------------------------
// Functional-equation residual:
//   |Lambda(f, u/d, s) - kappa(s) Lambda(f_*, v/d, 1-s)| / max(|Lambda|, floor)
// with both sides evaluated through the entire continuation.
// ---------------------------------------------------------------------------

struct ResidualReport {
    double residual = 0;
    Complex lhs, rhs;
    double lhs_err = 0, rhs_err = 0;
    FunctionalEquationCase fe;
};

inline ResidualReport functional_equation_residual(const MellinForm& mf, long u, long d,
                                                   const Complex& s, const EvalContext& ctx,
                                                   LambdaCaches* fwd = nullptr,
                                                   LambdaCaches* rev = nullptr) {
    LambdaCaches local_fwd, local_rev;
    LambdaCaches& caches = fwd ? *fwd : local_fwd;
    LambdaCaches& caches2 = rev ? *rev : local_rev; // sides swap roles at 1-s
    auto fe = decompose_cusp(u, d);
    auto lhs = lambda_entire(mf, u, d, s, ctx, caches);
    Complex one_minus_s = -s;
    one_minus_s.re += 1;
    auto dual = lambda_entire_at(mf, fe.target, fe.v, d, one_minus_s, ctx, caches2);
    Complex kap = fe.factor(s, mf.k(), ctx.prec());
    Complex rhs = kap * dual.value;
    double kmag = abs(kap).to_double();
    double floor_scale = std::pow(10.0, -double(ctx.digits - 10));
    double denom = std::max(abs(lhs.value).to_double(), floor_scale);
    ResidualReport rep;
    rep.residual = abs(lhs.value - rhs).to_double() / denom;
    rep.lhs = lhs.value;
    rep.rhs = rhs;
    rep.lhs_err = lhs.err;
    rep.rhs_err = kmag * dual.err;
    rep.fe = fe;
    return rep;
}

// ---------------------------------------------------------------------------
// Decay profile along a vertical line: |Lambda(f, u/d, sigma + i tau)|
// against the envelope (1 + |tau|)^{k/4 + eps} e^{-(pi/2)|tau|}.
// ---------------------------------------------------------------------------

struct DecayRow {
    double tau = 0;
    double magnitude = 0;
    double envelope = 0;
    double ratio = 0;
};

struct DecayProfile {
    std::vector<DecayRow> rows;
    double fitted_constant = 0;
};

inline DecayProfile lambda_decay_profile(const MellinForm& mf, long u, long d, double sigma,
                                         const std::vector<double>& tau_grid,
                                         const EvalContext& ctx, double eps = 0.1) {
    DecayProfile out;
    for (double tau : tau_grid) {
        LambdaCaches caches;
        Complex s = ctx.C(sigma, tau);
        auto v = lambda_entire(mf, u, d, s, ctx, caches);
        DecayRow row;
        row.tau = tau;
        row.magnitude = abs(v.value).to_double();
        row.envelope = std::pow(1.0 + std::abs(tau), double(mf.k()) / 4.0 + eps) *
                       std::exp(-1.5707963267948966 * std::abs(tau));
        row.ratio = row.magnitude / row.envelope;
        out.fitted_constant = std::max(out.fitted_constant, row.ratio);
        out.rows.push_back(row);
    }
    return out;
}

} // namespace halfint::mellin
