#pragma once

#include "halfint/mellin.hpp"

namespace halfint::dirichlet {

// Fast evaluator for the unit sums
//   S_d(s) = sum_{(u,d)=1} Lambda(f, u/d, s)
// at many s on a vertical line.  The u-sum collapses: the primal piece
// carries the Ramanujan sum c_d(m), the dual piece a Gauss-type twist
//   T_d(j) = sum_{v in [1,d]*} eps_v^k (d/v) e(j v/(L d))   (even d)
//   T_d(j) = sum_{v in [1,d]*} (v/d) e(j v/(L d))           (odd d),
// and both incomplete-gamma sums become integrals
//   U(s; y0) = y0^{s'} int_0^inf gtilde(y0 e^t) e^{s' t} dt
// of s-independent sampled functions gtilde, integrated by Gauss-Legendre
// panels sized to the expected oscillation.  Per node the cost is one
// weighted inner product per d; all incomplete-gamma work disappears.
// Certification is by direct probes against the lambda_entire route.
class LineEngine {
  public:
    LineEngine(const mellin::MellinForm& mf, const EvalContext& ctx, std::vector<long> ds,
               double max_im_sprime, double max_re_sprime, double abs_target)
        : mf_(&mf), ctx_(ctx), target_(abs_target), remax_(std::max(1.0, max_re_sprime)) {
        std::sort(ds.begin(), ds.end());
        ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
        double tmax = 1.0;
        for (long d : ds) tmax = std::max(tmax, std::log(40.0 * double(d) * (ctx.digits / 18.0 + 1.0)));
        // oscillation limits the panel width through Im(s'); the doubly
        // exponential decay of the samples through the working depth X
        double X = (double(ctx.digits) + 10.0) * 2.302585092994046;
        panel_width_ = std::min({0.5, 4.0 / (max_im_sprime + 1.0), 1.8 / std::sqrt(X)});
        build_grid(tmax);
        for (long d : ds) build_d(d);
    }

    // P_d(s) + Q_d(s) with an error estimate (sampling tails + certified
    // probe slack folded in by the caller).
    std::pair<Complex, double> unit_sum(long d, const Complex& s) {
        mpfr_prec_t prec = ctx_.prec();
        const PerD& pd = per_d_.at(d);
        long k = mf_->k();
        Complex sp = mellin::sprime_of(s, k, prec);
        Complex one_minus_s = -s;
        one_minus_s.re += 1;
        Complex spd = mellin::sprime_of(one_minus_s, k, prec);

        // shared exponentials e^{s' t_j}, e^{s~' t_j} for this s
        ensure_expo(sp, expo_a_, key_a_);
        ensure_expo(spd, expo_b_, key_b_);

        Complex P(prec);
        for (long j = pd.jlo_P; j <= pd.jhi_P; ++j) {
            Complex t = expo_a_[j];
            t *= pd.gP[j];
            P += t;
        }
        P *= exp(sp * log(Real::of(pd.y0, prec)));

        Complex Q(prec);
        for (long j = pd.jlo_Q; j <= pd.jhi_Q; ++j) {
            Complex t = expo_b_[j];
            t *= pd.gQ[j];
            Q += t;
        }
        Q *= exp(spd * log(Real::of(pd.y1, prec)));
        Complex kap = exp((Complex{Real::of(1L, prec), Real(prec)} - s * 2L) *
                          log(Real::of(pd.base, prec)));
        kap *= pd.unitpref;
        Q *= kap;

        double err = (pd.tailP + pd.tailQ) * (1.0 + abs(kap).to_double());
        return {P + Q, err};
    }

    // relative defect of the engine against the literal route at (d, s)
    double probe(long d, const Complex& s) {
        mellin::LambdaCaches caches;
        Complex direct(ctx_.prec());
        double derr = 0;
        for (long u = (d == 1 ? 0 : 1); u < (d == 1 ? 1 : d); ++u) {
            if (d > 1 && std::gcd(u, d) != 1) continue;
            auto lam = mellin::lambda_entire(*mf_, u, d, s, ctx_, caches);
            direct += lam.value;
            derr += lam.err;
        }
        auto fast = unit_sum(d, s);
        double scale = std::max({abs(direct).to_double(), fast.second + derr, 1e-300});
        return abs(direct - fast.first).to_double() / scale;
    }

    size_t nodes() const { return tnodes_.size(); }

  private:
    struct PerD {
        long d = 1;
        mpq_class y0, y1;
        long base = 1;
        Complex unitpref;
        std::vector<Real> gP;    // primal samples times GL weights
        std::vector<Complex> gQ; // dual samples times GL weights
        long jlo_P = 0, jhi_P = -1, jlo_Q = 0, jhi_Q = -1;
        double tailP = 0, tailQ = 0;
    };

    void build_grid(double tmax) {
        mpfr_prec_t prec = ctx_.prec();
        // Gauss-Legendre order 16 reference nodes on [-1, 1]
        static const double seeds[8] = {0.0950125098376374, 0.2816035507792589,
                                        0.4580167776572274, 0.6178762444026438,
                                        0.7554044083550030, 0.8656312023878318,
                                        0.9445750230732326, 0.9894009349916499};
        std::vector<Real> xs, ws;
        for (int i = 7; i >= 0; --i) xs.push_back(newton_legendre(-seeds[i], prec));
        for (int i = 0; i < 8; ++i) xs.push_back(newton_legendre(seeds[i], prec));
        for (auto& x : xs) {
            Real p(prec), dp(prec);
            legendre16(x, p, dp);
            Real w = Real::of(2L, prec) / ((Real::of(1L, prec) - x * x) * dp * dp);
            ws.push_back(w);
        }
        long panels = (long)std::ceil(tmax / panel_width_);
        Real pw = Real::of(panel_width_, prec);
        for (long p = 0; p < panels; ++p) {
            // panel edges built in mpfr so adjacent panels meet exactly
            Real a = pw * p;
            Real half = pw / 2;
            for (int i = 0; i < 16; ++i) {
                tnodes_.push_back(a + half * (xs[i] + 1));
                tweights_.push_back(ws[i] * half);
            }
        }
    }

    static Real newton_legendre(double seed, mpfr_prec_t prec) {
        Real x = Real::of(seed, prec);
        for (int it = 0; it < 40; ++it) {
            Real p(prec), dp(prec);
            legendre16(x, p, dp);
            Real step = p / dp;
            x -= step;
            if (abs(step).to_double() < 1e-60) break;
        }
        return x;
    }

    // P_16 and its derivative by the three-term recurrence
    static void legendre16(const Real& x, Real& p16, Real& dp16) {
        mpfr_prec_t prec = x.prec();
        Real pm1 = Real::of(1L, prec), p = x;
        for (long n = 1; n < 16; ++n) {
            Real pn = ((2 * n + 1) * x * p - n * pm1) / (n + 1);
            pm1 = p;
            p = pn;
        }
        p16 = p;
        // P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
        dp16 = (x * p16 - pm1) * 16L / (x * x - 1);
    }

    void build_d(long d) {
        mpfr_prec_t prec = ctx_.prec();
        PerD pd;
        pd.d = d;
        pd.y0 = mpq_class(1, 2 * d);
        auto fe0 = mellin::decompose_cusp(d == 1 ? 0 : first_unit(d), d);
        pd.base = fe0.base;
        pd.y1 = mpq_class(1) / (mpq_class(fe0.c2) * d * d * pd.y0);
        long k = mf_->k();
        if (fe0.tag == mellin::FunctionalEquationCase::Tag::OddD) {
            pd.unitpref = i_power(-arith::epsilon(d).i_exponent * k, prec);
        } else {
            Real ang = Real::pi(prec) * (-k);
            ang /= 4;
            Real sr(prec), cr(prec);
            sin_cos(sr, cr, ang);
            pd.unitpref = Complex{cr, sr};
        }

        // twisted coefficient tables
        const auto& prim = mf_->at_infinity;
        const auto& dual = mf_->at(fe0.target);
        const long Lp = 1, Lq = dual.series.lattice;
        double y0d = mpq_get_d(pd.y0.get_mpq_t());
        double y1d = mpq_get_d(pd.y1.get_mpq_t());
        double need = -std::log(std::max(target_ * 1e-2, 1e-280)) + remax_ * 2.0;
        long mmaxP = std::min<long>((long)std::ceil((need + (k + 4) * std::log(need / y0d + 9.0)) /
                                                    (6.283185307179586 * y0d)),
                                    prim.series.order);
        long mmaxQ = std::min<long>((long)std::ceil(double(Lq) *
                                                    (need + (k + 4) * std::log(need / y1d + 9.0)) /
                                                    (6.283185307179586 * y1d)),
                                    dual.series.order);

        // primal: c(m) c_d(m), integers
        std::vector<long> ctw(mmaxP + 1, 0);
        long phi_d = arith::euler_phi(d);
        for (long m = 1; m <= mmaxP; ++m) {
            if (prim.series.num[m] == 0) continue;
            long g = std::gcd(m, d);
            // Ramanujan sum c_d(m) = mu(d/g) phi(d) / phi(d/g)
            long dg = d / g;
            int mu = arith::mobius(dg);
            if (mu == 0) continue;
            long cd = mu * (phi_d / arith::euler_phi(dg));
            long cm = (long)mpz_get_si(prim.series.num[m].get_mpz_t());
            ctw[m] = cm * cd;
        }
        // dual: b(j) T_d(j)
        const auto& roots = caches_.root_table(Lq * d, ctx_);
        std::vector<Complex> Ttab(Lq * d, Complex(prec));
        for (long v = 1; v <= d; ++v) {
            if (std::gcd(v % d == 0 ? d : v % d, d) != 1) continue;
            long w;
            if (fe0.tag == mellin::FunctionalEquationCase::Tag::OddD)
                w = arith::kronecker(v, d);
            else
                w = arith::kronecker(d, v);
            if (w == 0) continue;
            Complex unit(prec);
            if (fe0.tag == mellin::FunctionalEquationCase::Tag::OddD) {
                unit.re += w;
            } else {
                unit = i_power(arith::epsilon(v).i_exponent * k, prec);
                unit *= w;
            }
            for (long j = 0; j < Lq * d; ++j) {
                long idx = (long)(((__int128)j * v) % (Lq * d));
                Ttab[j] += unit * roots[idx];
            }
        }
        std::vector<Complex> btw(mmaxQ + 1, Complex(prec));
        Real dend = Real::of(dual.series.den, prec);
        for (long j = dual.series.valuation(); j <= mmaxQ; ++j) {
            if (dual.series.num[j] == 0) continue;
            Complex t = Ttab[j % (Lq * d)];
            t *= Real::of(dual.series.num[j], prec);
            t /= Complex{dend, Real(prec)};
            btw[j] = t;
        }

        // sample gtilde on the grid, weights folded in
        size_t J = tnodes_.size();
        pd.gP.assign(J, Real(prec));
        pd.gQ.assign(J, Complex(prec));
        double cut = target_ * 1e-3;
        sample_real(ctw, Lp, pd.y0, pd.gP, pd.jlo_P, pd.jhi_P, cut);
        sample_complex(btw, Lq, pd.y1, pd.gQ, pd.jlo_Q, pd.jhi_Q, cut);
        pd.tailP = cut * 8.0 * double(J);
        pd.tailQ = cut * 8.0 * double(J);
        per_d_.emplace(d, std::move(pd));
    }

    static long first_unit(long d) {
        for (long u = 1; u < d; ++u)
            if (std::gcd(u, d) == 1) return u;
        return 0;
    }

    void sample_real(const std::vector<long>& coef, long L, const mpq_class& y,
                     std::vector<Real>& out, long& jlo, long& jhi, double cut) {
        mpfr_prec_t prec = ctx_.prec();
        Real ybase = Real::of(y, prec) * 2 * Real::pi(prec) / L;
        jlo = 0;
        jhi = -1;
        for (size_t j = 0; j < tnodes_.size(); ++j) {
            Real x1 = ybase * exp(tnodes_[j]); // decay per index
            double x1d = x1.to_double();
            // samples at large t are amplified by |e^{s' t}|: deepen the cut
            double cutj = cut * std::exp(-remax_ * tnodes_[j].to_double());
            long meff = (long)std::ceil(-std::log(std::max(cutj, 1e-280)) / std::max(x1d, 1e-12)) + 2;
            if (meff >= (long)coef.size()) meff = (long)coef.size() - 1;
            Real rho = exp(-x1);
            Real rpow = Real::of(1L, prec);
            Real acc(prec);
            bool any = false;
            for (long m = 1; m <= meff; ++m) {
                rpow *= rho;
                if (coef[m] == 0) continue;
                acc += rpow * coef[m];
                any = true;
            }
            if (any && std::abs(acc.to_double()) > cutj * 1e-2) {
                if (jhi < 0) jlo = (long)j;
                jhi = (long)j;
            }
            out[j] = acc * tweights_[j];
        }
        if (jhi < 0) jlo = 0;
    }

    void sample_complex(const std::vector<Complex>& coef, long L, const mpq_class& y,
                        std::vector<Complex>& out, long& jlo, long& jhi, double cut) {
        mpfr_prec_t prec = ctx_.prec();
        Real ybase = Real::of(y, prec) * 2 * Real::pi(prec) / L;
        jlo = 0;
        jhi = -1;
        for (size_t j = 0; j < tnodes_.size(); ++j) {
            Real x1 = ybase * exp(tnodes_[j]);
            double x1d = x1.to_double();
            double cutj = cut * std::exp(-remax_ * tnodes_[j].to_double());
            long meff = (long)std::ceil(-std::log(std::max(cutj, 1e-280)) / std::max(x1d, 1e-12)) + 2;
            if (meff >= (long)coef.size()) meff = (long)coef.size() - 1;
            Real rho = exp(-x1);
            Real rpow = Real::of(1L, prec);
            Complex acc(prec);
            bool any = false;
            for (long m = 1; m <= meff; ++m) {
                rpow *= rho;
                if (coef[m].is_zero()) continue;
                Complex t = coef[m];
                t *= rpow;
                acc += t;
                any = true;
            }
            if (any && abs(acc).to_double() > cutj * 1e-2) {
                if (jhi < 0) jlo = (long)j;
                jhi = (long)j;
            }
            out[j] = acc * tweights_[j];
        }
        if (jhi < 0) jlo = 0;
    }

    void ensure_expo(const Complex& sp, std::vector<Complex>& table, std::string& key) {
        std::string k = sp.re.str(30) + "|" + sp.im.str(30);
        if (k == key && !table.empty()) return;
        table.clear();
        table.reserve(tnodes_.size());
        for (auto& t : tnodes_) table.push_back(exp(sp * t));
        key = k;
    }

    const mellin::MellinForm* mf_;
    EvalContext ctx_;
    double target_;
    double remax_ = 4.0;
    double panel_width_ = 0.25;
    std::vector<Real> tnodes_, tweights_;
    std::map<long, PerD> per_d_;
    std::vector<Complex> expo_a_, expo_b_;
    std::string key_a_, key_b_;
    mellin::LambdaCaches caches_;
};

} // namespace halfint::dirichlet
