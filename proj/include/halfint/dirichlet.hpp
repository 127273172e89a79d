#pragma once

#include "halfint/line_engine.hpp"
#include "halfint/mellin.hpp"

#include <functional>

namespace halfint::dirichlet {

// ---------------------------------------------------------------------------
// SeriesEval: a value with certified error and the truncation that made it.
// ---------------------------------------------------------------------------

struct SeriesEval {
    Complex value;
    double certified_error = 0;
    long truncation = 0;   // r_max or m_max, whichever applies
    double tail_bound = 0; // the bound used for the dropped tail
    Complex s;
    bool mu_zero = false; // flagged when a non-square-free r can never enter M(s)
};

// ---------------------------------------------------------------------------
// D_r(s) = sum_{m = 0 mod r^2} a(m) m^{-s}
// ---------------------------------------------------------------------------

// Direct truncated summation from the coefficient table; oracle role only,
// Re(s) > 1 required.  Tail bound from the fitted |a(m)| <= A m^{1/4}
// envelope: sum_{n > N/r^2} A (n r^2)^{1/4 - sigma}.
inline SeriesEval d_r_direct(const mellin::MellinForm& mf, long r, const Complex& s,
                             const EvalContext& ctx, long m_max = -1) {
    if (!(s.re_d() > 1.0)) throw std::domain_error("d_r_direct: Re(s) must exceed 1");
    mpfr_prec_t prec = ctx.prec();
    const auto& g = mf.at_infinity;
    const auto& f = *mf.form;
    long N = std::min(m_max < 0 ? g.series.order : m_max, g.series.order);
    double sig = s.re_d();
    Complex acc(prec);
    Real norm = Real::of(f.normalization, prec);
    long r2 = r * r;
    for (long m = r2; m <= N; m += r2) {
        if (f.c[m] == 0) continue;
        // a(m) m^{-s} = c(m) m^{-s - (k-2)/4}
        Complex term = exp(mellin::sprime_of(s, f.k, prec) * (-log(Real::of(m, prec))));
        term *= Real::of(f.c[m], prec);
        acc += term;
    }
    acc *= norm;
    double A = g.env_A * ctx.tail_safety * std::abs(f.normalization.get_d());
    long n_next = N / r2 + 1;
    double expo = 0.25 - sig; // per-n exponent after factoring r^{2(1/4-sigma)}
    double tail = A * std::pow(double(r2), expo) * std::pow(double(n_next), expo + 1.0) /
                  (sig - 1.25 > 0 ? sig - 1.25 : 1e-12);
    if (sig <= 1.25) tail = 1e300; // envelope cannot certify below Re(s) = 5/4
    SeriesEval out;
    out.value = acc;
    out.truncation = N;
    out.tail_bound = tail;
    out.certified_error =
        tail + std::pow(2.0, -double(prec)) * double(N / r2 + 2) * 16.0 * (abs(acc).to_double() + 1.0);
    out.s = s;
    out.mu_zero = !arith::is_squarefree(r);
    return out;
}

// Entire evaluation through the twisted Mellin transforms:
//   D_r(s) = (2 pi)^{s'} / Gamma(s') r^{-2} sum_{d | r^2} sum_{(u,d)=1} Lambda(f, u/d, s).
inline SeriesEval d_r_eval(const mellin::MellinForm& mf, long r, const Complex& s,
                           const EvalContext& ctx, mellin::LambdaCaches* shared = nullptr) {
    if (r < 1) throw std::domain_error("d_r_eval: r must be positive");
    mpfr_prec_t prec = ctx.prec();
    const auto& f = *mf.form;
    mellin::LambdaCaches local;
    mellin::LambdaCaches& caches = shared ? *shared : local;

    Complex acc(prec);
    double err = 0;
    for (long d : arith::divisors(r * r)) {
        for (long u = (d == 1 ? 0 : 1); u < (d == 1 ? 1 : d); ++u) {
            if (d > 1 && std::gcd(u, d) != 1) continue;
            auto lam = mellin::lambda_entire(mf, u, d, s, ctx, caches);
            acc += lam.value;
            err += lam.err;
        }
    }
    Complex sp = mellin::sprime_of(s, f.k, prec);
    auto gam = special::gamma(sp, ctx);
    Complex pref = exp(sp * log(ctx.two_pi())) / gam.value;
    pref *= Real::of(f.normalization, prec);
    pref /= (long)(r * r);
    Complex val = pref * acc;
    double pm = abs(pref).to_double();
    double rel_gamma = gam.err / std::max(abs(gam.value).to_double(), 1e-300);
    SeriesEval out;
    out.value = val;
    out.s = s;
    out.truncation = r;
    out.certified_error = pm * err + abs(val).to_double() * (rel_gamma + 1e3 * std::pow(2.0, -double(prec)));
    out.tail_bound = 0;
    out.mu_zero = !arith::is_squarefree(r);
    return out;
}

// ---------------------------------------------------------------------------
// Envelope scans of |D_r| in r, and the Phragmen-Lindelof interpolation of
// the two fitted exponents used for the M(s) tail estimate.
// ---------------------------------------------------------------------------

struct BoundScanRow {
    long r = 0;
    double magnitude = 0;
    bool mu_zero = false;
};

struct BoundScan {
    double sigma = 0, tau = 0;
    std::vector<BoundScanRow> rows;
    double fitted_exponent = 0; // least squares log|D_r| ~ log C + e log r over square-free r
    double fitted_log_constant = 0;
};

inline BoundScan d_r_bound_scan(const mellin::MellinForm& mf, const std::vector<long>& r_list,
                                double sigma, double tau, const EvalContext& ctx) {
    BoundScan scan;
    scan.sigma = sigma;
    scan.tau = tau;
    Complex s = ctx.C(sigma, tau);
    mellin::LambdaCaches caches;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    for (long r : r_list) {
        auto v = d_r_eval(mf, r, s, ctx, &caches);
        BoundScanRow row;
        row.r = r;
        row.magnitude = abs(v.value).to_double();
        row.mu_zero = v.mu_zero;
        scan.rows.push_back(row);
        if (!row.mu_zero && r > 1 && row.magnitude > 0) {
            double x = std::log(double(r)), y = std::log(row.magnitude);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
    }
    if (n >= 2) {
        scan.fitted_exponent = (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
        scan.fitted_log_constant = (sy - scan.fitted_exponent * sx) / double(n);
    }
    return scan;
}

struct TailModel {
    double sigma_hi = 1.05, expo_hi = -2.0;  // fitted at the right anchor
    double sigma_lo = -0.05, expo_lo = 2.3;  // fitted at the left anchor
    double log_constant = 0;

    // linear interpolation of the two fitted exponents at sigma
    double exponent(double sigma) const {
        double t = (sigma_hi - sigma) / (sigma_hi - sigma_lo);
        return expo_hi + t * (expo_lo - expo_hi);
    }
    // empirical-fit tail for sum_{r > R} |D_r(sigma + i tau)|, labeled as such
    double tail(double sigma, long R) const {
        double e = exponent(sigma);
        if (e >= -1.0) return 1e300;
        return std::exp(log_constant) * std::pow(double(R), e + 1.0) / (-e - 1.0);
    }
};

inline TailModel fit_tail_model(const mellin::MellinForm& mf, const EvalContext& ctx,
                                long r_max_fit = 12) {
    std::vector<long> rs;
    for (long r = 1; r <= r_max_fit; ++r)
        if (arith::is_squarefree(r)) rs.push_back(r);
    auto hi = d_r_bound_scan(mf, rs, 1.05, 0.0, ctx);
    auto lo = d_r_bound_scan(mf, rs, -0.05, 0.0, ctx);
    TailModel m;
    m.sigma_hi = 1.05;
    m.sigma_lo = -0.05;
    m.expo_hi = hi.fitted_exponent;
    m.expo_lo = lo.fitted_exponent;
    m.log_constant = std::max(hi.fitted_log_constant, lo.fitted_log_constant) + std::log(10.0);
    return m;
}

// ---------------------------------------------------------------------------
// M(s) = sum_r mu(r) D_r(s), Re(s) > 3/4: truncated Moebius sum with the
// interpolated empirical tail, Cauchy-certified by comparing r_max against
// 2 r_max.
// ---------------------------------------------------------------------------

inline SeriesEval m_eval(const mellin::MellinForm& mf, const Complex& s, const EvalContext& ctx,
                         long r_max, const TailModel& tails, bool cauchy_certify = true,
                         mellin::LambdaCaches* shared = nullptr) {
    if (!(s.re_d() > 0.75)) throw convergence_error("m_eval: Re(s) must exceed 3/4");
    mpfr_prec_t prec = ctx.prec();
    mellin::LambdaCaches local;
    mellin::LambdaCaches& caches = shared ? *shared : local;
    Complex acc(prec);
    double err = 0;
    for (long r = 1; r <= r_max; ++r) {
        int mu = arith::mobius(r);
        if (mu == 0) continue;
        auto v = d_r_eval(mf, r, s, ctx, &caches);
        if (mu > 0)
            acc += v.value;
        else
            acc -= v.value;
        err += v.certified_error;
    }
    double tail = tails.tail(s.re_d(), r_max);
    double cauchy = 0;
    if (cauchy_certify) {
        Complex ext(prec);
        for (long r = r_max + 1; r <= 2 * r_max; ++r) {
            int mu = arith::mobius(r);
            if (mu == 0) continue;
            auto v = d_r_eval(mf, r, s, ctx, &caches);
            if (mu > 0)
                ext += v.value;
            else
                ext -= v.value;
            err += v.certified_error;
        }
        cauchy = abs(ext).to_double();
        tail = tails.tail(s.re_d(), 2 * r_max) + cauchy;
    }
    SeriesEval out;
    out.value = acc;
    out.s = s;
    out.truncation = r_max;
    out.tail_bound = tail;
    out.certified_error = err + tail;
    return out;
}

// ---------------------------------------------------------------------------
// Smoothed sums (compensated summation in fixed index order).
// ---------------------------------------------------------------------------

struct SmoothedSum {
    double value = 0;
    double tail_bound = 0;
    long terms = 0;
};

namespace detail {

struct Kahan {
    double s = 0, c = 0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

} // namespace detail

inline SmoothedSum smoothed_sum_sqfree(const qspace::HalfIntegralForm& f, double x, long t_max) {
    if (t_max > f.N) throw needs_more_coefficients(t_max);
    if (double(t_max) < 20.0 * x)
        throw std::domain_error("smoothed_sum_sqfree: t_max must be at least 20 x");
    detail::Kahan acc;
    long terms = 0;
    double amax = 0;
    for (long t = 1; t <= t_max; ++t) {
        if (!arith::is_squarefree(t) || f.c[t] == 0) continue;
        double a = f.a_double(t);
        amax = std::max(amax, std::abs(a));
        acc.add(a * std::exp(-double(t) / x));
        ++terms;
    }
    SmoothedSum out;
    out.value = acc.s;
    out.terms = terms;
    out.tail_bound = amax * std::pow(double(t_max), 0.25) * x * std::exp(-double(t_max) / x) * 2.0;
    return out;
}

inline SmoothedSum smoothed_sum_second_moment(const qspace::HalfIntegralForm& f, double x,
                                              long m_max) {
    if (m_max > f.N) throw needs_more_coefficients(m_max);
    if (double(m_max) < 20.0 * x)
        throw std::domain_error("smoothed_sum_second_moment: m_max must be at least 20 x");
    detail::Kahan acc;
    long terms = 0;
    double amax = 0;
    for (long m = 1; m <= m_max; ++m) {
        if (f.c[m] == 0) continue;
        double a = f.a_double(m);
        amax = std::max(amax, std::abs(a));
        acc.add(a * a * std::exp(-double(m) / x));
        ++terms;
    }
    SmoothedSum out;
    out.value = acc.s;
    out.terms = terms;
    out.tail_bound =
        amax * amax * std::sqrt(double(m_max)) * x * std::exp(-double(m_max) / x) * 2.0;
    return out;
}

// ---------------------------------------------------------------------------
// Log-log least squares exponent fit with residual diagnostics.
// ---------------------------------------------------------------------------

struct ExponentFit {
    double exponent = 0;
    double log_constant = 0;
    double stderr_exponent = 0;
    double max_residual = 0; // in log10 units
    long points = 0;
};

inline ExponentFit growth_exponent_fit(const std::vector<std::pair<double, double>>& xy) {
    if (xy.size() < 3)
        throw std::domain_error("growth_exponent_fit: need at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, v] : xy) {
        if (!(x > 0) || !(std::abs(v) > 0))
            throw std::domain_error("growth_exponent_fit: needs positive x and nonzero values");
        double lx = std::log(x), ly = std::log(std::abs(v));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = double(xy.size());
    ExponentFit fit;
    fit.points = (long)xy.size();
    fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.log_constant = (sy - fit.exponent * sx) / n;
    double ss = 0;
    for (auto& [x, v] : xy) {
        double pred = fit.log_constant + fit.exponent * std::log(x);
        double res = std::log(std::abs(v)) - pred;
        ss += res * res;
        fit.max_residual = std::max(fit.max_residual, std::abs(res) / 2.302585092994046);
    }
    double varx = sxx - sx * sx / n;
    if (xy.size() > 2 && varx > 0)
        fit.stderr_exponent = std::sqrt(ss / (n - 2.0) / varx);
    return fit;
}

// ---------------------------------------------------------------------------
// Contour cross-check of the inverse Mellin identity
//   (1/2 pi i) int_{Re s = 2} M_R(s) Gamma(s) x^s ds = sum_r<=R mu(r)
//        sum_{m = 0 mod r^2} a(m) e^{-m/x},
// with R sized so the right side matches the square-free smoothed sum to
// far below the comparison target.  Both sides are fully independent
// pipelines: analytic continuation + quadrature against exact table sums.
// ---------------------------------------------------------------------------

struct ContourReport {
    double integral = 0;
    double smoothed = 0;
    double relative_gap = 0;
    double quadrature_error = 0;
    double sieve_completion = 0; // bound on the dropped r > R smoothed part
    long r_max = 0;
    long nodes = 0;
};

inline ContourReport contour_check(const mellin::MellinForm& mf, double x,
                                   const EvalContext& ctx_in, const TailModel& tails) {
    if (x < 10.0 || x > 10000.0)
        throw std::domain_error("contour_check: x must lie in [10, 10^4]");
    EvalContext ctx = ctx_in;
    const auto& f = *mf.form;
    long R = (long)std::ceil(std::sqrt(x * std::log(1e10))) + 1;
    (void)tails;

    // right side: mu-sieved smoothed sums from the table
    detail::Kahan rhs;
    for (long r = 1; r <= R; ++r) {
        int mu = arith::mobius(r);
        if (mu == 0) continue;
        for (long m = r * r; m <= f.N; m += r * r) {
            if (f.c[m] == 0) continue;
            rhs.add(double(mu) * f.a_double(m) * std::exp(-double(m) / x));
        }
    }
    // completion bound: the dropped r in (R, sqrt(N)] plus m > N
    double completion = 0;
    for (long r = R + 1; (double)r * r <= 40.0 * x && r * r <= f.N; ++r) {
        if (arith::mobius(r) == 0) continue;
        for (long m = r * r; m <= f.N; m += r * r)
            completion += std::abs(f.a_double(m)) * std::exp(-double(m) / x);
    }
    completion += std::pow(double(f.N), 0.3) * std::exp(-double(f.N) / x) * double(f.N);

    mpfr_prec_t prec = ctx.prec();
    double mbar = 0; // tau-uniform bound on |M_R(2 + i tau)| from the direct sums
    {
        EvalContext lo = ctx.with_digits(18);
        for (long r = 1; r <= R; ++r) {
            if (arith::mobius(r) == 0) continue;
            auto v = d_r_direct(mf, r, lo.C(2.0, 0.0), lo);
            mbar += abs(v.value).to_double() + v.certified_error;
        }
    }

    // truncation height first (it sizes the oscillation the engine must meet)
    double target = 1e-9 * std::max(std::abs(rhs.s), 1.0);
    double Ttrunc = 8.0;
    auto gamma_line_tail = [&](double T0) {
        double lam = 1.5707963267948966;
        return mbar * std::pow(x, 2.0) * 2.0 * std::sqrt(6.28318) * std::pow(T0, 1.5) *
               std::exp(-lam * T0) / lam;
    };
    while (gamma_line_tail(Ttrunc) > target * 0.2) Ttrunc += 1.0;

    // collapsed-line engine over every d | r^2, r <= R square-free
    std::vector<long> dset;
    std::vector<mpq_class> weight_of_d;
    {
        std::map<long, mpq_class> W;
        for (long r = 1; r <= R; ++r) {
            int mu = arith::mobius(r);
            if (mu == 0) continue;
            for (long d : arith::divisors(r * r)) W[d] += mpq_class(mu, r * r);
        }
        for (auto& [d, w] : W) {
            dset.push_back(d);
            w.canonicalize();
            weight_of_d.push_back(w);
        }
    }
    double kshift = double(mf.k() - 2) / 4.0;
    LineEngine engine(mf, ctx, dset, Ttrunc + 2.0, 2.0 + kshift + 0.3,
                      ctx.target() * std::max(1.0, std::abs(rhs.s)));
    // certify the quadrature against the lambda_entire route on probes
    for (long d : {1L, 2L, 3L, 4L, 12L}) {
        for (double tau : {0.0, Ttrunc}) {
            double defect = engine.probe(d, ctx.C(2.0, tau));
            if (defect > std::pow(10.0, -double(ctx.digits - 10)))
                throw convergence_error("contour_check: engine probe defect " +
                                        std::to_string(defect));
        }
    }

    Real norm = Real::of(f.normalization, prec);
    auto m_at = [&](double tau) {
        Complex s = ctx.C(2.0, tau);
        Complex acc(prec);
        double errsum = 0;
        for (size_t i = 0; i < dset.size(); ++i) {
            auto [val, err] = engine.unit_sum(dset[i], s);
            Real w = Real::of(weight_of_d[i], prec);
            acc += val * w;
            errsum += err * std::abs(w.to_double());
        }
        Complex sp = mellin::sprime_of(s, f.k, prec);
        auto gsp = special::gamma(sp, ctx);
        Complex mval = acc * exp(sp * log(ctx.two_pi())) / gsp.value;
        mval *= norm;
        double mrel = gsp.err / std::max(abs(gsp.value).to_double(), 1e-300);
        double merr = errsum * abs(exp(sp * log(ctx.two_pi())) / gsp.value).to_double() *
                          std::abs(norm.to_double()) +
                      abs(mval).to_double() * mrel;
        auto gam = special::gamma(s, ctx);
        Complex xs = exp(s * log(ctx.R(x)));
        return std::pair<Complex, double>{
            mval * gam.value * xs, merr * abs(gam.value * xs).to_double() +
                                       gam.err * abs(mval * xs).to_double()};
    };
    double T = Ttrunc;

    // integral = (1/pi) Re int_0^T M Gamma x^s dtau  (Hermitian symmetry)
    double node_err_total = 0;
    long n = 48;
    double h = T / double(n);
    std::vector<std::pair<Complex, double>> vals(n + 1, {Complex(prec), 0.0});
    for (long i = 0; i <= n; ++i) vals[i] = m_at(h * double(i));
    auto trap = [&](const std::vector<std::pair<Complex, double>>& v, double step) {
        Real acc(prec);
        double e = 0;
        for (size_t i = 0; i < v.size(); ++i) {
            double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
            acc += v[i].first.re * w;
            e += v[i].second * w;
        }
        return std::pair<double, double>{(acc * step).to_double() / 3.141592653589793,
                                         e * step / 3.141592653589793};
    };
    auto [val0, err0] = trap(vals, h);
    double integral = val0, prev = val0;
    // halve until stable
    for (int level = 0; level < 6; ++level) {
        std::vector<std::pair<Complex, double>> mids(n);
        for (long i = 0; i < n; ++i) mids[i] = m_at(h * (double(i) + 0.5));
        std::vector<std::pair<Complex, double>> all;
        all.reserve(vals.size() + mids.size());
        for (long i = 0; i < n; ++i) {
            all.push_back(vals[i]);
            all.push_back(mids[i]);
        }
        all.push_back(vals[n]);
        vals = std::move(all);
        n *= 2;
        h /= 2;
        auto [vi, ei] = trap(vals, h);
        node_err_total = ei;
        integral = vi;
        if (std::abs(integral - prev) < target * 0.3) break;
        prev = vi;
        if (level == 5)
            throw convergence_error("contour_check: quadrature failed its error target");
    }

    ContourReport rep;
    rep.integral = integral;
    rep.smoothed = rhs.s;
    rep.relative_gap = std::abs(integral - rhs.s) / std::max(std::abs(rhs.s), 1e-12);
    rep.quadrature_error = node_err_total + gamma_line_tail(T) + std::abs(integral - prev);
    rep.sieve_completion = completion;
    rep.r_max = R;
    rep.nodes = n;
    return rep;
}

// ---------------------------------------------------------------------------
// Sign changes of a(t) over square-free t, exact integer signs.
// Zeros are never counted as sign changes; they are reported separately.
// ---------------------------------------------------------------------------

struct SignChangeReport {
    long t_max = 0;
    long count = 0;
    long zero_count = 0;
    std::vector<std::pair<long, long>> pairs; // consecutive square-free (t1, t2)
};

inline SignChangeReport sign_changes(const qspace::HalfIntegralForm& f, long t_max) {
    if (t_max > f.N) throw needs_more_coefficients(t_max);
    SignChangeReport rep;
    rep.t_max = t_max;
    long prev_t = 0;
    int prev_sign = 0;
    for (long t = 1; t <= t_max; ++t) {
        if (!arith::is_squarefree(t)) continue;
        int s = sgn(f.c[t]);
        if (s == 0) {
            ++rep.zero_count;
            continue;
        }
        if (prev_sign != 0 && s != prev_sign) {
            ++rep.count;
            rep.pairs.emplace_back(prev_t, t);
        }
        prev_sign = s;
        prev_t = t;
    }
    return rep;
}

// Running maximum of |a(t)|/t^{3/14} over t <= t_max.
struct IwaniecScan {
    double max_ratio = 0;
    long argmax = 0;
};

inline IwaniecScan iwaniec_check(const qspace::HalfIntegralForm& f, long t_max) {
    if (t_max > f.N) throw needs_more_coefficients(t_max);
    IwaniecScan scan;
    for (long t = 1; t <= t_max; ++t) {
        if (f.c[t] == 0) continue;
        double ratio = std::abs(f.a_double(t)) / std::pow(double(t), 3.0 / 14.0);
        if (ratio > scan.max_ratio) {
            scan.max_ratio = ratio;
            scan.argmax = t;
        }
    }
    return scan;
}

} // namespace halfint::dirichlet
