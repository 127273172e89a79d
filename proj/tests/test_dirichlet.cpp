#include "halfint/dirichlet.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace halfint;
using namespace halfint::dirichlet;

namespace {

EvalContext ctx30() {
    EvalContext c;
    c.digits = 30;
    return c;
}

const qspace::HalfIntegralForm& form9() {
    static auto f = [] {
        EvalContext ctx;
        auto v = qspace::eigenbasis(9, 10000, {3, 5, 7}, ctx);
        qspace::compute_eigenvalues(v[0], 100);
        return v[0];
    }();
    return f;
}

const mellin::MellinForm& mform9() {
    static auto m = [] {
        auto ctx = ctx30();
        return mellin::prepare(form9(), ctx, 10000);
    }();
    return m;
}

} // namespace

TEST_CASE("d_r_direct: direct truncated sums") {
    auto ctx = ctx30();
    const auto& mf = mform9();
    Complex s = ctx.C(2, 0);

    auto full = d_r_direct(mf, 1, s, ctx);
    CHECK(abs(full.value).to_double() > 0.5); // a(1) = 1 dominates
    CHECK(full.certified_error < 5e-2);

    auto empty = d_r_direct(mf, 200, s, ctx); // 200^2 > N: empty sum, tail only
    CHECK(abs(empty.value).to_double() == 0.0);
    CHECK(empty.tail_bound > 0);

    auto r2 = d_r_direct(mf, 2, s, ctx);
    // multiples of 4 only: recompute naively in double
    double naive = 0;
    for (long m = 4; m <= form9().N; m += 4) naive += form9().a_double(m) / double(m) / double(m);
    CHECK(std::abs(r2.value.re_d() - naive) < 1e-10);

    CHECK_THROWS_AS(d_r_direct(mf, 1, ctx.C(0.9, 0), ctx), std::domain_error);
    CHECK(d_r_direct(mf, 4, s, ctx).mu_zero);
}

TEST_CASE("oracle equivalence: d_r_eval matches d_r_direct at s = 2") {
    auto ctx = ctx30();
    const auto& mf = mform9();
    Complex s = ctx.C(2, 0);
    mellin::LambdaCaches caches;
    for (long r = 1; r <= 10; ++r) {
        if (!arith::is_squarefree(r)) continue;
        auto ev = d_r_eval(mf, r, s, ctx, &caches);
        auto dir = d_r_direct(mf, r, s, ctx);
        CAPTURE(r, ev.certified_error, dir.certified_error);
        REQUIRE(abs(ev.value - dir.value).to_double() <=
                ev.certified_error + dir.certified_error);
        REQUIRE(ev.certified_error < 1e-25); // the continued side is sharp
    }
}

TEST_CASE("d_r_eval: entire continuation stable under precision doubling") {
    const auto& mf = mform9();
    auto lo = ctx30();
    auto hi = lo.with_digits(60);
    auto mf_hi = mellin::prepare(form9(), hi, 10000);
    Complex s_lo = lo.C(0.8, 0);
    Complex s_hi = hi.C(0.8, 0);
    auto a = d_r_eval(mf, 2, s_lo, lo);
    auto b = d_r_eval(mf_hi, 2, s_hi, hi);
    CHECK(abs(a.value - b.value).to_double() <= a.certified_error + b.certified_error + 1e-290);
}

TEST_CASE("d_r bound scans and tail model") {
    auto ctx = ctx30();
    const auto& mf = mform9();
    std::vector<long> rs;
    for (long r = 1; r <= 12; ++r) rs.push_back(r);

    auto hi = d_r_bound_scan(mf, rs, 1.05, 0.0, ctx);
    CHECK(hi.rows.size() == rs.size());
    // |D_r| r^2 bounded: fitted exponent comfortably below -1.5
    CHECK(hi.fitted_exponent < -1.5);
    for (auto& row : hi.rows)
        if (row.r == 4 || row.r == 8 || row.r == 9 || row.r == 12) CHECK(row.mu_zero);

    auto lo = d_r_bound_scan(mf, rs, -0.05, 0.0, ctx);
    CHECK(lo.fitted_exponent > 0.0);
    CHECK(lo.fitted_exponent < 2.31); // paper bound r^{2+5 eps}

    auto model = fit_tail_model(mf, ctx, 12);
    CHECK(model.exponent(0.75) < model.exponent(-0.05));
    CHECK(model.tail(0.8, 12) > 0);
    CHECK(model.tail(2.0, 12) < model.tail(1.0, 12));
}

TEST_CASE("m_eval: continuation consistency at s = 2 and 1.5") {
    auto ctx = ctx30();
    const auto& mf = mform9();
    const auto& f = form9();
    auto model = fit_tail_model(mf, ctx, 10);

    for (double sre : {2.0, 1.5}) {
        auto v = m_eval(mf, ctx.C(sre, 0), ctx, 8, model);
        double direct = 0;
        for (long t = 1; t <= f.N; ++t)
            if (arith::is_squarefree(t) && f.c[t] != 0)
                direct += f.a_double(t) / std::pow(double(t), sre);
        CAPTURE(sre, v.value.re_d(), direct);
        // true square-free Dirichlet tail at N = 1e4 sits near 1e-5; the
        // certified direct-side envelope is far weaker, so check both ways
        CHECK(std::abs(v.value.re_d() - direct) < 5e-3);
        CHECK(std::abs(v.value.im_d()) < 1e-20);
    }
    CHECK_THROWS_AS(m_eval(mf, ctx.C(0.7, 0), ctx, 8, model), convergence_error);
}

TEST_CASE("m_eval inside the continued region: finite, stable under r_max doubling") {
    auto ctx = ctx30();
    const auto& mf = mform9();
    auto model = fit_tail_model(mf, ctx, 10);
    auto v = m_eval(mf, ctx.C(0.8, 0), ctx, 8, model);
    CHECK(std::isfinite(abs(v.value).to_double()));
    // the fitted tail is honest but weak this close to Re(s) = 3/4; the
    // Cauchy stability of the Moebius sum is the practical certificate
    CHECK(v.certified_error < 100.0);
    auto v8 = m_eval(mf, ctx.C(0.8, 0), ctx, 8, model, false);
    auto v16 = m_eval(mf, ctx.C(0.8, 0), ctx, 16, model, false);
    CHECK(abs(v8.value - v16.value).to_double() < 0.05);
    auto w = m_eval(mf, ctx.C(0.8, 10.0), ctx, 8, model);
    CHECK(std::isfinite(abs(w.value).to_double()));
}

TEST_CASE("smoothed sums") {
    const auto& f = form9();
    auto s1 = smoothed_sum_sqfree(f, 100.0, 4000);
    auto s2 = smoothed_sum_sqfree(f, 100.0, 8000);
    CHECK(std::abs(s1.value - s2.value) <= s1.tail_bound + s2.tail_bound);
    CHECK(s1.terms > 2000);

    // x -> 0+: the sum collapses to a(1) e^{-1/x} -> 0
    auto tiny = smoothed_sum_sqfree(f, 0.05, 100);
    CHECK(std::abs(tiny.value) < 1e-8);

    auto m1 = smoothed_sum_second_moment(f, 100.0, 4000);
    CHECK(m1.value > 0); // positivity of squares
    CHECK_THROWS_AS(smoothed_sum_sqfree(f, 1000.0, 4000), std::domain_error);
    CHECK_THROWS_AS(smoothed_sum_sqfree(f, 10.0, 2 * f.N), needs_more_coefficients);
}

TEST_CASE("growth exponent fit on synthetic data") {
    std::vector<std::pair<double, double>> lin, sub;
    for (double x : {100.0, 316.0, 1000.0, 3162.0}) {
        lin.emplace_back(x, x);
        sub.emplace_back(x, std::pow(x, 0.75));
    }
    auto f1 = growth_exponent_fit(lin);
    CHECK(f1.exponent == Catch::Approx(1.0).margin(1e-9));
    auto f2 = growth_exponent_fit(sub);
    CHECK(f2.exponent == Catch::Approx(0.75).margin(1e-9));
    CHECK_THROWS_AS(growth_exponent_fit({{10.0, 1.0}}), std::domain_error);
}

TEST_CASE("sign changes: exact scan") {
    const auto& f = form9();

    // constant-positive synthetic table has no sign changes
    qspace::HalfIntegralForm synth;
    synth.k = 9;
    synth.N = 100;
    synth.c.assign(101, mpz_class(1));
    auto zero = sign_changes(synth, 100);
    CHECK(zero.count == 0);
    CHECK(zero.zero_count == 0);

    auto rep = sign_changes(f, 1000);
    CHECK(rep.count >= 10);
    CHECK(rep.zero_count > 0); // a(5) = a(13) = ... = 0
    for (auto& [t1, t2] : rep.pairs) {
        REQUIRE(t1 < t2);
        REQUIRE(arith::is_squarefree(t1));
        REQUIRE(arith::is_squarefree(t2));
        REQUIRE(sgn(f.c[t1]) * sgn(f.c[t2]) < 0);
    }
    auto rep2 = sign_changes(f, 10000);
    CHECK(rep2.count > rep.count);
}

TEST_CASE("iwaniec scan") {
    const auto& f = form9();
    auto scan = iwaniec_check(f, 1000);
    CHECK(scan.max_ratio >= 1.0); // t = 1 gives |a(1)| = 1
    CHECK(std::isfinite(scan.max_ratio));
    auto scan2 = iwaniec_check(f, 10000);
    CHECK(scan2.max_ratio >= scan.max_ratio);
}

TEST_CASE("line engine agrees with the per-u route") {
    auto ctx = ctx30();
    const auto& mf = mform9();
    std::vector<long> ds{1, 2, 3, 4, 5, 12, 25};
    LineEngine engine(mf, ctx, ds, 8.0, 4.2, 1e-36);
    for (long d : ds) {
        for (double tau : {0.0, 5.0}) {
            double defect = engine.probe(d, ctx.C(2.0, tau));
            CAPTURE(d, tau, defect);
            REQUIRE(defect < 1e-18);
        }
    }
}

TEST_CASE("contour identity at x = 10") {
    auto ctx = ctx30();
    ctx.digits = 25;
    const auto& mf = mform9();
    auto model = fit_tail_model(mf, ctx, 10);
    auto rep = contour_check(mf, 10.0, ctx, model);
    CAPTURE(rep.integral, rep.smoothed, rep.relative_gap, rep.quadrature_error, rep.r_max);
    CHECK(rep.relative_gap < 1e-6);
    CHECK(rep.sieve_completion < 1e-8);
}
