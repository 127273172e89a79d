#include "halfint/qspace.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace halfint;
using namespace halfint::qspace;

namespace {
EvalContext ctx50() {
    EvalContext c;
    c.digits = 50;
    return c;
}
} // namespace

TEST_CASE("cusp subspace dimensions") {
    auto ctx = ctx50();
    CHECK(cusp_subspace(5, 300, ctx).empty());
    CHECK(cusp_subspace(7, 300, ctx).empty());
    CHECK(cusp_subspace(9, 300, ctx).size() == 1);
    CHECK(cusp_subspace(11, 300, ctx).size() == 1);
    CHECK(cusp_subspace(13, 300, ctx).size() == 2);
    CHECK_THROWS_AS(cusp_subspace(9, 12, ctx), needs_more_coefficients);
    CHECK_THROWS_AS(cusp_subspace(8, 300, ctx), std::domain_error);
}

TEST_CASE("weight 9/2 cusp form: normalization and identity with theta F (theta^4 - 16 F)") {
    auto ctx = ctx50();
    long N = 400;
    auto basis = cusp_subspace(9, N, ctx);
    REQUIRE(basis.size() == 1);
    const auto& f = basis[0];
    CHECK(f.first_nonzero() == 1);
    CHECK(f.c[1] == 1);
    CHECK(f.normalization == 1);

    auto theta = theta_series(N);
    auto F = f2_series(N);
    auto t4 = theta4_series(N);
    auto fac = sub(t4, [&] {
        auto x = f2_series(N);
        x.scale(mpq_class(16));
        return x;
    }());
    auto expect = mul(mul(theta, F, N), fac, N);
    for (long m = 0; m <= expect.order; ++m) CHECK(mpq_class(f.c[m]) == expect.coeff(m));
}

TEST_CASE("form table equals its monomial coordinate combination") {
    auto ctx = ctx50();
    for (long k : {9L, 13L}) {
        long N = 200;
        auto basis = cusp_subspace(k, N, ctx);
        auto monos = monomial_basis(k, N);
        for (const auto& f : basis) {
            ExactSeries acc(1, N);
            for (size_t b = 0; b < monos.size(); ++b) {
                ExactSeries t = monos[b];
                t.scale(f.coords[b]);
                acc = add(acc, t);
            }
            for (long m = 0; m <= N; ++m) {
                CAPTURE(k, m);
                REQUIRE(acc.coeff(m) == mpq_class(f.c[m]));
            }
        }
    }
}

TEST_CASE("hecke operator basics") {
    auto ctx = ctx50();
    long N = 500;

    // zero form maps to zero
    std::vector<mpz_class> zero(N + 1);
    auto tz = hecke_T_p2(zero, 3, 9);
    for (auto& v : tz) CHECK(v == 0);

    CHECK_THROWS_AS(hecke_T_p2(zero, 2, 9), std::domain_error);
    CHECK_THROWS_AS(hecke_T_p2(zero, 9, 9), std::domain_error);

    // linearity on random rational combinations
    auto basis = cusp_subspace(13, N, ctx);
    REQUIRE(basis.size() == 2);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<long> pick(-9, 9);
    for (int rep = 0; rep < 5; ++rep) {
        mpz_class af = pick(rng), bf = pick(rng);
        std::vector<mpz_class> combo(N + 1);
        for (long m = 0; m <= N; ++m) combo[m] = af * basis[0].c[m] + bf * basis[1].c[m];
        auto t_combo = hecke_T_p2(combo, 3, 13);
        auto t0 = hecke_T_p2(basis[0].c, 3, 13);
        auto t1 = hecke_T_p2(basis[1].c, 3, 13);
        for (size_t n = 0; n < t_combo.size(); ++n)
            REQUIRE(t_combo[n] == af * t0[n] + bf * t1[n]);
    }
}

TEST_CASE("weight 9/2 eigenform: eigenvalues rational and verified") {
    auto ctx = ctx50();
    long N = 2000;
    auto forms = eigenbasis(9, N, {3, 5, 7}, ctx);
    REQUIRE(forms.size() == 1);
    auto& f = forms[0];
    // compute_eigenvalues verified T(p^2) f = lambda_p f exactly already
    REQUIRE(f.eigenvalues.count(3) == 1);
    REQUIRE(f.eigenvalues.count(5) == 1);
    REQUIRE(f.eigenvalues.count(7) == 1);

    // lambda_3 equals the direct quotient at the first nonzero index
    auto img = hecke_T_p2(f.c, 3, 9);
    long n0 = f.first_nonzero();
    mpq_class lam(img[n0], f.c[n0]);
    lam.canonicalize();
    CHECK(lam == f.eigenvalues.at(3));

    // normalization invariance: scaling the table leaves the quotient alone
    std::vector<mpz_class> scaled(f.c);
    for (auto& x : scaled) x *= 7;
    auto img2 = hecke_T_p2(scaled, 3, 9);
    mpq_class lam2(img2[n0], scaled[n0]);
    lam2.canonicalize();
    CHECK(lam2 == lam);

    // U(4) consistency: dim 1 forces proportionality c(4n) = lambda4 c(n)
    auto u4 = hecke_U4(f.c);
    mpq_class lam4(u4[n0], f.c[n0]);
    lam4.canonicalize();
    for (size_t n = 0; n < u4.size(); ++n)
        REQUIRE(mpq_class(u4[n]) == lam4 * mpq_class(f.c[n]));
}

TEST_CASE("degenerate request: no primes returns cusp basis unchanged") {
    auto ctx = ctx50();
    auto cusp = cusp_subspace(9, 300, ctx);
    auto eig = eigenbasis(9, 300, {}, ctx);
    REQUIRE(eig.size() == cusp.size());
    CHECK(eig[0].c == cusp[0].c);
}

TEST_CASE("weight 13/2: odd Hecke operators act as the Delta eigensystem scalars") {
    auto ctx = ctx50();
    long N = 1500;
    auto forms = eigenbasis(13, N, {3, 5, 7}, ctx);
    REQUIRE(forms.size() == 2);
    // Both lift to the Ramanujan tau system (the level-2 old class of Delta):
    // tau(3) = 252, tau(5) = 4830, tau(7) = -16744.
    for (const auto& f : forms) {
        CHECK(f.eigenvalues.at(3) == 252);
        CHECK(f.eigenvalues.at(5) == 4830);
        CHECK(f.eigenvalues.at(7) == -16744);
    }
    // echelonized bases of a common eigenspace have distinct leading indices
    CHECK(forms[0].first_nonzero() < forms[1].first_nonzero());
}

TEST_CASE("weight 17/2: genuine splitting and commuting operators") {
    auto ctx = ctx50();
    long N = 1200;
    auto basis = cusp_subspace(17, N, ctx);
    REQUIRE(basis.size() == 3);

    // operators commute exactly as matrices on the subspace
    auto M3 = detail::hecke_matrix(basis, 3);
    auto M5 = detail::hecke_matrix(basis, 5);
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = 0; j < 3; ++j) {
            mpq_class ab = 0, ba = 0;
            for (size_t l = 0; l < 3; ++l) {
                ab += M3[i][l] * M5[l][j];
                ba += M5[i][l] * M3[l][j];
            }
            REQUIRE(ab == ba);
        }

    auto forms = eigenbasis(17, N, {3, 5}, ctx);
    REQUIRE(forms.size() == 3);
    // level-1 old class of weight 16 (two copies) plus the level-2 new class
    CHECK(forms[0].eigenvalues.at(3) == -3348);
    CHECK(forms[1].eigenvalues.at(3) == -3348);
    CHECK(forms[2].eigenvalues.at(3) == 6252);
    CHECK(forms[0].eigenvalues.at(5) == 52110);
    CHECK(forms[2].eigenvalues.at(5) == 90510);
    CHECK(forms[0].first_nonzero() < forms[1].first_nonzero());
}

TEST_CASE("truncation discipline: doubling N changes no coefficient") {
    auto ctx = ctx50();
    auto f1 = cusp_subspace(9, 200, ctx)[0];
    auto f2 = cusp_subspace(9, 400, ctx)[0];
    for (long m = 0; m <= 200; ++m) REQUIRE(f1.c[m] == f2.c[m]);
}

TEST_CASE("rational root extraction: non-split polynomials are rejected") {
    // x^2 + 1 and x^2 - 3 have no rational roots
    CHECK(detail::integer_roots({mpq_class(0), mpq_class(1)}).empty());
    CHECK(detail::integer_roots({mpq_class(0), mpq_class(-3)}).empty());
    // (x - 2)(x + 5) = x^2 + 3x - 10
    auto r = detail::integer_roots({mpq_class(3), mpq_class(-10)});
    REQUIRE(r.size() == 2);
}

TEST_CASE("cusp 0 coordinate map: weight 9/2 eigenform is Fricke-invariant") {
    auto ctx = ctx50();
    auto f = cusp_subspace(9, 100, ctx)[0];
    auto c0 = cusp0_coords(f.coords);
    REQUIRE(c0.size() == f.coords.size());
    for (size_t b = 0; b < c0.size(); ++b) CHECK(c0[b] == f.coords[b]);
}

TEST_CASE("half-cusp expansion: support inside strictly positive quarter lattice") {
    auto ctx = ctx50();
    auto f = cusp_subspace(9, 100, ctx)[0];
    auto e = expand_at_half_cusp(f.coords, 9, 400);
    CHECK(e.lattice == 4);
    CHECK(e.coeff(0) == 0);
    bool any = false;
    for (long j = 1; j <= e.order; ++j) any = any || (e.num[j] != 0);
    CHECK(any);
    // first support point of h^9 theta^0-term and friends: j = 1 from h * theta^8
    CHECK(e.coeff(1) != 0);
}
