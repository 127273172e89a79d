#include "halfint/arith.hpp"

#include "support/gamma04.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace halfint;
using namespace halfint::arith;

namespace {

// Euler-criterion oracle for an odd prime p.
int legendre_oracle(long a, long p) {
    long am = ((a % p) + p) % p;
    if (am == 0) return 0;
    long r = 1, base = am, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return r == 1 ? 1 : -1;
}

EvalContext ctx50() {
    EvalContext c;
    c.digits = 50;
    return c;
}

} // namespace

TEST_CASE("kronecker symbol: spec examples and conventions") {
    CHECK(kronecker(1, 7) == 1);
    CHECK(kronecker(-1, 3) == -1);
    CHECK(kronecker(2, 15) == 1);
    CHECK(kronecker(0, 1) == 1);
    CHECK(kronecker(0, -1) == 1);
    CHECK(kronecker(0, 5) == 0);
    CHECK(kronecker(3, 0) == 0);
    CHECK(kronecker(-1, 0) == 1);
    CHECK(kronecker(6, 15) == 0); // shared factor
}

TEST_CASE("kronecker symbol: Euler criterion oracle on odd primes") {
    for (long p : {3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L, 41L, 43L, 47L}) {
        for (long a = -25; a <= 25; ++a) {
            CAPTURE(a, p);
            CHECK(kronecker(a, p) == legendre_oracle(a, p));
        }
    }
}

TEST_CASE("kronecker symbol: complete multiplicativity in both arguments") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> num(-60, 60), den(1, 120);
    for (int i = 0; i < 400; ++i) {
        long a = num(rng), b = num(rng);
        long n = 2 * den(rng) + 1; // odd positive
        CHECK(kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n));
        long m = 2 * den(rng) + 1;
        CHECK(kronecker(a, n * m) == kronecker(a, n) * kronecker(a, m));
    }
}

TEST_CASE("epsilon_d case table and Gauss sum identity") {
    CHECK(epsilon(1).i_exponent == 0);
    CHECK(epsilon(3).i_exponent == 1);
    CHECK(epsilon(7).i_exponent == 1);
    CHECK(epsilon(-1).i_exponent == 1);
    CHECK_THROWS_AS(epsilon(4), std::domain_error);

    auto ctx = ctx50();
    for (long d = 1; d <= 99; d += 2) {
        Complex gs = gauss_sum(d, ctx);
        Complex expect = epsilon(d).value(ctx.prec()) * sqrt(ctx.R(d));
        CAPTURE(d);
        CHECK(abs(gs - expect).to_double() < 1e-30);
    }
}

TEST_CASE("mobius, squarefree decomposition, divisor functions") {
    CHECK(mobius(1) == 1);
    CHECK(mobius(4) == 0);
    CHECK(mobius(30) == -1);

    auto [t1, n1] = squarefree_decompose(1);
    CHECK(t1 == 1);
    CHECK(n1 == 1);
    auto [t12, n12] = squarefree_decompose(12);
    CHECK(t12 == 3);
    CHECK(n12 == 2);
    auto [t360, n360] = squarefree_decompose(360);
    CHECK(t360 == 10);
    CHECK(n360 == 6);

    // Round-trip: t n^2 = m with t square-free, for all m <= 1e5.
    for (long m = 1; m <= 100000; ++m) {
        auto [t, n] = squarefree_decompose(m);
        REQUIRE(t * n * n == m);
        REQUIRE(mobius(t) != 0);
    }

    CHECK(divisors(4) == std::vector<long>{1, 2, 4});
    CHECK(sigma(1, 5) == 6);
    CHECK(sigma(0, 12) == 6);
    CHECK(is_squarefree(30));
    CHECK(!is_squarefree(12));
    CHECK(!is_cubefree(8));
    CHECK(is_cubefree(12));
    CHECK_THROWS_AS(factor(factor_limit + 5), std::domain_error);
}

TEST_CASE("theta multiplier: fixed points") {
    auto ctx = ctx50();
    Complex i = ctx.I();

    Complex j1 = theta_multiplier(Mat2{1, 0, 0, 1}, i, ctx);
    CHECK(abs(j1 - ctx.C(1, 0)).to_double() < 1e-45);

    Complex j2 = theta_multiplier(Mat2{1, 1, 0, 1}, i, ctx);
    CHECK(abs(j2 - ctx.C(1, 0)).to_double() < 1e-45);

    // -I acts trivially.
    Complex j3 = theta_multiplier(Mat2{-1, 0, 0, -1}, i, ctx);
    CHECK(abs(j3 - ctx.C(1, 0)).to_double() < 1e-45);

    Mat2 g{1, 0, 4, 1};
    Complex j4 = theta_multiplier(g, i, ctx);
    auto th_gz = theta_value(g.apply(i), ctx);
    auto th_z = theta_value(i, ctx);
    Complex oracle = th_gz.value / th_z.value;
    CHECK(abs(j4 - oracle).to_double() < 1e-40);

    CHECK_THROWS_AS(theta_multiplier(Mat2{1, 0, 2, 1}, i, ctx), std::domain_error);
    CHECK_THROWS_AS(theta_multiplier(Mat2{2, 0, 4, 1}, i, ctx), std::domain_error);
}

TEST_CASE("theta multiplier: consistency with theta(gamma z)/theta(z)") {
    auto ctx = ctx50();
    auto base = testsupport::multiplier_base_points(ctx);
    auto gammas = testsupport::random_gamma04(200, 12345, base);
    size_t checked = 0;
    for (const auto& g : gammas) {
        for (const auto& z : base) {
            Complex gz = g.apply(z);
            auto th_gz = theta_value(gz, ctx);
            auto th_z = theta_value(z, ctx);
            Complex oracle = th_gz.value / th_z.value;
            Complex j = theta_multiplier(g, z, ctx);
            CAPTURE(g.a, g.b, g.c, g.d, z.re_d(), z.im_d());
            REQUIRE(abs(j - oracle).to_double() / abs(j).to_double() < 1e-30);
            // |j|^2 = |cz+d|
            Complex czd = z * (long)g.c;
            czd.re += (long)g.d;
            Real mism = norm(j) - abs(czd);
            REQUIRE(abs(mism).to_double() / abs(czd).to_double() < 1e-30);
            ++checked;
        }
    }
    REQUIRE(checked == 1000);
}

TEST_CASE("theta multiplier: cocycle relation") {
    auto ctx = ctx50();
    std::vector<Complex> base{ctx.C(0.2, 0.8), ctx.C(-0.4, 1.3)};
    auto gs = testsupport::random_gamma04(40, 99, base, 1e-4);
    for (size_t i = 0; i + 1 < gs.size(); i += 2) {
        Mat2 g1 = gs[i], g2 = gs[i + 1];
        Mat2 g12 = g1 * g2;
        if (std::abs(g12.c) > 4000000) continue;
        for (const auto& z : base) {
            Complex g2z = g2.apply(z);
            if (g2z.im.to_double() < 1e-4 || g12.apply(z).im.to_double() < 1e-4) continue;
            Complex lhs = theta_multiplier(g12, z, ctx);
            Complex rhs = theta_multiplier(g1, g2z, ctx) * theta_multiplier(g2, z, ctx);
            CAPTURE(g1.a, g1.c, g2.a, g2.c);
            REQUIRE(abs(lhs - rhs).to_double() / abs(lhs).to_double() < 1e-40);
        }
    }
}

TEST_CASE("mod_inverse") {
    CHECK(mod_inverse(3, 7) == 5);
    CHECK(mod_inverse(1, 1) == 0);
    CHECK_THROWS_AS(mod_inverse(2, 4), std::domain_error);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        long m = std::uniform_int_distribution<long>(2, 10000)(rng);
        long a = std::uniform_int_distribution<long>(1, m - 1)(rng);
        if (std::gcd(a, m) != 1) continue;
        long inv = mod_inverse(a, m);
        CHECK((a * inv) % m == 1);
    }
}
