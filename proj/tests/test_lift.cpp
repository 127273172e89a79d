#include "halfint/lift.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace halfint;
using namespace halfint::lift;

namespace {

const qspace::HalfIntegralForm& form9() {
    static auto f = [] {
        EvalContext ctx;
        auto v = qspace::eigenbasis(9, 10000, {3, 5, 7}, ctx);
        qspace::compute_eigenvalues(v[0], 100);
        return v[0];
    }();
    return f;
}

} // namespace

TEST_CASE("chi_t values") {
    // k = 9: the (-1)-part is trivial, chi depends only on (t/n)
    for (long n : {1L, 3L, 5L, 7L, 9L, 11L}) CHECK(chi_t(1, n, 9) == 1);
    CHECK(chi_t(3, 2, 9) == 0); // even argument: character mod 4t
    CHECK(chi_t(1, 2, 9) == 0);
    CHECK(chi_t(3, 5, 9) == arith::kronecker(3, 5));
    CHECK(chi_t(3, 3, 9) == 0); // shared factor with modulus
    CHECK(chi_t(15, 21, 9) == 0);
    CHECK_THROWS_AS(chi_t(4, 3, 9), std::domain_error);
    // k = 7: (-1)^{(k-1)/2} = -1 enters the numerator
    CHECK(chi_t(1, 3, 7) == arith::kronecker(-1, 3));
}

TEST_CASE("lift coefficients: recursion, multiplicativity, A(2)") {
    const auto& f = form9();
    auto L = lift_from_eigenvalues(f, 100);

    CHECK(L.at(1) == 1);
    CHECK(L.A2 == -8);
    CHECK(L.at(2) == -8);
    CHECK(L.a2_confirmations > 20);

    // A(15) = A(3) A(5), A(9) = A(3)^2 - 3^7
    CHECK(L.at(15) == L.at(3) * L.at(5));
    CHECK(L.at(9) == L.at(3) * L.at(3) - mpq_class(2187));
    CHECK(L.at(4) == L.at(2) * L.at(2));
    CHECK(L.at(12) == L.at(4) * L.at(3));

    // eigenvalues transfer: A(p) = lambda_p for odd p
    CHECK(L.at(3) == f.eigenvalues.at(3));
    CHECK(L.at(5) == f.eigenvalues.at(5));
    CHECK(L.at(7) == f.eigenvalues.at(7));

    // missing eigenvalue raises a gap error naming the prime
    qspace::HalfIntegralForm g = f;
    g.eigenvalues.erase(97);
    try {
        lift_from_eigenvalues(g, 100);
        FAIL("expected eigenvalue_gap_error");
    } catch (const eigenvalue_gap_error& e) {
        CHECK(e.p == 97);
    }
}

TEST_CASE("Deligne bound holds on the computed range") {
    const auto& f = form9();
    auto L = lift_from_eigenvalues(f, 100);
    for (long m = 1; m <= 100; ++m) {
        CAPTURE(m);
        REQUIRE(deligne_bound_ok(L, m));
    }
}

TEST_CASE("exact Shimura coefficient identity (spec examples)") {
    const auto& f = form9();
    auto L = lift_from_eigenvalues(f, 100);

    // n = 1 is the trivial identity c(t) = c(t)
    for (long t : {1L, 2L, 3L, 7L}) {
        auto r = verify_preb(f, L, t, 1);
        CHECK(r.ok);
        CHECK(r.lhs == r.rhs);
    }
    CHECK(verify_preb(f, L, 1, 2).ok);
    CHECK(verify_preb(f, L, 2, 3).ok);

    CHECK_THROWS_AS(verify_preb(f, L, 4, 2), std::domain_error);
    CHECK_THROWS_AS(verify_preb(f, L, 1, 200), needs_more_coefficients);
}

TEST_CASE("exact Shimura identity across the full table") {
    const auto& f = form9();
    auto L = lift_from_eigenvalues(f, 100);
    long count = 0;
    for (long t = 1; t <= f.N; ++t) {
        if (!arith::is_squarefree(t)) continue;
        for (long n = 2; t * n * n <= f.N; ++n) {
            auto r = verify_preb(f, L, t, n);
            CAPTURE(t, n);
            REQUIRE(r.ok);
            ++count;
        }
    }
    CHECK(count > 3000);
}

TEST_CASE("lemma bound scan") {
    const auto& f = form9();
    auto rep = lemma_bound_check(f, 10, 30, 0.5);
    CHECK(rep.rows > 100);
    CHECK(rep.zero_rows >= 1);   // a(5) = 0 among t <= 10
    CHECK(rep.max_ratio < 10.0); // bounded ratio table
    CHECK(!rep.growth_flag);

    // the n = 1 slice has ratio exactly 1
    auto rep1 = lemma_bound_check(f, 10, 1, 0.5);
    CHECK(rep1.max_ratio == Catch::Approx(1.0));
}

TEST_CASE("Dirichlet series identity at s = k/2 + 2") {
    const auto& f = form9();
    EvalContext ctx;
    auto L = lift_from_eigenvalues(f, 100);
    for (long t : {1L, 2L, 3L}) {
        auto rep = dirichlet_45_check(f, L, t, ctx);
        CAPTURE(t, rep.lhs, rep.rhs, rep.lhs_tail, rep.rhs_tail);
        CHECK(rep.ok);
        CHECK(std::abs(rep.lhs - rep.rhs) <= rep.lhs_tail + rep.rhs_tail + 1e-25);
    }
}
