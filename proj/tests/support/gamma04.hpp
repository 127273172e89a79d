#pragma once

// Shared generator of pseudorandom Gamma_0(4) elements for the multiplier
// suites: words in T = (1 1; 0 1) and U = (1 0; 4 1) with occasional -I,
// filtered so that every supplied base point stays numerically usable
// (Im(gamma z) bounded below).

#include "halfint/arith.hpp"

#include <random>
#include <vector>

namespace halfint::testsupport {

inline std::vector<arith::Mat2> random_gamma04(size_t count, uint64_t seed,
                                               const std::vector<Complex>& base,
                                               double min_im = 2e-4) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(2, 6), expo(-3, 3), flip(0, 3);
    std::vector<arith::Mat2> out;
    while (out.size() < count) {
        arith::Mat2 g{1, 0, 0, 1};
        int L = len(rng);
        for (int i = 0; i < L; ++i) {
            int e = expo(rng);
            if (e == 0) e = 1;
            if (i % 2 == 0)
                g = g * arith::Mat2{1, e, 0, 1};
            else
                g = g * arith::Mat2{1, 0, 4 * e, 1};
        }
        if (flip(rng) == 0) g = g * arith::Mat2{-1, 0, 0, -1};
        if (std::abs(g.c) > 2000000 || std::abs(g.d) > 2000000) continue;
        bool ok = true;
        for (const auto& z : base)
            if (g.apply(z).im.to_double() < min_im) ok = false;
        if (ok) out.push_back(g);
    }
    return out;
}

inline std::vector<Complex> multiplier_base_points(const EvalContext& ctx) {
    return {ctx.C(0.0, 1.0), ctx.C(0.31, 0.7), ctx.C(-0.22, 0.45), ctx.C(1.13, 0.95),
            ctx.C(-0.48, 0.62)};
}

} // namespace halfint::testsupport
