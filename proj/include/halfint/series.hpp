#pragma once

#include "halfint/errors.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <vector>

namespace halfint::qspace {

// q-expansion with exact rational coefficients, stored as an integer vector
// over a common positive denominator.  Index j carries exponent j/lattice;
// lattice 1 for expansions at infinity and 0, lattice 4 at the cusp 1/2.
// `order` is the truncation bound: indices 0..order are stored and trusted,
// zeros included.  Arithmetic tracks the provable truncation order of its
// results and is exact everywhere.
class ExactSeries {
  public:
    long lattice = 1;
    long order = -1;
    mpz_class den = 1;
    std::vector<mpz_class> num; // size order+1

    ExactSeries() = default;
    ExactSeries(long lat, long ord) : lattice(lat), order(ord), den(1), num(ord + 1) {}

    mpq_class coeff(long j) const {
        if (j < 0 || j > order) throw needs_more_coefficients(j);
        mpq_class q(num[j], den);
        q.canonicalize();
        return q;
    }

    long valuation() const {
        for (long j = 0; j <= order; ++j)
            if (num[j] != 0) return j;
        return order + 1;
    }

    bool nonnegative() const {
        if (sgn(den) < 0) return false;
        for (auto& x : num)
            if (sgn(x) < 0) return false;
        return true;
    }

    // Remove content and denominator gcd; keep den > 0.
    void normalize() {
        if (sgn(den) < 0) {
            den = -den;
            for (auto& x : num) x = -x;
        }
        mpz_class g = den;
        for (auto& x : num) {
            if (x != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
            if (g == 1) break;
        }
        if (g > 1) {
            den /= g;
            for (auto& x : num) x /= g;
        }
    }

    void scale(const mpq_class& s) {
        for (auto& x : num) x *= s.get_num();
        den *= s.get_den();
        normalize();
    }

    // Re-express on a finer exponent lattice (new_lat a multiple of lattice).
    ExactSeries stretched(long new_lat) const {
        if (new_lat == lattice) return *this;
        if (new_lat % lattice != 0)
            throw std::domain_error("ExactSeries: incompatible lattice refinement");
        long f = new_lat / lattice;
        ExactSeries r(new_lat, order * f + (f - 1));
        r.den = den;
        for (long j = 0; j <= order; ++j) r.num[j * f] = num[j];
        return r;
    }

    ExactSeries truncated(long new_order) const {
        ExactSeries r(lattice, std::min(order, new_order));
        r.den = den;
        for (long j = 0; j <= r.order; ++j) r.num[j] = num[j];
        return r;
    }

    friend bool operator==(const ExactSeries& a, const ExactSeries& b) {
        if (a.lattice != b.lattice || a.order != b.order) return false;
        for (long j = 0; j <= a.order; ++j)
            if (a.num[j] * b.den != b.num[j] * a.den) return false;
        return true;
    }
};

namespace seriesdetail {

inline void align(ExactSeries& a, ExactSeries& b) {
    long lat = std::lcm(a.lattice, b.lattice);
    if (a.lattice != lat) a = a.stretched(lat);
    if (b.lattice != lat) b = b.stretched(lat);
}

// Kronecker substitution: pack nonnegative coefficient vectors into one big
// integer each and let GMP's large multiplication do the convolution.
inline std::vector<mpz_class> conv_kronecker(const std::vector<mpz_class>& a,
                                             const std::vector<mpz_class>& b, long out_len) {
    size_t maxbits_a = 1, maxbits_b = 1;
    for (auto& x : a)
        if (x != 0) maxbits_a = std::max(maxbits_a, mpz_sizeinbase(x.get_mpz_t(), 2));
    for (auto& x : b)
        if (x != 0) maxbits_b = std::max(maxbits_b, mpz_sizeinbase(x.get_mpz_t(), 2));
    size_t kbits = maxbits_a + maxbits_b + 64;
    size_t words = (kbits + 63) / 64;

    auto pack = [&](const std::vector<mpz_class>& v) {
        std::vector<uint64_t> buf(v.size() * words, 0);
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] == 0) continue;
            size_t count = 0;
            mpz_export(&buf[i * words], &count, -1, 8, 0, 0, v[i].get_mpz_t());
        }
        mpz_class z;
        mpz_import(z.get_mpz_t(), buf.size(), -1, 8, 0, 0, buf.data());
        return z;
    };

    mpz_class prod = pack(a) * pack(b);

    std::vector<uint64_t> buf((a.size() + b.size()) * words + 2, 0);
    size_t count = 0;
    mpz_export(buf.data(), &count, -1, 8, 0, 0, prod.get_mpz_t());
    std::vector<mpz_class> out(out_len);
    for (long i = 0; i < out_len; ++i) {
        mpz_import(out[i].get_mpz_t(), words, -1, 8, 0, 0, &buf[size_t(i) * words]);
    }
    return out;
}

inline std::vector<mpz_class> conv_schoolbook(const std::vector<mpz_class>& a,
                                              const std::vector<mpz_class>& b, long out_len) {
    // iterate over nonzeros of the sparser factor
    long nnz_a = 0, nnz_b = 0;
    for (auto& x : a) nnz_a += (x != 0);
    for (auto& x : b) nnz_b += (x != 0);
    const auto& s = nnz_a <= nnz_b ? a : b;
    const auto& d = nnz_a <= nnz_b ? b : a;
    std::vector<mpz_class> out(out_len);
    for (size_t i = 0; i < s.size() && (long)i < out_len; ++i) {
        if (s[i] == 0) continue;
        long jmax = std::min((long)d.size() - 1, out_len - 1 - (long)i);
        for (long j = 0; j <= jmax; ++j) {
            if (d[j] != 0) mpz_addmul(out[i + j].get_mpz_t(), s[i].get_mpz_t(), d[j].get_mpz_t());
        }
    }
    return out;
}

} // namespace seriesdetail

inline ExactSeries add(ExactSeries a, ExactSeries b) {
    seriesdetail::align(a, b);
    ExactSeries r(a.lattice, std::min(a.order, b.order));
    r.den = a.den * b.den;
    for (long j = 0; j <= r.order; ++j) r.num[j] = a.num[j] * b.den + b.num[j] * a.den;
    r.normalize();
    return r;
}

inline ExactSeries sub(ExactSeries a, ExactSeries b) {
    b.scale(mpq_class(-1));
    return add(std::move(a), std::move(b));
}

// Product, trusted through min(a.order + val(b), b.order + val(a)) and
// optionally capped.
inline ExactSeries mul(ExactSeries a, ExactSeries b, long cap_order = -1) {
    seriesdetail::align(a, b);
    long ord = std::min(a.order + b.valuation(), b.order + a.valuation());
    ord = std::min(ord, a.order + b.order);
    if (cap_order >= 0) ord = std::min(ord, cap_order);
    if (ord < 0) ord = 0;
    ExactSeries r(a.lattice, ord);
    r.den = a.den * b.den;

    long out_len = ord + 1;
    long nnz_a = 0, nnz_b = 0;
    for (auto& x : a.num) nnz_a += (x != 0);
    for (auto& x : b.num) nnz_b += (x != 0);
    double school_cost = double(std::min(nnz_a, nnz_b)) * double(out_len);
    bool kron_ok = a.nonnegative() && b.nonnegative();
    std::vector<mpz_class> av(a.num.begin(), a.num.begin() + std::min<long>(a.order, ord) + 1);
    std::vector<mpz_class> bv(b.num.begin(), b.num.begin() + std::min<long>(b.order, ord) + 1);
    if (kron_ok && school_cost > 4e7)
        r.num = seriesdetail::conv_kronecker(av, bv, out_len);
    else
        r.num = seriesdetail::conv_schoolbook(av, bv, out_len);
    r.normalize();
    return r;
}

inline ExactSeries pow(const ExactSeries& a, long e, long cap_order = -1) {
    if (e < 0) throw std::domain_error("ExactSeries pow: negative exponent");
    long cap = cap_order >= 0 ? cap_order : a.order;
    if (e == 0) {
        ExactSeries one(a.lattice, cap);
        one.num[0] = 1;
        return one;
    }
    ExactSeries base = a, acc;
    bool have = false;
    while (e) {
        if (e & 1) {
            acc = have ? mul(acc, base, cap) : base.truncated(cap);
            have = true;
        }
        e >>= 1;
        if (e) base = mul(base, base, cap);
    }
    return acc;
}

} // namespace halfint::qspace
