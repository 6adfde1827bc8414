#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "jacform/character.hpp"
#include "jacform/errors.hpp"
#include "jacform/numtheory.hpp"
#include "jacform/rational.hpp"

namespace jacform {

// B_{n,chi} = f^(n-1) sum_{a=1..f} chi(a) B_n(a/f), f the modulus of chi.
//
// Evaluated through an all-integer Horner pass: with L a common denominator
// of the scaled coefficients C(n,j) B_j f^j, the polynomial
// P(a) = L * sum_j C(n,j) B_j f^j a^(n-j) has integer coefficients and
// B_{n,chi} = sum_a chi(a) P(a) / (L f).  Memoized per (n, discriminant).
inline Rational gen_bernoulli(unsigned n, const QuadCharacter& chi) {
    if (n == 0) throw ArgumentError("gen_bernoulli: n must be positive");
    static std::map<std::pair<unsigned, long long>, Rational> memo;
    static std::mutex mu;
    const std::pair<unsigned, long long> key(n, chi.discriminant());
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }

    const std::uint64_t f = chi.modulus();
    std::vector<Rational> scaled(n + 1);  // scaled[j] = C(n,j) B_j f^j
    mpz_class lcm_den = 1;
    mpz_class fpow = 1;
    for (unsigned j = 0; j <= n; ++j) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), n, j);
        scaled[j] = Rational(mpz_class(binom * fpow)) * bernoulli(j);
        mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), scaled[j].denominator().get_mpz_t());
        fpow *= f;
    }
    std::vector<mpz_class> poly(n + 1);  // poly[j] = L * scaled[j], a^(n-j) coefficient
    for (unsigned j = 0; j <= n; ++j) {
        poly[j] = scaled[j].numerator() * (lcm_den / scaled[j].denominator());
    }

    mpz_class total = 0;
    for (std::uint64_t a = 1; a <= f; ++a) {
        int ca = chi(static_cast<long long>(a));
        if (ca == 0) continue;
        mpz_class horner = poly[0];
        for (unsigned j = 1; j <= n; ++j) {
            horner *= static_cast<unsigned long>(a);
            horner += poly[j];
        }
        if (ca > 0) {
            total += horner;
        } else {
            total -= horner;
        }
    }
    Rational result(total, mpz_class(lcm_den * f));

    std::lock_guard<std::mutex> lock(mu);
    return memo.emplace(key, result).first->second;
}

// zeta(1-2n) = -B_{2n}/(2n); the argument must be a negative odd integer.
inline Rational zeta_negative(long s) {
    if (s >= 0 || mod_floor(s, 2) != 1)
        throw ArgumentError("zeta_negative: argument must be 1-2n for integer n >= 1");
    unsigned two_n = static_cast<unsigned>(1 - s);
    return -bernoulli(two_n) / Rational(mpz_class(two_n));
}

// L_{D0}(2-k) = -B_{k-1, chi_{D0}}/(k-1) for fundamental D0 < 0.
inline Rational l_value_fundamental(long long D0, long s) {
    if (!is_fundamental_discriminant(D0) || D0 >= 0)
        throw ArgumentError("l_value_fundamental: D0 must be a negative fundamental discriminant");
    if (s > 0) throw ArgumentError("l_value_fundamental: s must be 2-k with k >= 2");
    unsigned k = static_cast<unsigned>(2 - s);
    return -gen_bernoulli(k - 1, QuadCharacter(D0)) / Rational(mpz_class(k - 1));
}

// L_D(s) for D = f^2 D0 < 0:
//   L_D(s) = L_{D0}(s) * sum_{d | f} mu(d) chi_{D0}(d) d^(-s) sigma_{1-2s}(f/d).
inline Rational l_value(long long D, long s) {
    if (D >= 0 || !is_discriminant(D))
        throw ArgumentError("l_value: D must be a negative discriminant");
    if (s > 0) throw ArgumentError("l_value: s must be 2-k with k >= 2");
    auto [D0, f] = fundamental_decompose(D);
    Rational base = l_value_fundamental(D0, s);
    if (f == 1) return base;
    unsigned k = static_cast<unsigned>(2 - s);
    mpz_class fix = 0;
    for (std::uint64_t d : divisors(static_cast<std::uint64_t>(f))) {
        int mu = moebius(d);
        if (mu == 0) continue;
        int chi = kronecker(D0, static_cast<long long>(d));
        if (chi == 0) continue;
        mpz_class dpow;  // d^(-s) = d^(k-2)
        mpz_ui_pow_ui(dpow.get_mpz_t(), d, k - 2);
        fix += mu * chi * dpow * sigma_power(2 * k - 3, static_cast<std::uint64_t>(f) / d);
    }
    return base * Rational(fix);
}

}  // namespace jacform
