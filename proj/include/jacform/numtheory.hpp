#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <utility>
#include <vector>

#include "jacform/errors.hpp"
#include "jacform/rational.hpp"

namespace jacform {

// x mod m in [0, m) for any sign of x.
inline long long mod_floor(long long x, long long m) {
    long long r = x % m;
    return r < 0 ? r + m : r;
}

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace detail

// Deterministic Miller-Rabin for the full 64-bit range.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
        std::uint64_t x = detail::powmod(a % n, d, n);
        if (x <= 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i + 1 < s; ++i) {
            x = detail::mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

// Primes <= limit, ascending.
inline std::vector<std::uint64_t> prime_sieve(std::uint64_t limit) {
    std::vector<bool> comp(limit + 1, false);
    std::vector<std::uint64_t> primes;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (comp[i]) continue;
        primes.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = true;
    }
    return primes;
}

namespace detail {

inline std::uint64_t pollard_brent(std::uint64_t n) {
    if (n % 2 == 0) return 2;
    std::uint64_t x0 = 2, c = 1;
    while (true) {
        std::uint64_t x = x0, y = x0, d = 1;
        std::uint64_t power = 1, lam = 0, saved = 0;
        auto f = [&](std::uint64_t v) { return (mulmod(v, v, n) + c) % n; };
        while (d == 1) {
            if (lam == power) {
                x = y;
                power <<= 1;
                lam = 0;
                saved = y;
            }
            y = f(y);
            ++lam;
            std::uint64_t diff = x > y ? x - y : y - x;
            d = std::gcd(diff, n);
        }
        if (d != n) return d;
        // cycle hit the gcd all at once: retry stepwise from the saved point
        std::uint64_t ys = saved;
        d = 1;
        while (d == 1) {
            ys = f(ys);
            std::uint64_t diff = x > ys ? x - ys : ys - x;
            d = std::gcd(diff, n);
        }
        if (d != n) return d;
        ++c;
        ++x0;
    }
}

inline void factor_rec(std::uint64_t n, std::vector<std::uint64_t>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    std::uint64_t d = pollard_brent(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace detail

// Prime factorization of n >= 1, sorted by prime.
inline std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
    if (n == 0) throw ArgumentError("factorize: zero");
    std::vector<std::uint64_t> flat;
    std::uint64_t rest = n;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull, 41ull, 43ull, 47ull}) {
        while (rest % p == 0) {
            flat.push_back(p);
            rest /= p;
        }
    }
    detail::factor_rec(rest, flat);
    std::sort(flat.begin(), flat.end());
    std::vector<std::pair<std::uint64_t, unsigned>> out;
    for (std::uint64_t p : flat) {
        if (!out.empty() && out.back().first == p) {
            ++out.back().second;
        } else {
            out.emplace_back(p, 1u);
        }
    }
    return out;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (const auto& [p, e] : factorize(n)) out.push_back(p);
    return out;
}

inline int moebius(std::uint64_t n) {
    if (n == 0) throw ArgumentError("moebius: zero");
    int sign = 1;
    for (const auto& [p, e] : factorize(n)) {
        if (e > 1) return 0;
        sign = -sign;
    }
    return sign;
}

// Divisors of n >= 1, ascending.
inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
    std::vector<std::uint64_t> out{1};
    for (const auto& [p, e] : factorize(n)) {
        std::size_t sz = out.size();
        std::uint64_t pk = 1;
        for (unsigned i = 1; i <= e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < sz; ++j) out.push_back(out[j] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// sigma_t(n) = sum of d^t over d | n.
inline mpz_class sigma_power(unsigned t, std::uint64_t n) {
    mpz_class total = 0;
    for (std::uint64_t d : divisors(n)) {
        mpz_class dt;
        mpz_ui_pow_ui(dt.get_mpz_t(), d, t);
        total += dt;
    }
    return total;
}

// Kronecker symbol (a/n), full extension to all integer pairs.
inline int kronecker(const mpz_class& a, const mpz_class& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

inline int kronecker(long long a, long long n) {
    return kronecker(mpz_class(static_cast<long>(a)), mpz_class(static_cast<long>(n)));
}

inline bool is_discriminant(long long D) {
    return mod_floor(D, 4) <= 1;
}

// D squarefree with D = 1 mod 4, or D = 4d with d squarefree, d = 2,3 mod 4.
inline bool is_fundamental_discriminant(long long D) {
    if (D == 0 || !is_discriminant(D)) return false;
    auto squarefree = [](std::uint64_t x) {
        for (const auto& [p, e] : factorize(x)) {
            if (e > 1) return false;
        }
        return true;
    };
    if (mod_floor(D, 4) == 1) return squarefree(D < 0 ? -static_cast<std::uint64_t>(D) : D);
    long long d = D / 4;
    long long dm = mod_floor(d, 4);
    if (dm != 2 && dm != 3) return false;
    return squarefree(d < 0 ? -static_cast<std::uint64_t>(d) : d);
}

// D = f^2 * D0 with D0 fundamental, for D < 0, D = 0,1 mod 4.
inline std::pair<long long, long long> fundamental_decompose(long long D) {
    if (D >= 0 || !is_discriminant(D))
        throw ArgumentError("fundamental_decompose: not a negative discriminant");
    std::uint64_t aD = -static_cast<std::uint64_t>(D);
    std::uint64_t s = 1;
    for (const auto& [p, e] : factorize(aD)) {
        for (unsigned i = 0; i + 1 < e; i += 2) s *= p;
    }
    long long d0 = D / static_cast<long long>(s * s);
    if (mod_floor(d0, 4) == 1) return {d0, static_cast<long long>(s)};
    // d0 squarefree but not 1 mod 4: absorb a factor 4 from s^2
    return {4 * d0, static_cast<long long>(s / 2)};
}

// Bernoulli number B_n, convention B_1 = -1/2.  Thread-safe growing cache.
inline Rational bernoulli(unsigned n) {
    static std::vector<Rational> cache{Rational(1)};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    while (cache.size() <= n) {
        unsigned j = cache.size();
        // sum_{i<j} C(j+1, i) B_i = 0 for j >= 1
        Rational acc(0);
        for (unsigned i = 0; i < j; ++i) {
            mpz_class binom;
            mpz_bin_uiui(binom.get_mpz_t(), j + 1, i);
            acc += Rational(binom) * cache[i];
        }
        cache.push_back(-acc / Rational(mpz_class(j + 1)));
    }
    return cache[n];
}

// Bernoulli polynomial B_n(x) = sum_j C(n,j) B_j x^(n-j).
inline Rational bernoulli_poly(unsigned n, const Rational& x) {
    Rational acc(0);
    for (unsigned j = 0; j <= n; ++j) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), n, j);
        acc += Rational(binom) * bernoulli(j) * rational_pow(x, n - j);
    }
    return acc;
}

// Exponent of the prime ell in x; INFINITY for x = 0.
inline Valuation nu_ell(const Rational& x, std::uint64_t ell) {
    if (!is_prime(ell)) throw ArgumentError("nu_ell: modulus must be prime");
    if (x.is_zero()) return Valuation::infinity();
    mpz_class p(static_cast<unsigned long>(ell)), tmp;
    mpz_class num = x.numerator(), den = x.denominator();
    long vnum = static_cast<long>(mpz_remove(tmp.get_mpz_t(), num.get_mpz_t(), p.get_mpz_t()));
    long vden = static_cast<long>(mpz_remove(tmp.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t()));
    return Valuation(vnum - vden);
}

}  // namespace jacform
