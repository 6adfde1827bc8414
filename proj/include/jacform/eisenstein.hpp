#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "jacform/expansion.hpp"
#include "jacform/lvalues.hpp"
#include "jacform/operators.hpp"

namespace jacform {

// Weight-k index-1 Eisenstein series, normalized so the singular coefficient
// is 1; for D < 0 the coefficient is L_D(2-k) / zeta(3-2k).
inline JacobiExpansion eisenstein_k1(unsigned k, std::uint64_t bound) {
    if (k < 4 || k % 2 != 0) throw ArgumentError("eisenstein_k1: k must be even and at least 4");
    JacobiExpansion phi(FormSignature(k, 1, 1), bound);
    const Rational zeta = zeta_negative(3 - 2 * static_cast<long>(k));
    for (std::uint64_t abs_d = 0; abs_d <= bound; ++abs_d) {
        long long D = -static_cast<long long>(abs_d);
        long long res = mod_floor(D, 4);
        if (res > 1) continue;
        if (D == 0) {
            phi.set_coeff_key(0, 0, Rational(1));
            continue;
        }
        phi.set_coeff_key(D, res, l_value(D, 2 - static_cast<long>(k)) / zeta);
    }
    phi.seal();
    return phi;
}

// Index-m Eisenstein series E_{k,m} = E_{k,1} | V_m.
inline JacobiExpansion eisenstein_km(unsigned k, std::uint64_t m, std::uint64_t bound) {
    JacobiExpansion e1 = eisenstein_k1(k, bound);
    if (m == 1) return e1;
    return v_m(e1, m);
}

// Smallest positive integer scalar clearing every stored denominator,
// together with the rescaled form.  When a whitelist of primes is supplied,
// any other prime appearing in the scalar raises a consistency error.
inline std::pair<JacobiExpansion, Rational> integral_normalization(
    const JacobiExpansion& phi, const std::vector<std::uint64_t>& allowed_primes = {}) {
    mpz_class lcm_den = 1;
    for (const auto& [key, v] : phi.coefficients()) {
        mpz_class den = v.denominator();
        mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), den.get_mpz_t());
    }
    if (!allowed_primes.empty() && lcm_den != 1) {
        if (!lcm_den.fits_ulong_p())
            throw ConsistencyError("integral_normalization: scalar exceeds factorization range");
        for (const auto& [q, e] : factorize(lcm_den.get_ui())) {
            (void)e;
            bool ok = false;
            for (std::uint64_t a : allowed_primes) ok = ok || a == q;
            if (!ok)
                throw ConsistencyError("integral_normalization: prime " + std::to_string(q) +
                                       " in the scalar is outside the allowed set");
        }
    }
    Rational c((mpz_class(lcm_den)));
    return {scale(phi, c), c};
}

}  // namespace jacform
