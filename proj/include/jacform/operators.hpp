#pragma once

#include <cstdint>
#include <numeric>
#include <optional>

#include "jacform/expansion.hpp"
#include "jacform/numtheory.hpp"
#include "jacform/rational.hpp"

namespace jacform {

namespace detail {

// Case factor C_p(n, r, m) of the Hecke coefficient formula.  Well defined on
// orbits: r mod p is orbit-invariant when p | m, and n mod p is invariant
// once p | r.
inline Rational hecke_case_factor(std::uint64_t p, long long n, long long r, std::uint64_t m,
                                  long long D) {
    long long pl = static_cast<long long>(p);
    if (m % p != 0) return Rational(pl * kronecker(D, pl));
    if (mod_floor(r, pl) != 0) return Rational(0);
    if (mod_floor(n, pl) != 0) return Rational(-pl);
    return Rational(pl * (pl - 1));
}

// sum over lambda mod p of c((n + r N lambda + m N^2 lambda^2)/p^2,
// (r + 2 m N lambda)/p), coefficients taken as 0 at non-integral arguments.
inline Rational hecke_lambda_sum_naive(const JacobiExpansion& phi, std::uint64_t p, long long n,
                                       long long r) {
    const FormSignature& s = phi.signature();
    const long long m = static_cast<long long>(s.index());
    const long long N = static_cast<long long>(s.lattice());
    const long long pl = static_cast<long long>(p);
    Rational acc(0);
    for (long long lam = 0; lam < pl; ++lam) {
        long long r2 = r + 2 * m * N * lam;
        long long n2 = n + r * N * lam + m * N * N * lam * lam;
        if (mod_floor(r2, pl) != 0 || mod_floor(n2, pl * pl) != 0) continue;
        acc += phi.coeff(n2 / (pl * pl), r2 / pl);
    }
    return acc;
}

// Same sum; when gcd(p, 2mN) = 1 the congruence r + 2mN lambda = 0 mod p has
// a unique solution and the sum collapses to one lookup (nonzero only when
// p^2 | D).  Falls back to the naive loop otherwise.
inline Rational hecke_lambda_sum(const JacobiExpansion& phi, std::uint64_t p, long long n,
                                 long long r) {
    const FormSignature& s = phi.signature();
    const long long m = static_cast<long long>(s.index());
    const long long N = static_cast<long long>(s.lattice());
    const long long pl = static_cast<long long>(p);
    if (std::gcd(static_cast<long long>(2) * m * N, pl) != 1)
        return hecke_lambda_sum_naive(phi, p, n, r);
    __int128 D = JacobiExpansion::discriminant_wide(n, r, s.index());
    if (D % static_cast<__int128>(pl * pl) != 0) return Rational(0);
    std::uint64_t inv = powmod(static_cast<std::uint64_t>(mod_floor(2 * m * N, pl)), p - 2, p);
    long long lam = mod_floor(-mod_floor(r, pl) * static_cast<long long>(inv), pl);
    long long r2 = r + 2 * m * N * lam;
    long long n2 = n + r * N * lam + m * N * N * lam * lam;
    if (mod_floor(r2, pl) != 0 || mod_floor(n2, pl * pl) != 0)
        throw ConsistencyError("hecke_lambda_sum: collapsed term is not integral");
    return phi.coeff(n2 / (pl * pl), r2 / pl);
}

}  // namespace detail

// Hecke operator T_p on the coefficient level:
//   c*(n,r) = c(p^2 n, p r) + chi(p) C_p(n,r,m) p^(k-3) c(n,r)
//           + chi(p)^2 p^(2k-3) sum_{lambda mod p} c(., .).
// Requires gcd(p, N) = 1; the output bound is floor(bound / p^2).
inline JacobiExpansion hecke_tp(const JacobiExpansion& phi, std::uint64_t p) {
    const FormSignature& s = phi.signature();
    if (!is_prime(p)) throw ArgumentError("hecke_tp: p must be prime");
    if (s.lattice() % p == 0)
        throw ArgumentError("hecke_tp: p must be coprime to the lattice scale N");
    if (phi.bound() < p * p)
        throw TruncationError("hecke_tp: input bound " + std::to_string(phi.bound()) +
                              " is below p^2 = " + std::to_string(p * p));
    const std::uint64_t m = s.index();
    const std::uint64_t mod = s.key_modulus();
    const long k = static_cast<long>(s.weight());
    const long long pl = static_cast<long long>(p);
    const Rational chi_p(s.chi(pl));
    const Rational t2_scale = chi_p * rational_pow(Rational(pl), k - 3);
    const Rational t3_scale = chi_p * chi_p * rational_pow(Rational(pl), 2 * k - 3);

    JacobiExpansion out(s, phi.bound() / (p * p));
    for (std::uint64_t abs_d = 0; abs_d <= out.bound(); ++abs_d) {
        long long D = -static_cast<long long>(abs_d);
        for (std::uint64_t rho = 0; rho < mod; ++rho) {
            __int128 delta = static_cast<__int128>(rho) * rho - D;
            if (delta % static_cast<__int128>(4 * m) != 0) continue;
            long long n = static_cast<long long>(delta / static_cast<__int128>(4 * m));
            long long r = static_cast<long long>(rho);
            Rational val = phi.coeff(pl * pl * n, pl * r);
            Rational cp = detail::hecke_case_factor(p, n, r, m, D);
            if (!cp.is_zero()) val += t2_scale * cp * phi.coeff(n, r);
            val += t3_scale * detail::hecke_lambda_sum(phi, p, n, r);
            if (!val.is_zero()) out.set_coeff_key(D, r, val);
        }
    }
    out.seal();
    return out;
}

// U_d: phi(tau, z) -> phi(tau, dz); index m d^2, c'(n, r) = c(n, r/d) for
// d | r and 0 otherwise.  Exact re-keying (D, rho) -> (d^2 D, d rho').
inline JacobiExpansion u_d(const JacobiExpansion& phi, std::uint64_t d) {
    if (d == 0) throw ArgumentError("u_d: d must be positive");
    const FormSignature& s = phi.signature();
    if (phi.bound() > (static_cast<std::uint64_t>(1) << 62) / (d * d))
        throw ArgumentError("u_d: rescaled bound overflows");
    FormSignature sig(s.weight(), s.index() * d * d, s.lattice(), s.character(), s.level());
    JacobiExpansion out(sig, phi.bound() * d * d);
    const std::uint64_t old_mod = s.key_modulus();
    for (const auto& [key, v] : phi.coefficients()) {
        for (std::uint64_t t = 0; t < d; ++t) {
            std::uint64_t rho2 = d * (key.rho + old_mod * t);
            out.set_coeff_key(key.D * static_cast<long long>(d * d),
                              static_cast<long long>(rho2), v);
        }
    }
    out.seal();
    return out;
}

// V_m: J_{k,1} -> J_{k,m},
//   c'(n,r) = sum_{d | (n,r,m)} d^(k-1) c(n m / d^2, r / d).
inline JacobiExpansion v_m(const JacobiExpansion& phi, std::uint64_t m) {
    const FormSignature& s = phi.signature();
    if (m == 0) throw ArgumentError("v_m: m must be positive");
    if (s.index() != 1) throw ArgumentError("v_m: input must have index 1");
    if (s.character()) throw ArgumentError("v_m: input character must be trivial");
    FormSignature sig(s.weight(), m, s.lattice(), std::nullopt, s.level());
    JacobiExpansion out(sig, phi.bound());
    const std::uint64_t mod = sig.key_modulus();
    for (std::uint64_t abs_d = 0; abs_d <= out.bound(); ++abs_d) {
        long long D = -static_cast<long long>(abs_d);
        for (std::uint64_t rho = 0; rho < mod; ++rho) {
            __int128 delta = static_cast<__int128>(rho) * rho - D;
            if (delta % static_cast<__int128>(4 * m) != 0) continue;
            long long n = static_cast<long long>(delta / static_cast<__int128>(4 * m));
            Rational acc(0);
            for (std::uint64_t d : divisors(m)) {
                if (rho % d != 0 || static_cast<std::uint64_t>(n) % d != 0) continue;
                mpz_class dk;
                mpz_ui_pow_ui(dk.get_mpz_t(), d, s.weight() - 1);
                long long dn = static_cast<long long>(d);
                acc += Rational(dk) * phi.coeff(n / dn * static_cast<long long>(m / d),
                                                static_cast<long long>(rho / d));
            }
            if (!acc.is_zero()) out.set_coeff_key(D, static_cast<long long>(rho), acc);
        }
    }
    out.seal();
    return out;
}

// B_p: keep coefficients with p | D.  For p coprime to m the lattice scale
// becomes Np and the level gains p^2; for p | m the lattice is unchanged and
// the level gains only p.
inline JacobiExpansion project_bp(const JacobiExpansion& phi, std::uint64_t p) {
    if (!is_prime(p)) throw ArgumentError("project_bp: p must be prime");
    const FormSignature& s = phi.signature();
    const long long pl = static_cast<long long>(p);
    if (s.index() % p == 0) {
        FormSignature sig(s.weight(), s.index(), s.lattice(), s.character(), s.level() * p);
        JacobiExpansion out(sig, phi.bound());
        for (const auto& [key, v] : phi.coefficients()) {
            if (key.D % pl == 0) out.set_coeff_key(key.D, static_cast<long long>(key.rho), v);
        }
        out.seal();
        return out;
    }
    FormSignature sig(s.weight(), s.index(), s.lattice() * p, s.character(), s.level() * p * p);
    JacobiExpansion out(sig, phi.bound());
    const std::uint64_t old_mod = s.key_modulus();
    for (const auto& [key, v] : phi.coefficients()) {
        if (key.D % pl != 0) continue;
        for (std::uint64_t t = 0; t < p; ++t) {
            out.set_coeff_key(key.D, static_cast<long long>(key.rho + old_mod * t), v);
        }
    }
    out.seal();
    return out;
}

// Quadratic twist by psi = (./p): coefficient at (D, rho) scaled by
// kronecker(D, p); lattice scale times p, level times p^2, character
// unchanged (psi^2 is trivial).
inline JacobiExpansion twist(const JacobiExpansion& phi, std::uint64_t p) {
    if (!is_prime(p) || p == 2) throw ArgumentError("twist: p must be an odd prime");
    const FormSignature& s = phi.signature();
    if (s.index() % p == 0) throw ArgumentError("twist: p must be coprime to 2m");
    FormSignature sig(s.weight(), s.index(), s.lattice() * p, s.character(), s.level() * p * p);
    JacobiExpansion out(sig, phi.bound());
    const std::uint64_t old_mod = s.key_modulus();
    for (const auto& [key, v] : phi.coefficients()) {
        int psi = kronecker(key.D, static_cast<long long>(p));
        if (psi == 0) continue;
        Rational scaled = psi == 1 ? v : -v;
        for (std::uint64_t t = 0; t < p; ++t) {
            out.set_coeff_key(key.D, static_cast<long long>(key.rho + old_mod * t), scaled);
        }
    }
    out.seal();
    return out;
}

struct HeckeEigenReport {
    std::uint64_t p;
    std::optional<Rational> eigenvalue;  // empty = NOT_EIGEN
    std::uint64_t certified_bound;

    bool is_eigen() const { return eigenvalue.has_value(); }
};

// Candidate eigenvalue from the first nonzero coefficient, then exact
// verification of phi|T_p = lambda phi on every orbit with |D| <= bound/p^2.
inline HeckeEigenReport detect_eigenvalue(const JacobiExpansion& phi, std::uint64_t p) {
    JacobiExpansion tp = hecke_tp(phi, p);
    const std::uint64_t certified = tp.bound();

    const Rational* pivot = nullptr;
    OrbitKey pivot_key{0, 0};
    for (const auto& [key, v] : phi.coefficients()) {
        if (static_cast<std::uint64_t>(-key.D) > certified || v.is_zero()) continue;
        pivot_key = key;
        pivot = &v;
        break;
    }
    if (pivot == nullptr)
        throw ArgumentError("detect_eigenvalue: form is zero on the certifiable range");
    Rational lambda = tp.coeff_key(pivot_key.D, static_cast<long long>(pivot_key.rho)) / *pivot;

    for (const auto& [key, v] : phi.coefficients()) {
        if (static_cast<std::uint64_t>(-key.D) > certified) continue;
        if (tp.coeff_key(key.D, static_cast<long long>(key.rho)) != lambda * v)
            return HeckeEigenReport{p, std::nullopt, certified};
    }
    for (const auto& [key, v] : tp.coefficients()) {
        if (phi.coeff_key(key.D, static_cast<long long>(key.rho)) * lambda != v)
            return HeckeEigenReport{p, std::nullopt, certified};
    }
    return HeckeEigenReport{p, lambda, certified};
}

}  // namespace jacform
