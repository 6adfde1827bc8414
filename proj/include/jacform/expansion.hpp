#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>

#include "jacform/character.hpp"
#include "jacform/errors.hpp"
#include "jacform/numtheory.hpp"
#include "jacform/rational.hpp"

namespace jacform {

// Weight k, index m, lattice scale N: the form transforms under
// Gamma_0(level) |x (NZ x Z), level N^2 by default.  Operators that raise the
// level without refining the lattice (B_p for p | m) record it in `level`.
class FormSignature {
public:
    FormSignature(unsigned k, std::uint64_t m, std::uint64_t N)
        : FormSignature(k, m, N, std::nullopt, N * N) {}

    FormSignature(unsigned k, std::uint64_t m, std::uint64_t N, const QuadCharacter& chi)
        : FormSignature(k, m, N, std::optional<QuadCharacter>(chi), N * N) {}

    FormSignature(unsigned k, std::uint64_t m, std::uint64_t N,
                  std::optional<QuadCharacter> chi, std::uint64_t level)
        : k_(k), m_(m), n_(N), level_(level), chi_(std::move(chi)) {
        if (k_ == 0 || m_ == 0 || n_ == 0) throw ArgumentError("FormSignature: k, m, N must be positive");
        if (level_ == 0 || level_ % (n_ * n_) != 0)
            throw ArgumentError("FormSignature: level must be a multiple of N^2");
        if (chi_ && chi_->is_trivial()) chi_.reset();
        if (chi_ && level_ % chi_->modulus() != 0)
            throw ArgumentError("FormSignature: character modulus must divide the level");
    }

    unsigned weight() const { return k_; }
    std::uint64_t index() const { return m_; }
    std::uint64_t lattice() const { return n_; }
    std::uint64_t level() const { return level_; }
    const std::optional<QuadCharacter>& character() const { return chi_; }
    long long character_disc() const { return chi_ ? chi_->discriminant() : 1; }

    int chi(long long n) const { return chi_ ? (*chi_)(n) : 1; }

    // Orbit keys live mod 2mN.
    std::uint64_t key_modulus() const { return 2 * m_ * n_; }

    friend bool operator==(const FormSignature& a, const FormSignature& b) {
        return a.k_ == b.k_ && a.m_ == b.m_ && a.n_ == b.n_ && a.level_ == b.level_ &&
               a.character_disc() == b.character_disc();
    }
    friend bool operator!=(const FormSignature& a, const FormSignature& b) { return !(a == b); }

private:
    unsigned k_;
    std::uint64_t m_;
    std::uint64_t n_;
    std::uint64_t level_;
    std::optional<QuadCharacter> chi_;
};

// Orbit of (n, r) under the lattice action: D = r^2 - 4mn and rho = r mod 2mN.
// Ordered by (|D|, rho) ascending, which fixes all serialization orders.
struct OrbitKey {
    long long D;
    std::uint64_t rho;

    friend bool operator==(const OrbitKey& a, const OrbitKey& b) {
        return a.D == b.D && a.rho == b.rho;
    }
    friend bool operator<(const OrbitKey& a, const OrbitKey& b) {
        if (a.D != b.D) return -a.D < -b.D;
        return a.rho < b.rho;
    }
};

// Truncated Fourier expansion of a Jacobi form in orbit-reduced coordinates.
// Every orbit with |D| <= bound is represented (absent key = coefficient 0);
// requests beyond the bound raise TruncationError, never a silent zero.
//
// Two-phase lifecycle: set_coeff during building, then seal().  Sealed
// expansions are immutable and safe to share across threads.
class JacobiExpansion {
public:
    JacobiExpansion(FormSignature sig, std::uint64_t bound)
        : sig_(std::move(sig)), bound_(bound), sealed_(false) {
        if (bound_ > static_cast<std::uint64_t>(1) << 62)
            throw ArgumentError("JacobiExpansion: bound too large");
    }

    const FormSignature& signature() const { return sig_; }
    std::uint64_t bound() const { return bound_; }
    bool sealed() const { return sealed_; }

    void seal() {
        for (auto it = coeffs_.begin(); it != coeffs_.end();) {
            it = it->second.is_zero() ? coeffs_.erase(it) : std::next(it);
        }
        sealed_ = true;
    }

    // r^2 - 4mn in wide arithmetic; positive result means a coefficient that
    // is identically zero by holomorphy.
    static __int128 discriminant_wide(long long n, long long r, std::uint64_t m) {
        return static_cast<__int128>(r) * r - static_cast<__int128>(4) * static_cast<__int128>(m) * n;
    }

    void set_coeff(long long n, long long r, const Rational& v) {
        __int128 Dw = discriminant_wide(n, r, sig_.index());
        if (Dw > 0) {
            if (!v.is_zero())
                throw ArgumentError("set_coeff: r^2 > 4mn requires a zero coefficient");
            return;
        }
        if (-Dw > static_cast<__int128>(bound_))
            throw ArgumentError("set_coeff: |D| exceeds the expansion bound");
        store(OrbitKey{static_cast<long long>(Dw), reduce_rho(r)}, v);
    }

    void set_coeff_key(long long D, long long rho, const Rational& v) {
        store(checked_key(D, rho), v);
    }

    Rational coeff(long long n, long long r) const {
        __int128 Dw = discriminant_wide(n, r, sig_.index());
        if (Dw > 0) return Rational(0);
        if (-Dw > static_cast<__int128>(bound_)) {
            throw TruncationError("coeff: |D| = " + wide_str(-Dw) + " exceeds bound " +
                                  std::to_string(bound_));
        }
        return lookup(OrbitKey{static_cast<long long>(Dw), reduce_rho(r)});
    }

    Rational coeff_key(long long D, long long rho) const {
        OrbitKey key = checked_key(D, rho);
        if (static_cast<std::uint64_t>(-D) > bound_)
            throw TruncationError("coeff_key: |D| exceeds bound");
        return lookup(key);
    }

    // Stored nonzero orbits (zeros are pruned at seal time).
    const std::map<OrbitKey, Rational>& coefficients() const { return coeffs_; }

    bool is_zero() const {
        for (const auto& [key, v] : coeffs_) {
            if (!v.is_zero()) return false;
        }
        return true;
    }

    // Representative (n, rho) of an orbit key: n = (rho^2 - D)/4m.
    long long rep_n(const OrbitKey& key) const {
        __int128 num = static_cast<__int128>(key.rho) * key.rho - key.D;
        return static_cast<long long>(num / static_cast<__int128>(4 * sig_.index()));
    }

    std::uint64_t reduce_rho(long long r) const {
        return static_cast<std::uint64_t>(mod_floor(r, static_cast<long long>(sig_.key_modulus())));
    }

private:
    static std::string wide_str(__int128 v) {
        if (v == 0) return "0";
        std::string s;
        bool neg = v < 0;
        while (v != 0) {
            int digit = static_cast<int>(neg ? -(v % 10) : v % 10);
            s.insert(s.begin(), static_cast<char>('0' + digit));
            v /= 10;
        }
        return neg ? "-" + s : s;
    }

    OrbitKey checked_key(long long D, long long rho) const {
        if (D > 0) throw ArgumentError("orbit key: D must be <= 0");
        std::uint64_t mod = sig_.key_modulus();
        if (rho < 0 || static_cast<std::uint64_t>(rho) >= mod)
            throw ArgumentError("orbit key: rho out of range [0, 2mN)");
        __int128 delta = static_cast<__int128>(rho) * rho - D;
        if (delta % static_cast<__int128>(4 * sig_.index()) != 0)
            throw ArgumentError("orbit key: D must be congruent to rho^2 mod 4m");
        return OrbitKey{D, static_cast<std::uint64_t>(rho)};
    }

    void store(const OrbitKey& key, const Rational& v) {
        if (sealed_) throw std::logic_error("set_coeff: expansion is sealed");
        if (static_cast<std::uint64_t>(-key.D) > bound_)
            throw ArgumentError("set_coeff: |D| exceeds the expansion bound");
        auto [it, inserted] = coeffs_.emplace(key, v);
        if (!inserted && it->second != v)
            throw ConsistencyError("set_coeff: conflicting assignment to one orbit");
    }

    Rational lookup(const OrbitKey& key) const {
        auto it = coeffs_.find(key);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    FormSignature sig_;
    std::uint64_t bound_;
    bool sealed_;
    std::map<OrbitKey, Rational> coeffs_;
};

inline JacobiExpansion zero_expansion(const FormSignature& sig, std::uint64_t bound) {
    JacobiExpansion phi(sig, bound);
    phi.seal();
    return phi;
}

// Coefficient-wise sum; signatures must agree, bound is the smaller one.
inline JacobiExpansion add(const JacobiExpansion& a, const JacobiExpansion& b) {
    if (a.signature() != b.signature())
        throw ArgumentError("add: signatures differ");
    std::uint64_t bound = std::min(a.bound(), b.bound());
    std::map<OrbitKey, Rational> merged;
    for (const auto& [key, v] : a.coefficients()) {
        if (static_cast<std::uint64_t>(-key.D) <= bound) merged[key] = v;
    }
    for (const auto& [key, v] : b.coefficients()) {
        if (static_cast<std::uint64_t>(-key.D) <= bound) merged[key] += v;
    }
    JacobiExpansion out(a.signature(), bound);
    for (const auto& [key, v] : merged) {
        out.set_coeff_key(key.D, static_cast<long long>(key.rho), v);
    }
    out.seal();
    return out;
}

inline JacobiExpansion scale(const JacobiExpansion& a, const Rational& c) {
    JacobiExpansion out(a.signature(), a.bound());
    if (!c.is_zero()) {
        for (const auto& [key, v] : a.coefficients()) {
            out.set_coeff_key(key.D, static_cast<long long>(key.rho), v * c);
        }
    }
    out.seal();
    return out;
}

// Minimum of nu_ell over the stored coefficients: a |D| <= bound truncation
// of the infimum over the whole expansion.  INFINITY for the zero expansion.
inline Valuation nu_ell_form(const JacobiExpansion& phi, std::uint64_t ell) {
    if (!is_prime(ell)) throw ArgumentError("nu_ell_form: modulus must be prime");
    Valuation best = Valuation::infinity();
    for (const auto& [key, v] : phi.coefficients()) {
        if (v.is_zero()) continue;
        Valuation cur = nu_ell(v, ell);
        if (cur < best) best = cur;
    }
    return best;
}

// Re-index phi on the finer lattice new_N Z x Z (new_N a multiple of N).  The
// coefficient function is unchanged; each coarse orbit splits into
// new_N / N fine orbits carrying the same value.
inline JacobiExpansion promote(const JacobiExpansion& phi, std::uint64_t new_N) {
    const FormSignature& s = phi.signature();
    if (new_N == 0 || new_N % s.lattice() != 0)
        throw ArgumentError("promote: new lattice scale must be a positive multiple of N");
    std::uint64_t steps = new_N / s.lattice();
    FormSignature sig(s.weight(), s.index(), new_N, s.character(),
                      std::lcm(s.level(), new_N * new_N));
    JacobiExpansion out(sig, phi.bound());
    std::uint64_t old_mod = s.key_modulus();
    for (const auto& [key, v] : phi.coefficients()) {
        for (std::uint64_t t = 0; t < steps; ++t) {
            out.set_coeff_key(key.D, static_cast<long long>(key.rho + old_mod * t), v);
        }
    }
    out.seal();
    return out;
}

// Equality of the underlying coefficient functions on |D| <= bound, across
// possibly different lattice scales (compares on the common refinement).
inline bool forms_agree(const JacobiExpansion& a, const JacobiExpansion& b, std::uint64_t bound) {
    if (a.signature().weight() != b.signature().weight() ||
        a.signature().index() != b.signature().index())
        throw ArgumentError("forms_agree: weight or index mismatch");
    if (bound > a.bound() || bound > b.bound())
        throw TruncationError("forms_agree: bound exceeds a certified bound");
    const std::uint64_t m = a.signature().index();
    const std::uint64_t L = std::lcm(a.signature().key_modulus(), b.signature().key_modulus());
    for (std::uint64_t abs_d = 0; abs_d <= bound; ++abs_d) {
        long long D = -static_cast<long long>(abs_d);
        for (std::uint64_t rho = 0; rho < L; ++rho) {
            __int128 delta = static_cast<__int128>(rho) * rho - D;
            if (delta % static_cast<__int128>(4 * m) != 0) continue;
            long long n = static_cast<long long>(delta / static_cast<__int128>(4 * m));
            if (a.coeff(n, static_cast<long long>(rho)) != b.coeff(n, static_cast<long long>(rho)))
                return false;
        }
    }
    return true;
}

}  // namespace jacform
