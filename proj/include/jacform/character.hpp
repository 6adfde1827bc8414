#pragma once

#include <cstdint>

#include "jacform/errors.hpp"
#include "jacform/numtheory.hpp"

namespace jacform {

// Real Dirichlet character chi_D = kronecker(D, .) attached to a discriminant
// D != 0, D = 0,1 mod 4.  D = 1 is the trivial character.
class QuadCharacter {
public:
    explicit QuadCharacter(long long discriminant) : d_(discriminant) {
        if (d_ == 0 || !is_discriminant(d_))
            throw ArgumentError("QuadCharacter: discriminant must be nonzero and 0,1 mod 4");
    }

    static QuadCharacter trivial() { return QuadCharacter(1); }

    long long discriminant() const { return d_; }
    std::uint64_t modulus() const { return d_ < 0 ? -static_cast<std::uint64_t>(d_) : d_; }
    bool is_trivial() const { return d_ == 1; }

    int operator()(long long n) const { return kronecker(d_, n); }

    friend bool operator==(const QuadCharacter& a, const QuadCharacter& b) {
        return a.d_ == b.d_;
    }
    friend bool operator!=(const QuadCharacter& a, const QuadCharacter& b) {
        return a.d_ != b.d_;
    }

private:
    long long d_;
};

}  // namespace jacform
