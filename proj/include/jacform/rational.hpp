#pragma once

#include <gmpxx.h>

#include <ostream>
#include <string>
#include <utility>

#include "jacform/errors.hpp"

namespace jacform {

// Arbitrary-precision rational number, always in lowest terms with a positive
// denominator.  Thin wrapper over mpq_class that canonicalizes on
// construction and turns division by zero into an ArgumentError instead of an
// abort.
class Rational {
public:
    Rational() : q_(0) {}
    Rational(long n) : q_(n) {}  // NOLINT: implicit by design, mirrors integer literals
    explicit Rational(const mpz_class& n) : q_(n) {}
    Rational(const mpz_class& num, const mpz_class& den) : q_(num, den) {
        if (den == 0) throw ArgumentError("Rational: zero denominator");
        q_.canonicalize();
    }
    Rational(long num, long den) : Rational(mpz_class(num), mpz_class(den)) {}
    explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    // Accepts "num", "num/den", optional leading '-' on either part.
    static Rational parse(const std::string& text) {
        auto slash = text.find('/');
        try {
            if (slash == std::string::npos) return Rational(mpz_class(text));
            mpz_class num(text.substr(0, slash));
            mpz_class den(text.substr(slash + 1));
            return Rational(num, den);
        } catch (const std::invalid_argument&) {
            throw ArgumentError("Rational: cannot parse '" + text + "'");
        }
    }

    mpz_class numerator() const { return q_.get_num(); }
    mpz_class denominator() const { return q_.get_den(); }
    const mpq_class& raw() const { return q_; }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_integer() const { return q_.get_den() == 1; }
    int sign() const { return sgn(q_); }

    // Always "num/den", even for integers ("56/1").
    std::string str() const {
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    Rational operator-() const { return Rational(mpq_class(-q_)); }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw ArgumentError("Rational: division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.str();
    }

private:
    mpq_class q_;
};

// base^exp over Q, with negative exponents allowed for nonzero base.
inline Rational rational_pow(const Rational& base, long exp) {
    if (exp == 0) return Rational(1);
    if (base.is_zero()) {
        if (exp < 0) throw ArgumentError("rational_pow: 0 to a negative power");
        return Rational(0);
    }
    mpz_class num, den;
    unsigned long e = exp < 0 ? -static_cast<unsigned long>(exp) : exp;
    mpz_pow_ui(num.get_mpz_t(), base.numerator().get_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), base.denominator().get_mpz_t(), e);
    return exp < 0 ? Rational(den, num) : Rational(num, den);
}

// Value of an ell-adic valuation: a finite integer or +infinity (for 0).
class Valuation {
public:
    static Valuation infinity() { return Valuation(true, 0); }
    explicit Valuation(long v) : inf_(false), v_(v) {}

    bool is_infinite() const { return inf_; }
    long value() const {
        if (inf_) throw ArgumentError("Valuation: infinite value has no finite part");
        return v_;
    }

    Valuation operator+(const Valuation& o) const {
        if (inf_ || o.inf_) return infinity();
        return Valuation(v_ + o.v_);
    }

    friend bool operator==(const Valuation& a, const Valuation& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }
    friend bool operator!=(const Valuation& a, const Valuation& b) { return !(a == b); }
    friend bool operator<(const Valuation& a, const Valuation& b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.v_ < b.v_;
    }
    friend bool operator<=(const Valuation& a, const Valuation& b) { return a == b || a < b; }
    friend bool operator>(const Valuation& a, const Valuation& b) { return b < a; }
    friend bool operator>=(const Valuation& a, const Valuation& b) { return b <= a; }

    friend std::ostream& operator<<(std::ostream& os, const Valuation& v) {
        if (v.inf_) return os << "INFINITY";
        return os << v.v_;
    }

private:
    Valuation(bool inf, long v) : inf_(inf), v_(v) {}
    bool inf_;
    long v_;
};

}  // namespace jacform
