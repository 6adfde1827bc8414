#pragma once

#include <stdexcept>
#include <string>

namespace jacform {

// A parameter violates an operation's domain (non-prime where a prime is
// required, division by zero, malformed discriminant, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A coefficient outside the certified |D| bound was requested.  Distinct from
// "the coefficient is zero": truncated data is unknown, not zero.
class TruncationError : public std::runtime_error {
public:
    explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Stored or loaded data violates a structural invariant (conflicting orbit
// assignment, malformed file, failed cross-check).
class ConsistencyError : public std::runtime_error {
public:
    explicit ConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

// The exceptional set A(p, lambda) is infinite for this eigenvalue.
class InfiniteSetError : public std::runtime_error {
public:
    explicit InfiniteSetError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace jacform
