#pragma once

#include <stdexcept>
#include <string>

namespace flatvol {

/// Invalid user-facing input (bad weight vector, unstable (g, n), malformed text).
/// The CLI maps it to exit code 2.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised by volhat at a point with an integral entry, where q(alpha) = 0.
class WallPointError : public std::domain_error {
public:
    explicit WallPointError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace flatvol
