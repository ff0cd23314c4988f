#pragma once

#include <stdexcept>
#include <string>

namespace poisson_bv {

/// Failure classes. The CLI maps them onto exit codes.
enum class ErrorKind {
    usage,         // malformed input, unsupported model or option
    precondition,  // violated operation precondition (resonance, genericity, domain)
    numerical      // quadrature or fit did not reach its tolerance
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when a spectral parameter violates one of the genericity conditions.
/// Carries the offending wall index (1-based) and the Weyl element label.
class GenericityError : public Error {
public:
    GenericityError(const std::string& what, int wall, std::string weyl_label)
        : Error(ErrorKind::precondition, what), wall_(wall), weyl_(std::move(weyl_label)) {}

    int wall() const noexcept { return wall_; }
    const std::string& weyl_label() const noexcept { return weyl_; }

private:
    int wall_;
    std::string weyl_;
};

/// Raised by series solvers when p(k) vanishes at a required integer.
class ResonanceError : public Error {
public:
    ResonanceError(const std::string& what, long index)
        : Error(ErrorKind::precondition, what), index_(index) {}

    long index() const noexcept { return index_; }

private:
    long index_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace poisson_bv
