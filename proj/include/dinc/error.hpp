#pragma once

#include <stdexcept>
#include <string>

namespace dinc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Affine data outside the hull: no Lipschitz solution exists.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A recomputed invariant did not hold.
class VerificationError : public Error {
public:
    using Error::Error;
};

/// Iterative numerics failed to converge or produced garbage.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A refinement would exceed its triangle budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

}  // namespace dinc
