#pragma once

#include <stdexcept>
#include <string>

namespace ncvar {

/// Input data violates a structural invariant (bad distribution, bad kernel
/// row, budget below one, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine failed to converge or met ill-conditioned data.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be parsed; the message carries position information
/// when available.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ncvar
