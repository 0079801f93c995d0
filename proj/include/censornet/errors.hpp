#pragma once

#include <stdexcept>
#include <string>

namespace censornet {

// Precondition violated by the caller (bad URL, out-of-range status, k > n...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Arithmetic domain violation, e.g. a zero margin of error.
class DomainError : public InputError {
public:
    using InputError::InputError;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Stored archive failed checksum or schema validation.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An external lookup (registrar availability, resolver) could not answer.
class LookupFailedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace censornet
