#pragma once

#include <stdexcept>
#include <string>

namespace ngcma {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: wrong dimensions, asymmetric matrices, NaN fitness.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A factorization or linear solve could not be carried out.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A value lies outside the domain of a chart or a fitness requirement.
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ngcma
