/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_ERRORS_HPP
#define EVIDENCER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace evidencer {

// Base of every error raised by the library. The C API maps each subclass
// onto one evd_status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// A matrix that must be symmetric positive definite is not.
class DecompositionError : public Error {
public:
    using Error::Error;
};

// The data cannot identify the model (e.g. rank-deficient design).
class EstimationError : public Error {
public:
    using Error::Error;
};

class LayoutError : public Error {
public:
    using Error::Error;
};

// Malformed CSV or JSON input. Carries the 1-based line when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Iterative numerics failed to reach their target accuracy.
class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace evidencer

#endif
