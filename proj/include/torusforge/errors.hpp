#pragma once

#include <stdexcept>
#include <string>

namespace torusforge {

// Failure taxonomy shared by the library and the command line driver.
// Exit codes: InputError -> 2, CertificationError -> 1, InternalError -> 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: bad expression text, bad file, preconditions violated by
// caller-supplied data.
class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(msg) {}
};

// The numerics ran but the requested certificate could not be produced
// (no convergence, residual above tolerance, margin too small).
class CertificationError : public Error {
public:
    explicit CertificationError(const std::string& msg) : Error(msg) {}
};

// Integration could not proceed (step underflow, nonfinite right hand side,
// step budget exhausted, requested crossing count not reached).  A subclass
// of CertificationError: when it escapes to the driver the requested
// certificate was not produced.
class IntegrationError : public CertificationError {
public:
    explicit IntegrationError(const std::string& msg) : CertificationError(msg) {}
};

// A consistency check that can only fail through a bug fired.
class InternalError : public Error {
public:
    explicit InternalError(const std::string& msg) : Error(msg) {}
};

} // namespace torusforge
