#pragma once

#include <stdexcept>
#include <string>

namespace hcs {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: bad domain, malformed scenario, out-of-range option.
class InputError : public Error {
public:
    using Error::Error;
};

/// A frequency falls inside the exclusion band around a Dirichlet eigenvalue.
class ResonanceError : public Error {
public:
    ResonanceError(const std::string& what, double eigenvalue, int index)
        : Error(what), eigenvalue_(eigenvalue), index_(index) {}

    double eigenvalue() const noexcept { return eigenvalue_; }
    /// 1-based eigen index of the offending eigenvalue, 0 when unknown.
    int index() const noexcept { return index_; }

private:
    double eigenvalue_;
    int index_;
};

/// Linear solve or eigensolve breakdown.
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace hcs
