#pragma once

#include <stdexcept>
#include <string>

namespace esr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A distribution, estimator, or experiment parameter is out of range.
/// `field()` names the offending parameter.
class InvalidParameter : public Error {
public:
    InvalidParameter(std::string field, const std::string& what)
        : Error("invalid parameter '" + field + "': " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NoDensity : public Error {
public:
    explicit NoDensity(const std::string& family)
        : Error("no density: " + family + " has an atom here") {}
};

class UndefinedQuantile : public Error {
public:
    explicit UndefinedQuantile(const std::string& family)
        : Error("quantile at u=0 is undefined for " + family) {}
};

class InfiniteValue : public Error {
public:
    explicit InfiniteValue(const std::string& what) : Error("infinite " + what) {}
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

/// A data-dependent precondition failed (empty sample, too few blocks, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace esr
