#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fuelctl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model or grid parameter violated its constraint. `field()` names it.
class InvalidParameter : public Error {
public:
    InvalidParameter(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class InvalidControl : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

/// Non-finite values or a broken monotone envelope; signals a scheme bug.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class InvalidStart : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fuelctl
