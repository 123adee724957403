#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ciconia {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnknownIdentifier : public Error {
public:
    explicit UnknownIdentifier(std::string name)
        : Error("unknown identifier '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class RealityError : public Error {
public:
    using Error::Error;
};

class FdEvaluationError : public Error {
public:
    using Error::Error;
};

class CurvatureMismatch : public Error {
public:
    using Error::Error;
};

class PositivityViolation : public Error {
public:
    using Error::Error;
};

class NotHolomorphic : public Error {
public:
    using Error::Error;
};

class NotAnIsometry : public Error {
public:
    using Error::Error;
};

class NonPositiveDelta : public Error {
public:
    using Error::Error;
};

class ParameterGate : public Error {
public:
    using Error::Error;
};

class DegenerateMetric : public Error {
public:
    using Error::Error;
};

class ExponentFitUnstable : public Error {
public:
    using Error::Error;
};

class RankDeficientGenerators : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace ciconia
