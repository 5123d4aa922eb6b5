#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gradstorm {

enum class ErrorKind {
    Config,
    InvalidArgument,
    DivergentIntegral,
    NonConvergent,
    LimitNotReached,
    Pole,
    SingularTime,
    MultiRoot,
    NoRoot,
    EnvelopeViolation,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base of all errors raised by the library. The kind is machine readable
/// and is what the CLI reports on stderr.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class InvalidArgument : public Error {
  public:
    explicit InvalidArgument(const std::string& what)
        : Error(ErrorKind::InvalidArgument, what) {}
};

/// An integral over an unbounded range whose tail does not decay.
class DivergentIntegral : public Error {
  public:
    explicit DivergentIntegral(const std::string& what)
        : Error(ErrorKind::DivergentIntegral, what) {}
};

/// Adaptive quadrature ran out of subdivisions; carries the error it reached.
class NonConvergent : public Error {
  public:
    NonConvergent(const std::string& what, double achieved)
        : Error(ErrorKind::NonConvergent, what), achieved_(achieved) {}

    double achieved_tolerance() const noexcept { return achieved_; }

  private:
    double achieved_;
};

/// The truncation sequence L -> infinity did not settle before L_max.
class LimitNotReached : public Error {
  public:
    LimitNotReached(const std::string& what, double last_L)
        : Error(ErrorKind::LimitNotReached, what), last_L_(last_L) {}

    double last_L() const noexcept { return last_L_; }

  private:
    double last_L_;
};

class PoleError : public Error {
  public:
    PoleError(const std::string& what, std::string factor)
        : Error(ErrorKind::Pole, what), factor_(std::move(factor)) {}

    const std::string& factor() const noexcept { return factor_; }

  private:
    std::string factor_;
};

class SingularTime : public Error {
  public:
    explicit SingularTime(const std::string& what) : Error(ErrorKind::SingularTime, what) {}
};

class MultiRootError : public Error {
  public:
    MultiRootError(const std::string& what, int count)
        : Error(ErrorKind::MultiRoot, what), count_(count) {}

    int count() const noexcept { return count_; }

  private:
    int count_;
};

class NoRootError : public Error {
  public:
    explicit NoRootError(const std::string& what) : Error(ErrorKind::NoRoot, what) {}
};

class EnvelopeViolation : public Error {
  public:
    explicit EnvelopeViolation(const std::string& what)
        : Error(ErrorKind::EnvelopeViolation, what) {}
};

}  // namespace gradstorm
