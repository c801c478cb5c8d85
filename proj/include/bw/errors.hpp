#pragma once

#include <stdexcept>
#include <string>

namespace bw {

/// Argument outside the mathematical domain of an operation (nonpositive
/// volatility, non-finite input, parameters violating a model constraint).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Option price at or below intrinsic value: no implied volatility exists.
class NoSolutionBelowIntrinsic : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Root finder hit its iteration cap. Carries the best bracket found.
class ConvergenceFailure : public std::runtime_error {
  public:
    ConvergenceFailure(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}
    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }

  private:
    double lo_;
    double hi_;
};

/// Model lacks the integrability condition a pricing route needs.
class UnsupportedModel : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Quadrature did not meet its tolerance.
class AccuracyNotReached : public std::runtime_error {
  public:
    AccuracyNotReached(const std::string& what, double value, double error)
        : std::runtime_error(what), value_(value), error_(error) {}
    double value() const noexcept { return value_; }
    double achieved_error() const noexcept { return error_; }

  private:
    double value_;
    double error_;
};

/// Damping parameter of the Fourier route not strictly inside the strip.
class DampingOutsideStrip : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class InsufficientWingData : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Tail probability is zero to machine precision and the model offers no
/// log-tail to fall back on.
class TailUnderflow : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NotApplicableInfiniteStrip : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Malformed configuration (model file, CLI flags). `field` names the
/// offending entry when one can be identified.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& field, const std::string& reason)
        : std::runtime_error(field.empty() ? reason : field + ": " + reason),
          field_(field) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

}  // namespace bw
