#ifndef CHARGENET_ERRORS_HPP
#define CHARGENET_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace chargenet {

/// Bad caller-supplied value (out-of-range node id, negative duration, ...).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Value outside the domain on which a model function is defined.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Inconsistent configuration, e.g. electricity pricing enabled without a price table.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input that the admissible-input relation does not allow in the current state.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Raised by the simulator when a car cannot legally take the requested step.
/// Carries the 1-based car id and 0-based step index of the first failure.
class InfeasibleError : public std::runtime_error {
public:
  InfeasibleError(std::size_t car, std::size_t step, const std::string& what)
      : std::runtime_error("car " + std::to_string(car) + ", step " + std::to_string(step) +
                           ": " + what),
        car_(car),
        step_(step) {}

  [[nodiscard]] std::size_t car() const noexcept { return car_; }
  [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
  std::size_t car_;
  std::size_t step_;
};

/// Scenario or plan file that does not match the schema.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& context, const std::string& what)
      : std::runtime_error(context.empty() ? what : context + ": " + what), context_(context) {}

  [[nodiscard]] const std::string& context() const noexcept { return context_; }

private:
  std::string context_;
};

/// Structurally valid input that violates model invariants. The full list of
/// violations is kept so callers can print every problem at once.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  [[nodiscard]] const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "validation failed";
    for (const auto& item : items) {
      out += "; " + item;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace chargenet

#endif
