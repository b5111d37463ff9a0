#pragma once

#include <stdexcept>
#include <string>

namespace k3count {

/// Malformed or out-of-contract caller input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A spherical class with vanishing central charge: the charge lies on a wall.
class WallViolation : public std::runtime_error {
 public:
  WallViolation(const std::string& what, std::string witness)
      : std::runtime_error(what), witness_(std::move(witness)) {}
  const std::string& witness() const { return witness_; }

 private:
  std::string witness_;
};

/// The requested enumeration exceeds the configured point budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double required, double budget)
      : std::runtime_error(what), required_(required), budget_(budget) {}
  double required() const { return required_; }
  double budget() const { return budget_; }

 private:
  double required_;
  double budget_;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace k3count
