#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace symevol {

/// Raised when a polar quantity is requested on (or too close to) a normal mode.
class PhaseUndefined : public std::domain_error {
 public:
  PhaseUndefined(int mode, const std::string& what)
      : std::domain_error(what), mode_(mode) {}
  int mode() const noexcept { return mode_; }

 private:
  int mode_;
};

/// Raised for a model configuration a routine has no formula for (wrong
/// resonance, non-exponential decay law, ...).
class Unsupported : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a fit or analysis has nothing to work with.
class Degenerate : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Step-size underflow, non-finite state or step budget exhausted.
/// Carries the last accepted state so callers can report how far they got.
class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, double last_t, std::vector<double> last_state)
      : std::runtime_error(what), last_t_(last_t), last_state_(std::move(last_state)) {}

  double last_time() const noexcept { return last_t_; }
  const std::vector<double>& last_state() const noexcept { return last_state_; }

 private:
  double last_t_;
  std::vector<double> last_state_;
};

}  // namespace symevol
