#pragma once

#include <stdexcept>
#include <string>

namespace etbc {

/// Parameter combination violates a design condition (kappa, q, box).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plant state left the representable range; carries the time of divergence.
class IntegrationOverflow : public std::runtime_error {
 public:
  IntegrationOverflow(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// An invariant that the algorithms guarantee was found broken.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace etbc
