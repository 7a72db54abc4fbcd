#pragma once

#include <algorithm>

namespace etbc {

/// Parameter estimate (lambda_hat, a_hat).
struct Estimate {
  double lambda_hat = 0.0;
  double a_hat = 0.0;

  bool operator==(const Estimate&) const = default;
};

/// Known box [lambda_lo, lambda_hi] x [a_lo, a_hi] containing the true parameters.
struct ThetaBox {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double a_lo = 0.0;
  double a_hi = 0.0;

  bool valid() const { return lambda_lo <= lambda_hi && a_lo <= a_hi; }
  bool contains(const Estimate& e) const {
    return e.lambda_hat >= lambda_lo && e.lambda_hat <= lambda_hi && e.a_hat >= a_lo &&
           e.a_hat <= a_hi;
  }
  Estimate clamp(const Estimate& e) const {
    return {std::clamp(e.lambda_hat, lambda_lo, lambda_hi), std::clamp(e.a_hat, a_lo, a_hi)};
  }
  Estimate midpoint() const { return {0.5 * (lambda_lo + lambda_hi), 0.5 * (a_lo + a_hi)}; }
  bool operator==(const ThetaBox&) const = default;
};

}  // namespace etbc
