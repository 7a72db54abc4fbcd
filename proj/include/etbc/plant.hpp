#pragma once

#include <Eigen/Dense>

namespace etbc {

/// True plant coefficients: zeta' = a zeta + b u(0,t), u_t = eps u_xx + lambda u,
/// u_x(0,t) = 0, u_x(1,t) + q u(1,t) = U(t).
struct PlantParams {
  double a = 0.0;
  double b = 1.0;
  double eps = 1.0;
  double lambda = 0.0;
  double q = 0.0;

  bool operator==(const PlantParams&) const = default;
};

/// Full measured state: u on nx uniform nodes of [0,1], the ODE state and the time.
struct PlantState {
  Eigen::VectorXd u;
  double zeta = 0.0;
  double t = 0.0;
};

struct GridSpec {
  Eigen::Index nx = 21;
  double dt = 0.004;

  double dx() const { return 1.0 / static_cast<double>(nx - 1); }
  bool operator==(const GridSpec&) const = default;
};

/// Crank-Nicolson stepper for the cascade under a held boundary input.
///
/// Neumann and Robin conditions use ghost nodes, which keeps the scheme
/// second order in space; zeta uses the trapezoidal rule with u(0,.) at both
/// time levels. The tridiagonal factorisation is computed once.
class PlantStepper {
 public:
  PlantStepper(const PlantParams& params, const GridSpec& grid);

  /// Advance one time step with boundary input held at u_d.
  /// Throws IntegrationOverflow when any entry exceeds 1e12 or is non-finite.
  PlantState step(const PlantState& s, double u_d) const;

  const PlantParams& params() const { return params_; }
  const GridSpec& grid() const { return grid_; }

 private:
  PlantParams params_;
  GridSpec grid_;
  // Explicit half: tridiagonal (lower, diag, upper) of I + dt/2 A.
  Eigen::VectorXd ex_lower_, ex_diag_, ex_upper_;
  // Implicit half, pre-factored for the Thomas sweep.
  Eigen::VectorXd im_lower_, im_upper_modified_, im_pivot_;
  double input_weight_ = 0.0;  // dt * 2 eps / dx, enters the last row
};

/// One step without caching the factorisation.
PlantState step(const PlantState& s, const PlantParams& p, const GridSpec& g, double u_d);

/// Trapezoid approximation of the L2(0,1) norm of u.
double l2_norm(const PlantState& s);
double l2_norm(const Eigen::VectorXd& u);

/// Trapezoid approximation of int_0^1 sin(n pi x) u(x) dx, n >= 1.
double mode_projection(const PlantState& s, int n);
double mode_projection(const Eigen::VectorXd& u, int n);

}  // namespace etbc
