#pragma once

#include <functional>

#include <Eigen/Dense>

namespace etbc {

/// Composite trapezoid of samples on a uniform grid with spacing h.
template <typename Derived>
double trapezoid(const Eigen::DenseBase<Derived>& f, double h) {
  const Eigen::Index n = f.size();
  if (n < 2) return 0.0;
  return h * (f.sum() - 0.5 * (f(0) + f(n - 1)));
}

/// Composite trapezoid of f sampled at (possibly non-uniform) abscissae t.
double trapezoid(const Eigen::VectorXd& f, const Eigen::VectorXd& t);

/// Running trapezoid integral: out(k) = int_{t_0}^{t_k} f.
Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& f, const Eigen::VectorXd& t);

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 50);

/// Piecewise-linear resampling of values on a uniform [0,1] grid onto n nodes.
Eigen::VectorXd resample_uniform(const Eigen::VectorXd& values, Eigen::Index n);

/// n uniformly spaced nodes on [0, 1].
inline Eigen::VectorXd unit_grid(Eigen::Index n) {
  return Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
}

}  // namespace etbc
