#include "etbc/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace etbc {

double trapezoid(const Eigen::VectorXd& f, const Eigen::VectorXd& t) {
  if (f.size() != t.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double acc = 0.0;
  for (Eigen::Index k = 1; k < f.size(); ++k) acc += 0.5 * (t(k) - t(k - 1)) * (f(k) + f(k - 1));
  return acc;
}

Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& f, const Eigen::VectorXd& t) {
  if (f.size() != t.size()) throw std::invalid_argument("cumulative_trapezoid: size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (Eigen::Index k = 1; k < f.size(); ++k)
    out(k) = out(k - 1) + 0.5 * (t(k) - t(k - 1)) * (f(k) + f(k - 1));
  return out;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

Eigen::VectorXd resample_uniform(const Eigen::VectorXd& values, Eigen::Index n) {
  const Eigen::Index m = values.size();
  if (m < 2 || n < 2) throw std::invalid_argument("resample_uniform: need at least two nodes");
  if (m == n) return values;
  Eigen::VectorXd out(n);
  const double scale = static_cast<double>(m - 1) / static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pos = static_cast<double>(i) * scale;
    auto k = static_cast<Eigen::Index>(std::floor(pos));
    if (k >= m - 1) k = m - 2;
    const double w = pos - static_cast<double>(k);
    out(i) = (1.0 - w) * values(k) + w * values(k + 1);
  }
  return out;
}

}  // namespace etbc
