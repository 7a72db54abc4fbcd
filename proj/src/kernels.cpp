#include "etbc/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "etbc/errors.hpp"
#include "etbc/quadrature.hpp"

namespace etbc {

namespace {

constexpr int kMaxSeriesTerms = 60;
constexpr double kSeriesRelTol = 1e-16;

// Sum of first * prod_{k=1..m} (z/4) / (k (k + shift)), m = 0, 1, ...
double hypergeometric_tail(double z, double first, int shift) {
  double term = first;
  double sum = first;
  const double quarter = 0.25 * z;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    term *= quarter / (static_cast<double>(k) * static_cast<double>(k + shift));
    sum += term;
    if (std::abs(term) < kSeriesRelTol * std::abs(sum)) break;
  }
  return sum;
}

void check_triangle(double x, double y, const char* who) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw std::domain_error(std::string(who) + ": non-finite coordinate");
  if (y > x + 1e-12) {
    std::ostringstream msg;
    msg << who << ": requires y <= x, got x=" << x << " y=" << y;
    throw std::domain_error(msg.str());
  }
}

double frequency(const KernelParams& p) {
  const double am = p.a_m();
  if (!(am > 0.0)) {
    std::ostringstream msg;
    msg << "kappa=" << p.kappa << " gives a_m = b*kappa - a_hat = " << am << " <= 0";
    throw ConfigurationError(msg.str());
  }
  return std::sqrt(am / p.eps);
}

}  // namespace

void check_kernel_params(const KernelParams& p) {
  if (!(p.eps > 0.0)) throw std::invalid_argument("kernel params: eps must be positive");
  if (p.b == 0.0) throw std::invalid_argument("kernel params: b must be nonzero");
  frequency(p);
}

double bessel_i1_ratio(double z) {
  if (!std::isfinite(z)) throw std::domain_error("bessel_i1_ratio: non-finite argument");
  return hypergeometric_tail(z, 0.5, 1);
}

double bessel_i1_ratio_derivative(double z) {
  if (!std::isfinite(z)) throw std::domain_error("bessel_i1_ratio_derivative: non-finite argument");
  return hypergeometric_tail(z, 1.0 / 16.0, 2);
}

double psi(double x, double y, const KernelParams& p) {
  check_triangle(x, y, "psi");
  const double z = p.lambda_hat * (x * x - y * y) / p.eps;
  return -(p.lambda_hat / p.eps) * x * bessel_i1_ratio(z);
}

double psi_x(double x, double y, const KernelParams& p) {
  check_triangle(x, y, "psi_x");
  const double c = p.lambda_hat / p.eps;
  const double z = c * (x * x - y * y);
  return -c * (bessel_i1_ratio(z) + 2.0 * c * x * x * bessel_i1_ratio_derivative(z));
}

double gamma(double x, const KernelParams& p) {
  return -p.kappa * std::cos(frequency(p) * x);
}

double gamma_prime(double x, const KernelParams& p) {
  const double w = frequency(p);
  return p.kappa * w * std::sin(w * x);
}

double gamma_second(double x, const KernelParams& p) {
  const double w = frequency(p);
  return p.kappa * w * w * std::cos(w * x);
}

KernelGrid solve_h(const KernelParams& p, Eigen::Index nx, KernelScheme scheme) {
  if (nx < 3) throw std::invalid_argument("solve_h: nx must be at least 3");
  check_kernel_params(p);

  const Eigen::Index n = nx - 1;
  const double dx = 1.0 / static_cast<double>(n);
  Eigen::VectorXd g(nx);
  for (Eigen::Index i = 0; i < nx; ++i) g(i) = gamma(static_cast<double>(i) * dx, p);

  KernelGrid out;
  out.nx = nx;
  out.dx = dx;
  out.h = Eigen::MatrixXd::Zero(nx, nx);
  auto& h = out.h;

  // First sub-diagonal. Zero diagonal data makes h constant along x - y = dx.
  double sub = 0.0;
  if (scheme == KernelScheme::paper) {
    sub = p.b * g(1) / (p.eps / dx + 0.5 * p.b * dx * g(0));
  } else {
    const double c = p.b / p.eps;
    sub = 0.5 * dx * c * (g(0) + g(1)) / (1.0 + 0.25 * dx * dx * c * g(0));
  }
  h(1, 0) = sub;

  for (Eigen::Index i = 2; i < nx; ++i) {
    h(i, i - 1) = sub;
    for (Eigen::Index j = 1; j + 1 < i; ++j)
      h(i, j) = h(i - 1, j + 1) + h(i - 1, j - 1) - h(i - 2, j);

    // Boundary condition at y = 0 closes the row; the trapezoid end weight on
    // h(i,0) moves to the left-hand side.
    double integral = 0.0;
    for (Eigen::Index j = 1; j < i; ++j) integral += h(i, j) * g(j);
    integral *= dx;
    const double rhs_common = p.b * g(i) - p.b * integral;
    if (scheme == KernelScheme::paper) {
      h(i, 0) = (p.eps * h(i, 1) / dx + rhs_common) / (p.eps / dx + 0.5 * p.b * dx * g(0));
    } else {
      h(i, 0) = (p.eps * (4.0 * h(i, 1) - h(i, 2)) / (2.0 * dx) + rhs_common) /
                (1.5 * p.eps / dx + 0.5 * p.b * dx * g(0));
    }
  }
  return out;
}

Eigen::VectorXd h_x_at_boundary(const KernelGrid& grid) {
  const Eigen::Index n = grid.nx - 1;
  const double dx = grid.dx;
  const auto& h = grid.h;
  Eigen::VectorXd hx(grid.nx);
  for (Eigen::Index j = 0; j + 2 <= n; ++j)
    hx(j) = (3.0 * h(n, j) - 4.0 * h(n - 1, j) + h(n - 2, j)) / (2.0 * dx);
  // At the corner the backward x-stencil leaves the triangle; use h_x = -h_y on the diagonal.
  hx(n) = -(3.0 * h(n, n) - 4.0 * h(n, n - 1) + h(n, n - 2)) / (2.0 * dx);
  hx(n - 1) = 0.5 * (hx(n) + hx(n - 2));
  return hx;
}

GainSet compute_gains(const KernelParams& p, const KernelGrid& grid) {
  check_kernel_params(p);
  const Eigen::Index nx = grid.nx;
  const Eigen::Index n = nx - 1;
  const double dx = grid.dx;
  const double r = p.r();

  const Eigen::VectorXd hx = h_x_at_boundary(grid);
  const Eigen::VectorXd w = hx + r * grid.h.row(n).transpose();

  GainSet gains;
  gains.r = r;
  gains.lambda_hat = p.lambda_hat;
  gains.a_hat = p.a_hat;
  gains.k1.resize(nx);

  for (Eigen::Index j = 0; j < nx; ++j) {
    const double y = static_cast<double>(j) * dx;
    Eigen::VectorXd integrand(nx - j);
    for (Eigen::Index k = j; k < nx; ++k)
      integrand(k - j) = w(k) * psi(static_cast<double>(k) * dx, y, p);
    gains.k1(j) = psi_x(1.0, y, p) + w(j) + r * psi(1.0, y, p) - trapezoid(integrand, dx);
  }

  Eigen::VectorXd integrand(nx);
  for (Eigen::Index j = 0; j < nx; ++j) integrand(j) = w(j) * gamma(static_cast<double>(j) * dx, p);
  gains.k2 = gamma_prime(1.0, p) + r * gamma(1.0, p) - trapezoid(integrand, dx);
  return gains;
}

GainSet compute_gains(const KernelParams& p, Eigen::Index nx, KernelScheme scheme) {
  return compute_gains(p, solve_h(p, nx, scheme));
}

KernelResiduals kernel_residuals(const KernelParams& p, const KernelGrid& grid) {
  KernelResiduals res;
  constexpr int kSamples = 201;
  for (int k = 0; k < kSamples; ++k) {
    const double x = static_cast<double>(k) / (kSamples - 1);
    res.gamma_ode = std::max(res.gamma_ode, std::abs(p.eps * gamma_second(x, p) + p.a_m() * gamma(x, p)));
  }
  res.gamma_initial = std::abs(gamma(0.0, p) + p.kappa);
  res.gamma_slope = std::abs(gamma_prime(0.0, p));

  const Eigen::Index nx = grid.nx;
  const Eigen::Index n = nx - 1;
  const double dx = grid.dx;
  const auto& h = grid.h;
  Eigen::VectorXd g(nx);
  for (Eigen::Index i = 0; i < nx; ++i) g(i) = gamma(static_cast<double>(i) * dx, p);

  for (Eigen::Index i = 0; i < nx; ++i) res.h_diagonal = std::max(res.h_diagonal, std::abs(h(i, i)));
  res.h_origin = std::abs(h(0, 0));

  for (Eigen::Index i = 2; i < nx; ++i) {
    const double hy0 = (-3.0 * h(i, 0) + 4.0 * h(i, 1) - h(i, 2)) / (2.0 * dx);
    Eigen::VectorXd integrand = h.row(i).head(i + 1).transpose().cwiseProduct(g.head(i + 1));
    const double r24 = p.eps * hy0 + p.b * g(i) - p.b * trapezoid(integrand, dx);
    res.h_boundary = std::max(res.h_boundary, std::abs(r24));
  }

  // Interior nodes use the centred cross; the y = 0 column uses a one-sided
  // second derivative in y, which the marching scheme never enforces.
  const double inv = 1.0 / (dx * dx);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 1; j + 1 <= i - 1; ++j) {
      const double hyy = (h(i, j + 1) - 2.0 * h(i, j) + h(i, j - 1)) * inv;
      const double hxx = (h(i + 1, j) - 2.0 * h(i, j) + h(i - 1, j)) * inv;
      res.h_wave = std::max(res.h_wave, std::abs(hyy - hxx));
    }
    if (i >= 3) {
      const double hyy = (2.0 * h(i, 0) - 5.0 * h(i, 1) + 4.0 * h(i, 2) - h(i, 3)) * inv;
      const double hxx = (h(i + 1, 0) - 2.0 * h(i, 0) + h(i - 1, 0)) * inv;
      res.h_wave = std::max(res.h_wave, std::abs(hyy - hxx));
    }
  }
  return res;
}

}  // namespace etbc
