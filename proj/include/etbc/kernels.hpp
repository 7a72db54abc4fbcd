#pragma once

#include <Eigen/Dense>

namespace etbc {

/// Parameters of the backstepping kernels, evaluated at a parameter estimate.
struct KernelParams {
  double lambda_hat = 0.0;  ///< reaction-coefficient estimate
  double a_hat = 0.0;       ///< ODE-pole estimate
  double eps = 1.0;         ///< diffusivity
  double b = 1.0;           ///< ODE input gain
  double q = 0.0;           ///< Robin coefficient at x = 1
  double kappa = 0.0;       ///< design gain of the ODE transformation

  /// Closed-loop ODE pole a_m = b*kappa - a_hat; must be positive.
  double a_m() const { return b * kappa - a_hat; }
  /// Robin coefficient of the target system, r = q - lambda_hat/(2 eps).
  double r() const { return q - lambda_hat / (2.0 * eps); }
};

/// Throws std::invalid_argument for eps <= 0 or b == 0 and ConfigurationError for a_m <= 0.
void check_kernel_params(const KernelParams& p);

/// Discretisation of the h-kernel sub-diagonal closure.
enum class KernelScheme {
  paper,    ///< h_{i,i-1} copied from h_{2,1}, first-order boundary difference
  refined,  ///< characteristic sub-diagonal, second-order boundary difference
};

/// Lower-triangular samples h(x_i, y_j), j <= i, on a uniform grid over [0,1].
struct KernelGrid {
  Eigen::Index nx = 0;
  double dx = 0.0;
  Eigen::MatrixXd h;  // upper triangle unused and zero

  double operator()(Eigen::Index i, Eigen::Index j) const { return h(i, j); }
};

/// Feedback gains K1(1, y_j), K2(1) and the target Robin coefficient r.
struct GainSet {
  Eigen::VectorXd k1;  ///< K1(1, y_j) on the kernel y-grid
  double k2 = 0.0;
  double r = 0.0;
  double lambda_hat = 0.0;  ///< estimate the gains were computed for
  double a_hat = 0.0;

  bool operator==(const GainSet&) const = default;
};

// ---- series kernels ----------------------------------------------------

/// f(z) = I1(sqrt z)/sqrt z, continued analytically to z < 0 (J1 branch).
double bessel_i1_ratio(double z);
/// f'(z), by term-wise differentiation of the same series.
double bessel_i1_ratio_derivative(double z);

/// Psi(x, y) for 0 <= y <= x <= 1.
double psi(double x, double y, const KernelParams& p);
/// dPsi/dx(x, y) from the differentiated series.
double psi_x(double x, double y, const KernelParams& p);

double gamma(double x, const KernelParams& p);
double gamma_prime(double x, const KernelParams& p);
double gamma_second(double x, const KernelParams& p);

// ---- Goursat kernel and gains -----------------------------------------

/// Finite-difference solution of the h-kernel problem on the triangle 0 <= y <= x <= 1.
KernelGrid solve_h(const KernelParams& p, Eigen::Index nx,
                   KernelScheme scheme = KernelScheme::paper);

/// h_x(1, y_j) from one-sided second-order differences on the boundary row.
Eigen::VectorXd h_x_at_boundary(const KernelGrid& grid);

GainSet compute_gains(const KernelParams& p, const KernelGrid& grid);

/// Convenience: solve h and assemble the gains in one call.
GainSet compute_gains(const KernelParams& p, Eigen::Index nx,
                      KernelScheme scheme = KernelScheme::paper);

/// Max-norm residuals of the gamma and h kernel conditions.
struct KernelResiduals {
  double gamma_ode = 0.0;      ///< |eps gamma'' + a_m gamma|
  double gamma_initial = 0.0;  ///< |gamma(0) + kappa|
  double gamma_slope = 0.0;    ///< |gamma'(0)|
  double h_boundary = 0.0;     ///< boundary condition at y = 0, second-order differencing
  double h_wave = 0.0;         ///< h_yy - h_xx at grid nodes, incl. the y = 0 column
  double h_diagonal = 0.0;     ///< max |h(x_i, x_i)|
  double h_origin = 0.0;       ///< |h(0, 0)|
};

KernelResiduals kernel_residuals(const KernelParams& p, const KernelGrid& grid);

}  // namespace etbc
