#include <cmath>

#include <doctest.h>

#include "etbc/errors.hpp"
#include "etbc/kernels.hpp"
#include "oracles.hpp"

using namespace etbc;

namespace {

KernelParams reference(double lambda_hat = 3.0, double a_hat = 1.5) {
  return {lambda_hat, a_hat, 1.0, 1.0, 5.0, 16.0};
}

double max_abs_error_vs_exact(const KernelParams& p, const KernelGrid& g) {
  double err = 0.0;
  for (Eigen::Index i = 0; i < g.nx; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      err = std::max(err, std::abs(g(i, j) - oracle::h_exact(i * g.dx, j * g.dx, p.a_hat, p.eps,
                                                             p.b, p.kappa)));
  return err;
}

}  // namespace

TEST_CASE("bessel ratio matches 50-digit series and std::cyl_bessel") {
  CHECK(bessel_i1_ratio(0.0) == 0.5);
  for (double z : {-4.0, -1.0, -1e-3, 1e-3, 1.0, 4.0, 9.0}) {
    CAPTURE(z);
    CHECK(bessel_i1_ratio(z) == doctest::Approx(oracle::i1_ratio(z)).epsilon(1e-14));
  }
  // I1(2)/2 and J1(2)/2 through an unrelated implementation.
  CHECK(bessel_i1_ratio(4.0) == doctest::Approx(std::cyl_bessel_i(1.0, 2.0) / 2.0).epsilon(1e-13));
  CHECK(bessel_i1_ratio(-4.0) == doctest::Approx(std::cyl_bessel_j(1.0, 2.0) / 2.0).epsilon(1e-13));
}

TEST_CASE("bessel ratio is smooth through zero") {
  const double h = 1e-7;
  CHECK(bessel_i1_ratio(h) - bessel_i1_ratio(-h) == doctest::Approx(2 * h / 16.0).epsilon(1e-6));
  CHECK(bessel_i1_ratio_derivative(0.0) == doctest::Approx(1.0 / 16.0));
  for (double z : {-4.0, 0.5, 4.0}) {
    const double fd = (oracle::i1_ratio(z + 1e-5) - oracle::i1_ratio(z - 1e-5)) / 2e-5;
    CHECK(bessel_i1_ratio_derivative(z) == doctest::Approx(fd).epsilon(1e-8));
  }
  CHECK_THROWS_AS(bessel_i1_ratio(NAN), std::domain_error);
}

TEST_CASE("psi values") {
  const KernelParams p = reference();
  CHECK(psi(1.0, 1.0, p) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(psi(0.7, 0.2, reference(0.0)) == 0.0);
  for (double x : {0.0, 0.3, 1.0}) CHECK(psi(x, x, p) == doctest::Approx(-1.5 * x));
  for (auto [x, y] : {std::pair{0.8, 0.2}, {1.0, 0.0}, {0.5, 0.49}})
    CHECK(psi(x, y, p) == doctest::Approx(oracle::psi(x, y, 3.0, 1.0)).epsilon(1e-14));
  // z < 0 branch for a negative estimate.
  CHECK(psi(1.0, 0.0, reference(-4.0)) ==
        doctest::Approx(oracle::psi(1.0, 0.0, -4.0, 1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(psi(0.2, 0.5, p), std::domain_error);
  CHECK_THROWS_AS(psi_x(0.2, 0.5, p), std::domain_error);
}

TEST_CASE("psi_x agrees with a difference quotient of the series") {
  const KernelParams p = reference();
  for (double y : {0.0, 0.25, 0.5, 0.9}) {
    const double h = 1e-5;
    const double fd = (oracle::psi(1.0 + h, y, 3.0, 1.0) - oracle::psi(1.0 - h, y, 3.0, 1.0)) / (2 * h);
    CAPTURE(y);
    CHECK(psi_x(1.0, y, p) == doctest::Approx(fd).epsilon(1e-8));
  }
  // On the diagonal the series gives -(lambda/eps)(1/2 + lambda x^2 /(8 eps)).
  CHECK(psi_x(1.0, 1.0, p) == doctest::Approx(-3.0 * (0.5 + 3.0 / 8.0)));
}

TEST_CASE("gamma") {
  const KernelParams p = reference();
  const long double w = std::sqrt(14.5L);
  CHECK(gamma(0.0, p) == -16.0);
  CHECK(gamma_prime(0.0, p) == 0.0);
  CHECK(gamma(1.0, p) == doctest::Approx(static_cast<double>(-16.0L * std::cos(w))).epsilon(1e-14));
  CHECK(gamma(1.0, p) == doctest::Approx(12.58).epsilon(1e-3));
  const KernelResiduals r = kernel_residuals(p, solve_h(p, 21));
  CHECK(r.gamma_ode < 1e-12);
  CHECK(r.gamma_initial == 0.0);
  CHECK(r.gamma_slope == 0.0);
}

TEST_CASE("a_m <= 0 is a configuration error") {
  KernelParams p = reference();
  p.kappa = 1.0;  // b kappa - a_hat = -0.5
  CHECK_THROWS_AS(gamma(0.5, p), ConfigurationError);
  CHECK_THROWS_AS(solve_h(p, 21), ConfigurationError);
  CHECK_THROWS_AS(compute_gains(p, 21), ConfigurationError);
  p.kappa = 1.5;  // exactly zero
  CHECK_THROWS_AS(check_kernel_params(p), ConfigurationError);
}

TEST_CASE("h kernel converges to the closed form") {
  for (double a_hat : {0.0, 1.5, 3.0}) {
    const KernelParams p = reference(3.0, a_hat);
    CAPTURE(a_hat);
    double prev_paper = INFINITY, prev_refined = INFINITY;
    for (Eigen::Index nx : {21, 41, 81, 161}) {
      const double e_paper = max_abs_error_vs_exact(p, solve_h(p, nx, KernelScheme::paper));
      const double e_refined = max_abs_error_vs_exact(p, solve_h(p, nx, KernelScheme::refined));
      CAPTURE(nx);
      CHECK(e_paper < prev_paper);
      CHECK(e_refined < prev_refined);
      if (std::isfinite(prev_refined)) CHECK(prev_refined / e_refined > 3.5);
      prev_paper = e_paper;
      prev_refined = e_refined;
    }
    CHECK(prev_refined / std::abs(oracle::h_exact(1.0, 0.0, a_hat, 1.0, 1.0, 16.0)) < 5e-4);
  }
}

TEST_CASE("h kernel residuals") {
  const KernelParams p = reference();
  double prev_boundary = INFINITY;
  for (Eigen::Index nx : {21, 41, 81}) {
    const KernelGrid g = solve_h(p, nx);
    const KernelResiduals r = kernel_residuals(p, g);
    CHECK(r.h_diagonal == 0.0);
    CHECK(r.h_origin == 0.0);
    CHECK(r.h_boundary < prev_boundary);
    prev_boundary = r.h_boundary;
    for (Eigen::Index i = 0; i < nx; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) REQUIRE(std::isfinite(g(i, j)));
  }
  const KernelResiduals fine = kernel_residuals(p, solve_h(p, 161, KernelScheme::refined));
  CHECK(fine.h_wave < 0.05);
}

TEST_CASE("h depends on a_hat only") {
  const KernelGrid g1 = solve_h(reference(0.0, 1.0), 41);
  const KernelGrid g2 = solve_h(reference(4.0, 1.0), 41);
  CHECK(g1.h == g2.h);
}

TEST_CASE("gains agree with a reference evaluation to 1e-8") {
  for (auto [lam, a] : {std::pair{3.0, 1.5}, {0.0, 0.0}, {5.0, 3.0}, {1.0, 2.0}}) {
    const KernelParams p = reference(lam, a);
    const Eigen::Index nx = 41;
    const KernelGrid g = solve_h(p, nx);
    const GainSet gs = compute_gains(p, g);
    CAPTURE(lam);
    CAPTURE(a);

    // K1(1,y) = Psi_x(1,y) + w(y) + r Psi(1,y) - int_y^1 w(s) Psi(s,y) ds, w = h_x + r h at x = 1,
    // K2 = gamma'(1) + r gamma(1) - int_0^1 w(s) gamma(s) ds.
    const double dx = 1.0 / (nx - 1);
    const Eigen::Index n = nx - 1;
    const double r = 5.0 - lam / 2.0;
    const double am = 16.0 - a;
    const double om = std::sqrt(am);
    std::vector<double> hx(nx);
    for (Eigen::Index j = 0; j + 2 <= n; ++j)
      hx[j] = (3 * g(n, j) - 4 * g(n - 1, j) + g(n - 2, j)) / (2 * dx);
    hx[n] = -(3 * g(n, n) - 4 * g(n, n - 1) + g(n, n - 2)) / (2 * dx);
    hx[n - 1] = 0.5 * (hx[n] + hx[n - 2]);
    std::vector<double> w(nx);
    for (Eigen::Index j = 0; j <= n; ++j) w[j] = hx[j] + r * g(n, j);
    const double c = lam;
    for (Eigen::Index j = 0; j <= n; ++j) {
      const double y = j * dx;
      double integral = 0.0;
      for (Eigen::Index k = j; k <= n && j < n; ++k) {
        const double wt = (k == j || k == n) ? 0.5 : 1.0;
        integral += wt * w[k] * oracle::psi(k * dx, y, lam, 1.0);
      }
      integral *= dx;
      const double z = c * (1.0 - y * y);
      const double df = (oracle::i1_ratio(z + 1e-6) - oracle::i1_ratio(z - 1e-6)) / 2e-6;
      const double psix = -c * (oracle::i1_ratio(z) + 2 * c * df);
      const double expected = psix + w[j] + r * oracle::psi(1.0, y, lam, 1.0) - integral;
      CHECK(gs.k1(j) == doctest::Approx(expected).epsilon(1e-8));
    }
    double integral = 0.0;
    for (Eigen::Index k = 0; k <= n; ++k)
      integral += ((k == 0 || k == n) ? 0.5 : 1.0) * w[k] * (-16.0 * std::cos(om * k * dx));
    integral *= dx;
    const double k2 = 16.0 * om * std::sin(om) - r * 16.0 * std::cos(om) - integral;
    CHECK(gs.k2 == doctest::Approx(k2).epsilon(1e-8));
    CHECK(gs.r == r);
  }
}

TEST_CASE("gains converge to the closed-form kernel composition") {
  // With the exact h, K1 and K2 follow by quadrature of smooth functions.
  const double lam = 3.0, a = 1.5, eps = 1.0, b = 1.0, kappa = 16.0, r = 3.5;
  const auto w = [&](double s) {
    return oracle::h_exact_x(1.0, s, a, eps, b, kappa) + r * oracle::h_exact(1.0, s, a, eps, b, kappa);
  };
  const auto psi_ref = [&](double x, double y) { return oracle::psi(x, y, lam, eps); };
  const auto psix_ref = [&](double y) {
    const double h = 1e-5;
    return (psi_ref(1.0 + h, y) - psi_ref(1.0 - h, y)) / (2 * h);
  };
  const double om = std::sqrt((b * kappa - a) / eps);

  const GainSet gs = compute_gains(reference(), 321, KernelScheme::refined);
  double scale = gs.k1.cwiseAbs().maxCoeff();
  double err = 0.0;
  for (int j = 0; j <= 320; j += 16) {
    const double y = j / 320.0;
    const double integral = y < 1.0 ? oracle::simpson([&](double s) { return w(s) * psi_ref(s, y); }, y, 1.0, 400) : 0.0;
    const double k1 = psix_ref(y) + w(y) + r * psi_ref(1.0, y) - integral;
    err = std::max(err, std::abs(gs.k1(j) - k1));
  }
  CHECK(err / scale < 2e-3);

  const double k2 = kappa * om * std::sin(om) - r * kappa * std::cos(om) -
                    oracle::simpson([&](double s) { return w(s) * -kappa * std::cos(om * s); }, 0.0, 1.0, 400);
  CHECK(gs.k2 == doctest::Approx(k2).epsilon(2e-3));
}

TEST_CASE("reference gains") {
  const GainSet g = compute_gains(reference(), 21);
  CHECK(g.r == 3.5);
  CHECK(g.k2 == doctest::Approx(-152.78).epsilon(1e-4));
  CHECK(g.k1.size() == 21);
}

TEST_CASE("gains are deterministic") {
  const KernelParams p = reference(2.2, 0.7);
  CHECK(compute_gains(p, 41) == compute_gains(p, 41));
  CHECK(solve_h(p, 41, KernelScheme::refined).h == solve_h(p, 41, KernelScheme::refined).h);
}

TEST_CASE("target Robin coefficient stays above 1/4 over the box") {
  for (double lam = 0.0; lam <= 5.0; lam += 0.25) CHECK(reference(lam).r() > 0.25);
}

TEST_CASE("solve_h rejects tiny grids") {
  CHECK_THROWS_AS(solve_h(reference(), 2), std::invalid_argument);
}
