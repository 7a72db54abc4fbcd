#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <doctest.h>

#include "etbc/errors.hpp"
#include "etbc/plant.hpp"
#include "etbc/quadrature.hpp"
#include "oracles.hpp"

using namespace etbc;
using std::numbers::pi;

namespace {

const PlantParams kPlant{1.5, 1.0, 1.0, 3.0, 5.0};

PlantState make_state(Eigen::Index nx, const std::function<double(double)>& f, double zeta) {
  PlantState s;
  s.u = unit_grid(nx).unaryExpr(f);
  s.zeta = zeta;
  return s;
}

PlantState advance(PlantState s, const PlantParams& p, const GridSpec& g, double u_d, double t_end) {
  const PlantStepper stepper(p, g);
  const auto steps = static_cast<int>(std::lround(t_end / g.dt));
  for (int k = 0; k < steps; ++k) s = stepper.step(s, u_d);
  return s;
}

// Smallest positive root of mu tan(mu) = q: cos(mu x) then satisfies both
// boundary conditions with zero input.
double robin_eigenvalue(double q) {
  boost::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(
      [q](double mu) { return mu * std::sin(mu) - q * std::cos(mu); }, 1e-6, pi / 2 - 1e-9,
      boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

// Profile compatible with u_x(1) + q u(1) = 2 pi.
double x2_sine(double x) { return x * x * std::sin(2 * pi * x); }

}  // namespace

TEST_CASE("zero is an equilibrium") {
  PlantState s = make_state(21, [](double) { return 0.0; }, 0.0);
  s = advance(s, kPlant, {21, 0.004}, 0.0, 1.0);
  CHECK(s.u.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.zeta == 0.0);
}

TEST_CASE("ODE alone grows at rate a") {
  PlantState s = make_state(21, [](double) { return 0.0; }, 5.0);
  s = advance(s, kPlant, {21, 0.004}, 0.0, 1.0);
  CHECK(s.t == doctest::Approx(1.0));
  CHECK(s.zeta == doctest::Approx(5.0 * std::exp(1.5)).epsilon(1e-4));
  CHECK(s.u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("separable solution") {
  const double mu = robin_eigenvalue(5.0);
  const double sigma = 3.0 - mu * mu;
  const double zeta0 = 2.0;
  const auto exact_u = [&](double x, double t) { return std::exp(sigma * t) * std::cos(mu * x); };
  const auto exact_zeta = [&](double t) {
    const double c = 1.0 / (sigma - 1.5);
    return (zeta0 - c) * std::exp(1.5 * t) + c * std::exp(sigma * t);
  };

  double prev = INFINITY;
  for (auto [nx, dt] : {std::pair<Eigen::Index, double>{21, 0.004}, {41, 0.002}, {81, 0.001}}) {
    PlantState s = make_state(nx, [&](double x) { return exact_u(x, 0.0); }, zeta0);
    s = advance(s, kPlant, {nx, dt}, 0.0, 1.0);
    double err = 0.0;
    for (Eigen::Index i = 0; i < nx; ++i)
      err = std::max(err, std::abs(s.u(i) - exact_u(i / double(nx - 1), 1.0)));
    err /= std::exp(sigma);
    CAPTURE(nx);
    CHECK(err < 2e-2);
    CHECK(s.zeta == doctest::Approx(exact_zeta(1.0)).epsilon(2e-2));
    if (std::isfinite(prev)) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.25));
    prev = err;
  }
}

TEST_CASE("reference grid within 2% of a 4x refined solution") {
  const double U = 2 * pi;
  const PlantState coarse = advance(make_state(21, x2_sine, 5.0), kPlant, {21, 0.004}, U, 1.0);
  const PlantState fine = advance(make_state(81, x2_sine, 5.0), kPlant, {81, 0.001}, U, 1.0);
  CHECK(l2_norm(coarse) == doctest::Approx(l2_norm(fine)).epsilon(0.02));
  CHECK(coarse.zeta == doctest::Approx(fine.zeta).epsilon(0.02));
  for (Eigen::Index i = 0; i < 21; ++i)
    CHECK(std::abs(coarse.u(i) - fine.u(4 * i)) < 0.02 * fine.u.cwiseAbs().maxCoeff());
}

TEST_CASE("self-convergence ratio") {
  const double U = 2 * pi;
  std::vector<PlantState> runs;
  for (auto [nx, dt] : {std::pair<Eigen::Index, double>{21, 0.004}, {41, 0.002}, {81, 0.001}})
    runs.push_back(advance(make_state(nx, x2_sine, 5.0), kPlant, {nx, dt}, U, 0.5));
  double e1 = std::abs(runs[0].zeta - runs[1].zeta);
  double e2 = std::abs(runs[1].zeta - runs[2].zeta);
  for (Eigen::Index i = 0; i < 21; ++i) {
    e1 = std::max(e1, std::abs(runs[0].u(i) - runs[1].u(2 * i)));
    e2 = std::max(e2, std::abs(runs[1].u(2 * i) - runs[2].u(4 * i)));
  }
  CHECK(e1 / e2 >= 3.0);
  CHECK(e1 / e2 <= 5.0);
}

TEST_CASE("norms and projections") {
  const PlantState s = make_state(201, [](double x) { return std::sin(pi * x); }, 0.0);
  CHECK(l2_norm(s) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK(mode_projection(s, 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(mode_projection(s, 2)) < 1e-12);

  for (int n = 1; n <= 5; ++n) {
    const double exact = oracle::simpson([n](double x) { return std::sin(n * pi * x) * x2_sine(x); },
                                         0.0, 1.0, 10000);
    const double e201 = std::abs(mode_projection(make_state(201, x2_sine, 0.0), n) - exact);
    const double e401 = std::abs(mode_projection(make_state(401, x2_sine, 0.0), n) - exact);
    CAPTURE(n);
    CHECK(e201 < 1e-3);
    CHECK(e201 / e401 > 3.9);  // end derivatives vanish, so often better than 4
  }
  CHECK_THROWS_AS(mode_projection(s, 0), std::invalid_argument);
}

TEST_CASE("without reaction and input the norm does not grow") {
  const PlantParams p{-1.0, 1.0, 1.0, 0.0, 1.0};
  const PlantStepper stepper(p, {41, 0.004});
  PlantState s = make_state(41, x2_sine, 1.0);
  double prev = l2_norm(s);
  for (int k = 0; k < 250; ++k) {
    s = stepper.step(s, 0.0);
    const double now = l2_norm(s);
    REQUIRE(now <= prev * (1.0 + 1e-12));
    prev = now;
  }
}

TEST_CASE("open loop is unstable") {
  PlantState s = make_state(21, x2_sine, 5.0);
  const double u0 = l2_norm(s);
  s = advance(s, kPlant, {21, 0.004}, 0.0, 4.0);
  CHECK(l2_norm(s) > 10 * u0);
  CHECK(std::abs(s.zeta) > 50.0);
}

TEST_CASE("cached and one-shot steps agree") {
  const GridSpec g{21, 0.004};
  const PlantState s0 = make_state(21, x2_sine, 5.0);
  const PlantState a = PlantStepper(kPlant, g).step(s0, -3.0);
  const PlantState b = step(s0, kPlant, g, -3.0);
  CHECK(a.u == b.u);
  CHECK(a.zeta == b.zeta);
}

TEST_CASE("divergence is reported with its time") {
  const PlantParams p{200.0, 1.0, 1.0, 3.0, 5.0};
  const PlantStepper stepper(p, {21, 0.01});
  PlantState s = make_state(21, x2_sine, 1e9);
  bool thrown = false;
  try {
    for (int k = 0; k < 1000; ++k) s = stepper.step(s, 0.0);
  } catch (const IntegrationOverflow& e) {
    thrown = true;
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 1.0);
  }
  CHECK(thrown);
}

TEST_CASE("invalid grids and parameters") {
  CHECK_THROWS_AS(PlantStepper(kPlant, {2, 0.004}), std::invalid_argument);
  CHECK_THROWS_AS(PlantStepper(kPlant, {21, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(PlantStepper({1.5, 0.0, 1.0, 3.0, 5.0}, {21, 0.004}), std::invalid_argument);
  CHECK_THROWS_AS(PlantStepper(kPlant, {21, 0.004}).step(make_state(11, x2_sine, 0.0), 0.0),
                  std::invalid_argument);
}
