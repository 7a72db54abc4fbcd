#include <cmath>
#include <numbers>

#include <doctest.h>

#include "etbc/errors.hpp"
#include "etbc/quadrature.hpp"
#include "etbc/trigger.hpp"
#include "oracles.hpp"

using namespace etbc;
using std::numbers::pi;

namespace {

DesignContext reference_context() {
  return {ThetaBox{0.0, 5.0, 0.0, 3.0}, 5.0, 1.0, 1.0, 16.0, 21, KernelScheme::paper};
}

TriggerState sampled_at(const PlantState& s, const GainSet& g) {
  TriggerState ts;
  ts.u_sampled = s.u;
  ts.zeta_sampled = s.zeta;
  ts.gains = g;
  ts.u_d = held_input(s.u, s.zeta, g);
  return ts;
}

PlantState state(Eigen::Index nx, double shift, double zeta) {
  PlantState s;
  s.u = unit_grid(nx).unaryExpr([shift](double x) { return x * x * std::sin(2 * pi * x + shift); });
  s.zeta = zeta;
  return s;
}

// int_0^1 ds / (n1 + n2 s + n3 s^2) for a positive discriminant.
double dwell_closed_form(double n1, double n2, double n3) {
  const double d = std::sqrt(n2 * n2 - 4 * n1 * n3);
  const auto F = [&](double s) { return std::log(std::abs((2 * n3 * s + n2 - d) / (2 * n3 * s + n2 + d))) / d; };
  return F(1.0) - F(0.0);
}

}  // namespace

TEST_CASE("held input is the trapezoid feedback law") {
  const GainSet g = gains_on_grid(compute_gains({3.0, 1.5, 1.0, 1.0, 5.0, 16.0}, 21), 41);
  const PlantState s = state(41, 0.0, 5.0);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(41);
  w(0) = w(40) = 0.5;
  const double expected = (g.k1.array() * s.u.array() * w.array()).sum() / 40.0 + g.k2 * 5.0;
  CHECK(held_input(s.u, s.zeta, g) == doctest::Approx(expected).epsilon(1e-13));

  GainSet zero = g;
  zero.k1.setZero();
  zero.k2 = 0.0;
  CHECK(held_input(s.u, s.zeta, zero) == 0.0);
  CHECK_THROWS_AS(held_input(Eigen::VectorXd::Zero(21), 0.0, g), std::invalid_argument);
}

TEST_CASE("deviation is U_c - U_d") {
  const GainSet g = compute_gains({2.0, 1.0, 1.0, 1.0, 5.0, 16.0}, 21);
  const TriggerState ts = sampled_at(state(21, 0.0, 5.0), g);
  CHECK(deviation(state(21, 0.0, 5.0), ts) == 0.0);
  for (double shift : {0.1, 0.5, 2.0}) {
    const PlantState now = state(21, shift, 4.0 + shift);
    const double uc = continuous_input(now, ts);
    CHECK(deviation(now, ts) == doctest::Approx(uc - ts.u_d).epsilon(1e-12).scale(std::abs(uc)));
  }
}

TEST_CASE("m step is exact for frozen forcing") {
  const EtmParams p;
  const PlantState s = state(21, 0.3, 2.0);
  const double d = 1.7;
  const double F = m_forcing(s, d, p);
  const double u1 = s.u(20), u0 = s.u(0), n2 = std::pow(l2_norm(s), 2);
  CHECK(F == doctest::Approx(20.0 * d * d - 100.0 * (u1 * u1 + u0 * u0 + n2 + 4.0)));

  double m = -500.0;
  for (double dt : {0.004, 0.04, 0.4}) {
    const double ours = step_m(m, s, d, p, dt);
    const double ref = oracle::rk4([&](double, double y) { return -p.eta * y + F; }, m, 0.0, dt, 2000);
    CAPTURE(dt);
    CHECK(ours == doctest::Approx(ref).epsilon(1e-12));
  }
  // No state and no deviation: pure exponential decay.
  PlantState zero = state(21, 0.0, 0.0);
  zero.u.setZero();
  for (int k = 0; k < 100; ++k) m = step_m(m, zero, 0.0, p, 0.004);
  CHECK(m == doctest::Approx(-500.0 * std::exp(-15.0 * 0.4)).epsilon(1e-12));
}

TEST_CASE("m stays negative under any state") {
  const EtmParams p;
  double m = p.m0;
  for (int k = 0; k < 1000; ++k) {
    const PlantState s = state(21, 0.01 * k, std::sin(0.1 * k));
    m = step_m(m, s, 0.0, p, 0.004);
    REQUIRE(m < 0.0);
  }
}

TEST_CASE("m overtaken by the deviation term is an invariant violation") {
  EtmParams p;
  p.lambda_d = 1e6;
  PlantState s = state(21, 0.0, 0.0);
  s.u.setZero();
  CHECK_THROWS_AS(step_m(-1e-3, s, 10.0, p, 0.1), InvariantViolation);
}

TEST_CASE("trigger rule") {
  const EtmParams p;  // xi 1.1, T_max 1.2
  const double m = -100.0;
  const double edge = std::sqrt(110.0);
  EtmParams exact = p;
  exact.xi = 2.0;
  CHECK(check_trigger(2.0, -2.0, 0.5, 0.0, exact));  // equality fires
  CHECK(check_trigger(-edge * 1.001, m, 0.5, 0.0, p));
  CHECK_FALSE(check_trigger(edge * 0.999, m, 0.5, 0.0, p));
  CHECK_FALSE(check_trigger(0.0, m, 1.2 - 1e-6, 0.0, p));
  CHECK(check_trigger(0.0, m, 1.2 - 1e-11, 0.0, p));
  CHECK(check_trigger(0.0, m, 3.4, 2.2, p));
  CHECK_FALSE(check_trigger(0.0, m, 3.3, 2.2, p));
}

TEST_CASE("etm parameter checks") {
  CHECK_NOTHROW(check_etm_params(EtmParams{}));
  EtmParams p;
  p.m0 = 0.0;
  CHECK_THROWS_AS(check_etm_params(p), std::invalid_argument);
  p = {};
  p.kappas[2] = -1.0;
  CHECK_THROWS_AS(check_etm_params(p), std::invalid_argument);
  p = {};
  p.T_max = 0.0;
  CHECK_THROWS_AS(check_etm_params(p), std::invalid_argument);
}

TEST_CASE("derivative-bound constants on a single estimate") {
  DesignContext ctx = reference_context();
  ctx.box = {3.0, 3.0, 1.5, 1.5};
  const DerivativeBound b = lemma1_constants(ctx, 5);
  CHECK(b.samples == 1);
  const GainSet g = compute_gains({3.0, 1.5, 1.0, 1.0, 5.0, 16.0}, 21);
  const double k1_end = g.k1(20);
  CHECK(b.eps[0] == doctest::Approx(6.0 * k1_end * k1_end));
  const double k2sq = g.k2 * g.k2;
  CHECK(b.eps[4] == doctest::Approx(12.0 * 1.5 * 1.5 * k2sq + 12.0 * k1_end * k1_end * k2sq));
}

TEST_CASE("derivative-bound constants over the box") {
  const DesignContext ctx = reference_context();
  const DerivativeBound coarse = lemma1_constants(ctx, 11);
  const DerivativeBound fine = lemma1_constants(ctx, 21);
  CHECK(coarse.samples == 121);
  for (double e : coarse.eps) CHECK(e > 0.0);
  CHECK(fine.eps[0] == doctest::Approx(coarse.eps[0]).epsilon(0.05));
  for (std::size_t k = 0; k < 5; ++k) CHECK(fine.eps[k] >= coarse.eps[k] * (1 - 1e-12));

  ThetaBox bad{5.0, 0.0, 0.0, 3.0};
  DesignContext broken = ctx;
  broken.box = bad;
  CHECK_THROWS_AS(lemma1_constants(broken), std::invalid_argument);
}

TEST_CASE("dwell integral") {
  for (auto [n1, n2, n3] : {std::tuple{11.0, 4700.0, 4700.0}, {0.5, 3.0, 2.0}, {1.0, 1e6, 1e6}}) {
    CAPTURE(n1);
    CAPTURE(n2);
    CHECK(dwell_integral(n1, n2, n3) == doctest::Approx(dwell_closed_form(n1, n2, n3)).epsilon(1e-9));
  }
  CHECK(dwell_integral(2.0, 0.0, 0.0) == doctest::Approx(0.5));
  CHECK(dwell_integral(1.0, 0.0, 1.0) == doctest::Approx(pi / 4));
  CHECK_THROWS_AS(dwell_integral(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("dwell bound coefficients") {
  EtmParams p;
  const DwellReport r = dwell_bound(4661.9, p);
  CHECK(r.n1 == doctest::Approx(0.5 * 1.1 * 20));
  CHECK(r.n2 == doctest::Approx(1 + 4661.9 + 1.1 * 20 + 15));
  CHECK(r.n3 == doctest::Approx(1 + 15 + 4661.9 + 0.5 * 1.1 * 20));
  CHECK(r.tau_a > 0.0);
  CHECK(r.tau_min == std::min(r.tau_a, p.T_max));
  CHECK(dwell_bound(2 * 4661.9, p).tau_a < r.tau_a);
}

TEST_CASE("kappa suggestions are homogeneous") {
  const std::array<double, 5> eps{1.0, 2.0, 3.0, 4.0, 5.0};
  const auto k = suggest_kappas(eps, 1.1);
  CHECK(k[0] == doctest::Approx(2 * 2.0 / 1.1));
  CHECK(k[3] == doctest::Approx(2 * 5.0 / 1.1));
  std::array<double, 5> scaled;
  for (std::size_t i = 0; i < 5; ++i) scaled[i] = 7.0 * eps[i];
  const auto ks = suggest_kappas(scaled, 1.1);
  const auto kx = suggest_kappas(eps, 2.2);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(ks[i] == doctest::Approx(7.0 * k[i]));
    CHECK(kx[i] == doctest::Approx(0.5 * k[i]));
  }
  CHECK_THROWS_AS(suggest_kappas(eps, 0.0), std::invalid_argument);
}
