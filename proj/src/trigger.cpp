#include "etbc/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "etbc/errors.hpp"
#include "etbc/quadrature.hpp"

namespace etbc {

void check_etm_params(const EtmParams& p) {
  if (!(p.xi > 0.0)) throw std::invalid_argument("etm: xi must be positive");
  if (!(p.T_max > 0.0)) throw std::invalid_argument("etm: T_max must be positive");
  if (!(p.eta > 0.0)) throw std::invalid_argument("etm: eta must be positive");
  if (!(p.lambda_d > 0.0)) throw std::invalid_argument("etm: lambda_d must be positive");
  for (double k : p.kappas)
    if (!(k > 0.0)) throw std::invalid_argument("etm: kappa1..kappa4 must be positive");
  if (!(p.m0 < 0.0)) throw std::invalid_argument("etm: m0 must be negative");
}

GainSet gains_on_grid(const GainSet& gains, Eigen::Index nx) {
  GainSet out = gains;
  out.k1 = resample_uniform(gains.k1, nx);
  return out;
}

double feedback(const Eigen::VectorXd& u, double zeta, const GainSet& gains) {
  if (u.size() != gains.k1.size())
    throw std::invalid_argument("feedback: K1 profile and state are on different grids");
  const double dx = 1.0 / static_cast<double>(u.size() - 1);
  return trapezoid(gains.k1.cwiseProduct(u), dx) + gains.k2 * zeta;
}

double held_input(const Eigen::VectorXd& u_sampled, double zeta_sampled, const GainSet& gains) {
  return feedback(u_sampled, zeta_sampled, gains);
}

double continuous_input(const PlantState& s, const TriggerState& ts) {
  return feedback(s.u, s.zeta, ts.gains);
}

double deviation(const PlantState& s, const TriggerState& ts) {
  return feedback(s.u - ts.u_sampled, s.zeta - ts.zeta_sampled, ts.gains);
}

double m_forcing(const PlantState& s, double d, const EtmParams& p) {
  const double u1 = s.u(s.u.size() - 1);
  const double u0 = s.u(0);
  const double norm = l2_norm(s);
  return p.lambda_d * d * d - p.kappas[0] * u1 * u1 - p.kappas[1] * u0 * u0 -
         p.kappas[2] * norm * norm - p.kappas[3] * s.zeta * s.zeta;
}

double step_m(double m, const PlantState& s, double d, const EtmParams& p, double dt) {
  const double decay = std::exp(-p.eta * dt);
  const double next = m * decay + m_forcing(s, d, p) * (1.0 - decay) / p.eta;
  if (!(next < 0.0)) {
    std::ostringstream msg;
    msg << "dynamic threshold variable became non-negative (m = " << next << ") at t = " << s.t;
    throw InvariantViolation(msg.str());
  }
  return next;
}

bool check_trigger(double d, double m, double t, double t_last, const EtmParams& p) {
  // Times accumulate as sums of dt; allow for that rounding on the dwell branch.
  constexpr double kClockSlack = 1e-9;
  return d * d >= -p.xi * m || t - t_last >= p.T_max - kClockSlack;
}

// ---- dwell-time diagnostics -------------------------------------------

namespace {

struct GainSample {
  Eigen::VectorXd k1;
  double k2 = 0.0;
  double k1_end = 0.0;   // K1(1,1)
  double k1y_end = 0.0;  // K1_y(1,1)
  double k1y_start = 0.0;
  Eigen::VectorXd k1yy;
};

GainSample sample_gains(const DesignContext& ctx, double lambda_hat, double a_hat) {
  const KernelParams kp{lambda_hat, a_hat, ctx.eps, ctx.b, ctx.q, ctx.kappa};
  const GainSet g = compute_gains(kp, ctx.kernel_nx, ctx.scheme);
  const Eigen::Index nx = g.k1.size();
  const Eigen::Index n = nx - 1;
  const double dy = 1.0 / static_cast<double>(n);
  const auto& k = g.k1;

  GainSample s;
  s.k1 = k;
  s.k2 = g.k2;
  s.k1_end = k(n);
  s.k1y_end = (3.0 * k(n) - 4.0 * k(n - 1) + k(n - 2)) / (2.0 * dy);
  s.k1y_start = (-3.0 * k(0) + 4.0 * k(1) - k(2)) / (2.0 * dy);
  s.k1yy.resize(nx);
  const double inv = 1.0 / (dy * dy);
  for (Eigen::Index j = 1; j < n; ++j) s.k1yy(j) = (k(j + 1) - 2.0 * k(j) + k(j - 1)) * inv;
  s.k1yy(0) = (2.0 * k(0) - 5.0 * k(1) + 4.0 * k(2) - k(3)) * inv;
  s.k1yy(n) = (2.0 * k(n) - 5.0 * k(n - 1) + 4.0 * k(n - 2) - k(n - 3)) * inv;
  return s;
}

std::array<double, 5> derivative_bound_constants(const DesignContext& ctx, int resolution) {
  const ThetaBox& box = ctx.box;
  const auto axis = [resolution](double lo, double hi) {
    std::vector<double> v;
    if (lo == hi) return std::vector<double>{lo};
    for (int i = 0; i < resolution; ++i)
      v.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1));
    return v;
  };
  const std::vector<double> lambdas = axis(box.lambda_lo, box.lambda_hi);
  const std::vector<double> as = axis(box.a_lo, box.a_hi);

  std::vector<GainSample> samples;
  for (double l : lambdas)
    for (double a : as) samples.push_back(sample_gains(ctx, l, a));

  const double dy = 1.0 / static_cast<double>(ctx.kernel_nx - 1);
  const double eps = ctx.eps;
  double max_k1_end_sq = 0.0, max_e2 = 0.0, max_e3 = 0.0, max_curv = 0.0;
  double max_k1_l2 = 0.0, max_k2_sq = 0.0, max_k1_diff = 0.0, max_k2_diff = 0.0;
  for (const auto& s : samples) {
    max_k1_end_sq = std::max(max_k1_end_sq, s.k1_end * s.k1_end);
    max_e2 = std::max(max_e2, std::pow(ctx.q * s.k1_end * eps + s.k1y_end * eps, 2));
    max_e3 = std::max(max_e3, std::pow(s.k1y_start * eps + s.k2 * ctx.b, 2));
    // The true reaction coefficient is unknown; the square is convex in it, so
    // the box endpoints bound the maximum.
    for (double lam : {box.lambda_lo, box.lambda_hi}) {
      const Eigen::VectorXd integrand = (eps * s.k1yy + lam * s.k1).array().square().matrix();
      max_curv = std::max(max_curv, trapezoid(integrand, dy));
    }
    max_k1_l2 = std::max(max_k1_l2, trapezoid(s.k1.array().square().matrix(), dy));
    max_k2_sq = std::max(max_k2_sq, s.k2 * s.k2);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const Eigen::VectorXd diff = samples[i].k1 - samples[j].k1;
      max_k1_diff = std::max(max_k1_diff, trapezoid(diff.array().square().matrix(), dy));
      max_k2_diff = std::max(max_k2_diff, std::pow(samples[i].k2 - samples[j].k2, 2));
    }
  }

  const double e2 = eps * eps;
  std::array<double, 5> out{};
  out[0] = 6.0 * e2 * max_k1_end_sq;
  out[1] = 6.0 * max_e2;
  out[2] = 6.0 * max_e3;
  out[3] = 12.0 * max_curv + 12.0 * e2 * max_k1_end_sq * max_k1_l2 +
           12.0 * e2 * max_k1_end_sq * max_k1_diff;
  out[4] = 12.0 * box.a_hi * box.a_hi * max_k2_sq + 12.0 * e2 * max_k1_end_sq * max_k2_sq +
           12.0 * e2 * max_k1_end_sq * max_k2_diff;
  return out;
}

}  // namespace

DerivativeBound lemma1_constants(const DesignContext& ctx, int resolution) {
  const ThetaBox& box = ctx.box;
  if (!box.valid())
    throw std::invalid_argument("lemma1_constants: empty parameter box");
  if (resolution < 2) throw std::invalid_argument("lemma1_constants: resolution must be >= 2");
  if (ctx.kernel_nx < 4) throw std::invalid_argument("lemma1_constants: kernel_nx must be >= 4");

  DerivativeBound out;
  out.eps = derivative_bound_constants(ctx, resolution);
  const int per_axis_l = box.lambda_lo == box.lambda_hi ? 1 : resolution;
  const int per_axis_a = box.a_lo == box.a_hi ? 1 : resolution;
  out.samples = per_axis_l * per_axis_a;

  DesignContext fine = ctx;
  fine.kernel_nx = 2 * ctx.kernel_nx - 1;
  const auto refined = derivative_bound_constants(fine, resolution);
  for (std::size_t k = 0; k < 5; ++k)
    out.k1yy_sensitivity =
        std::max(out.k1yy_sensitivity, std::abs(refined[k] - out.eps[k]) / std::abs(out.eps[k]));
  return out;
}

double dwell_integral(double n1, double n2, double n3) {
  if (!(n1 > 0.0) || n2 < 0.0 || n3 < 0.0)
    throw std::invalid_argument("dwell_integral: need n1 > 0 and n2, n3 >= 0");
  const auto f = [=](double s) { return 1.0 / (n1 + n2 * s + n3 * s * s); };
  // The integrand varies on a scale of n1/n2 near s = 0; split there so the
  // adaptive rule sees both regimes.
  const double knee = std::clamp(n2 > 0.0 ? n1 / n2 : 1.0, 1e-12, 1.0);
  double total = 0.0;
  double a = 0.0;
  for (double b = knee; a < 1.0; b = std::min(1.0, b * 8.0)) {
    total += adaptive_simpson(f, a, b, 1e-13);
    a = b;
  }
  return total;
}

DwellReport dwell_bound(const DerivativeBound& bound, const EtmParams& p) {
  const double eps1 = bound.eps[0];
  if (!(eps1 > 0.0)) throw std::invalid_argument("dwell_bound: eps1 must be positive");
  if (!(p.xi > 0.0) || !(p.lambda_d > 0.0) || !(p.eta > 0.0) || !(p.T_max > 0.0))
    throw std::invalid_argument("dwell_bound: xi, lambda_d, eta and T_max must be positive");
  DwellReport r;
  r.eps = bound.eps;
  r.n1 = 0.5 * p.xi * p.lambda_d;
  r.n2 = 1.0 + eps1 + p.xi * p.lambda_d + p.eta;
  r.n3 = 1.0 + p.eta + eps1 + 0.5 * p.xi * p.lambda_d;
  r.tau_a = dwell_integral(r.n1, r.n2, r.n3);
  r.tau_min = std::min(r.tau_a, p.T_max);
  return r;
}

DwellReport dwell_bound(double eps1, const EtmParams& p) {
  DerivativeBound b;
  b.eps[0] = eps1;
  return dwell_bound(b, p);
}

std::array<double, 4> suggest_kappas(const std::array<double, 5>& eps, double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("suggest_kappas: xi must be positive");
  return {2.0 * eps[1] / xi, 2.0 * eps[2] / xi, 2.0 * eps[3] / xi, 2.0 * eps[4] / xi};
}

}  // namespace etbc
