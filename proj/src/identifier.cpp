#include "etbc/identifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "etbc/plant.hpp"
#include "etbc/quadrature.hpp"

namespace etbc {

namespace {

constexpr double kPi = std::numbers::pi;

struct ModeCoefficients {
  double flux;   // multiplies the boundary values (n pi in the continuum)
  double decay;  // multiplies the projection ((n pi)^2 in the continuum)
};

ModeCoefficients mode_coefficients(int n, double dx, RegressorForm form) {
  const double k = n * kPi;
  if (form == RegressorForm::continuum) return {k, k * k};
  const double s = std::sin(0.5 * k * dx);
  return {std::sin(k * dx) / dx, 4.0 * s * s / (dx * dx)};
}

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

double window_start(std::span<const double> event_times, int n_tilde, double T_max) {
  if (event_times.size() < 2) throw std::invalid_argument("window_start: need past events and a candidate");
  if (n_tilde < 1) throw std::invalid_argument("window_start: N_tilde must be >= 1");
  const double t_next = event_times.back();
  const double earliest = t_next - static_cast<double>(n_tilde) * T_max;
  constexpr double kClockSlack = 1e-9;
  for (std::size_t d = 0; d + 1 < event_times.size(); ++d)
    if (event_times[d] >= earliest - kClockSlack) return event_times[d];
  throw std::logic_error("window_start: no past event inside the identification window");
}

Regressors regressors(const Batch& batch, int n, double b, double eps, RegressorForm form) {
  const std::size_t count = batch.size();
  if (count < 2) throw std::invalid_argument("regressors: batch needs at least two samples");
  if (n < 1) throw std::invalid_argument("regressors: mode index must be >= 1");

  const Eigen::Index nx = batch.u.front().size();
  const double dx = 1.0 / static_cast<double>(nx - 1);
  const auto c = mode_coefficients(n, dx, form);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  const double zeta_weight = eps * c.flux / b;

  const Eigen::VectorXd t = as_vector(batch.times);
  const Eigen::VectorXd zeta = as_vector(batch.zeta);
  Eigen::VectorXd proj(count), integrand(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto idx = static_cast<Eigen::Index>(k);
    proj(idx) = mode_projection(batch.u[k], n);
    integrand(idx) = eps * c.flux * sign * batch.u[k](nx - 1) + eps * c.decay * proj(idx);
  }

  Regressors out;
  const double start = proj(0) - zeta_weight * zeta(0);
  out.f = (proj - zeta_weight * zeta).array() - start;
  out.f += cumulative_trapezoid(integrand, t);
  out.g1 = cumulative_trapezoid(proj, t);
  out.g2 = -zeta_weight * cumulative_trapezoid(zeta, t);
  return out;
}

ModeSystem assemble(const Batch& batch, int n, double b, double eps, RegressorForm form) {
  const Regressors r = regressors(batch, n, b, eps, form);
  const Eigen::VectorXd t = as_vector(batch.times);
  ModeSystem sys;
  sys.n = n;
  sys.Z << trapezoid(r.g1.cwiseProduct(r.f), t), trapezoid(r.g2.cwiseProduct(r.f), t);
  const double q2 = trapezoid(r.g1.cwiseProduct(r.g2), t);
  sys.G << trapezoid(r.g1.cwiseAbs2(), t), q2, q2, trapezoid(r.g2.cwiseAbs2(), t);
  return sys;
}

EstimateResult estimate(std::span<const ModeSystem> systems, const Estimate& prev,
                        const ThetaBox& box, double rank_tol) {
  if (systems.empty()) throw std::invalid_argument("estimate: no mode systems");
  if (!box.valid()) throw std::invalid_argument("estimate: empty parameter box");

  const auto rows = static_cast<Eigen::Index>(2 * systems.size());
  Eigen::MatrixXd A(rows, 2);
  Eigen::VectorXd z(rows);
  for (std::size_t k = 0; k < systems.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(2 * k);
    A.middleRows(r, 2) = systems[k].G;
    z.segment(r, 2) = systems[k].Z;
  }

  // Equilibrate columns so the rank decision does not depend on the scaling of
  // the two parameters.
  Eigen::Vector2d scale = A.colwise().norm().transpose();
  for (int j = 0; j < 2; ++j)
    if (scale(j) == 0.0) scale(j) = 1.0;
  const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();

  EstimateResult out;
  out.sigma_max = sv(0);
  out.sigma_min = sv(1);
  if (sv(0) > 0.0) out.rank = (sv(1) > rank_tol * sv(0)) ? 2 : 1;

  const Eigen::Vector2d p(prev.lambda_hat, prev.a_hat);
  Eigen::Vector2d ell = p;

  if (out.rank == 2) {
    const Eigen::Vector2d scaled = svd.solve(z);
    ell = scaled.cwiseQuotient(scale);
    out.value = box.clamp({ell(0), ell(1)});
    return out;
  }

  if (out.rank == 1) {
    // Solution set {ell : w . ell = c}; pick its point in the box closest to prev.
    // In scaled variables v . (scale * ell) = c, so the normal in ell is v * scale.
    Eigen::Vector2d w = svd.matrixV().col(0).cwiseProduct(scale);
    double c = svd.matrixU().col(0).dot(z) / sv(0);
    const double wn = w.norm();
    w /= wn;
    c /= wn;
    const Eigen::Vector2d dir(-w(1), w(0));
    const Eigen::Vector2d base = c * w;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    const double box_lo[2] = {box.lambda_lo, box.a_lo};
    const double box_hi[2] = {box.lambda_hi, box.a_hi};
    bool feasible = true;
    for (int j = 0; j < 2; ++j) {
      if (std::abs(dir(j)) < 1e-14) {
        if (base(j) < box_lo[j] - 1e-12 || base(j) > box_hi[j] + 1e-12) feasible = false;
        continue;
      }
      double a = (box_lo[j] - base(j)) / dir(j);
      double b = (box_hi[j] - base(j)) / dir(j);
      if (a > b) std::swap(a, b);
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    }
    if (feasible && lo <= hi) {
      const double s = std::clamp(dir.dot(p), lo, hi);
      ell = base + s * dir;
    } else {
      ell = p + (c - w.dot(p)) * w;
    }
  }
  out.value = box.clamp({ell(0), ell(1)});
  return out;
}

Estimate maybe_fix_initial_estimate(const Eigen::VectorXd& u0, double zeta0, const Estimate& est0,
                                    const InitialFixContext& ctx) {
  const bool u_zero = u0.size() == 0 || u0.cwiseAbs().maxCoeff() == 0.0;
  if (!u_zero || zeta0 == 0.0) return est0;

  const auto k2_at = [&ctx](const Estimate& e) {
    const KernelParams kp{e.lambda_hat, e.a_hat, ctx.eps, ctx.b, ctx.q, ctx.kappa};
    return compute_gains(kp, ctx.kernel_nx, ctx.scheme).k2;
  };
  constexpr double kSingularGain = 1e-9;
  if (std::abs(k2_at(est0)) >= kSingularGain) return est0;

  Estimate fixed = est0;
  const double mid = 0.5 * (ctx.box.lambda_lo + ctx.box.lambda_hi);
  fixed.lambda_hat = (mid != est0.lambda_hat) ? mid : ctx.box.lambda_lo;
  return fixed;
}

}  // namespace etbc
