#include "etbc/plant.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "etbc/errors.hpp"
#include "etbc/quadrature.hpp"

namespace etbc {

namespace {

constexpr double kBlowUp = 1e12;

void check_grid(const GridSpec& g) {
  if (g.nx < 3) throw std::invalid_argument("grid: nx must be at least 3");
  if (!(g.dt > 0.0)) throw std::invalid_argument("grid: dt must be positive");
}

}  // namespace

PlantStepper::PlantStepper(const PlantParams& params, const GridSpec& grid)
    : params_(params), grid_(grid) {
  check_grid(grid);
  if (!(params.eps > 0.0)) throw std::invalid_argument("plant: eps must be positive");
  if (params.b == 0.0) throw std::invalid_argument("plant: b must be nonzero");

  const Eigen::Index nx = grid.nx;
  const Eigen::Index n = nx - 1;
  const double dx = grid.dx();
  const double c = params.eps / (dx * dx);

  // Operator A, rows 0 and n carry the ghost-node closures.
  Eigen::VectorXd lower = Eigen::VectorXd::Zero(nx);
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(nx, -2.0 * c + params.lambda);
  Eigen::VectorXd upper = Eigen::VectorXd::Zero(nx);
  for (Eigen::Index i = 1; i < n; ++i) {
    lower(i) = c;
    upper(i) = c;
  }
  upper(0) = 2.0 * c;
  lower(n) = 2.0 * c;
  diag(n) = -2.0 * c - 2.0 * c * dx * params.q + params.lambda;

  const double half = 0.5 * grid.dt;
  ex_lower_ = half * lower;
  ex_upper_ = half * upper;
  ex_diag_ = Eigen::VectorXd::Ones(nx) + half * diag;

  im_lower_ = -half * lower;
  const Eigen::VectorXd im_diag = Eigen::VectorXd::Ones(nx) - half * diag;
  const Eigen::VectorXd im_upper = -half * upper;
  im_pivot_.resize(nx);
  im_upper_modified_.resize(nx);
  im_pivot_(0) = im_diag(0);
  im_upper_modified_(0) = im_upper(0) / im_pivot_(0);
  for (Eigen::Index i = 1; i < nx; ++i) {
    im_pivot_(i) = im_diag(i) - im_lower_(i) * im_upper_modified_(i - 1);
    im_upper_modified_(i) = im_upper(i) / im_pivot_(i);
  }
  input_weight_ = grid.dt * 2.0 * params.eps / dx;
}

PlantState PlantStepper::step(const PlantState& s, double u_d) const {
  const Eigen::Index nx = grid_.nx;
  if (s.u.size() != nx) throw std::invalid_argument("plant step: state size does not match grid");

  Eigen::VectorXd rhs(nx);
  rhs(0) = ex_diag_(0) * s.u(0) + ex_upper_(0) * s.u(1);
  for (Eigen::Index i = 1; i + 1 < nx; ++i)
    rhs(i) = ex_lower_(i) * s.u(i - 1) + ex_diag_(i) * s.u(i) + ex_upper_(i) * s.u(i + 1);
  rhs(nx - 1) = ex_lower_(nx - 1) * s.u(nx - 2) + ex_diag_(nx - 1) * s.u(nx - 1) + input_weight_ * u_d;

  PlantState next;
  next.t = s.t + grid_.dt;
  next.u.resize(nx);
  next.u(0) = rhs(0) / im_pivot_(0);
  for (Eigen::Index i = 1; i < nx; ++i)
    next.u(i) = (rhs(i) - im_lower_(i) * next.u(i - 1)) / im_pivot_(i);
  for (Eigen::Index i = nx - 2; i >= 0; --i) next.u(i) -= im_upper_modified_(i) * next.u(i + 1);

  const double half = 0.5 * grid_.dt;
  next.zeta = ((1.0 + half * params_.a) * s.zeta + half * params_.b * (s.u(0) + next.u(0))) /
              (1.0 - half * params_.a);

  const double peak = std::max(next.u.cwiseAbs().maxCoeff(), std::abs(next.zeta));
  if (!std::isfinite(peak) || peak > kBlowUp) {
    std::ostringstream msg;
    msg << "plant state diverged at t=" << next.t << " (max |state| = " << peak << ")";
    throw IntegrationOverflow(msg.str(), next.t);
  }
  return next;
}

PlantState step(const PlantState& s, const PlantParams& p, const GridSpec& g, double u_d) {
  return PlantStepper(p, g).step(s, u_d);
}

double l2_norm(const Eigen::VectorXd& u) {
  const double dx = 1.0 / static_cast<double>(u.size() - 1);
  return std::sqrt(trapezoid(u.array().square(), dx));
}

double l2_norm(const PlantState& s) { return l2_norm(s.u); }

double mode_projection(const Eigen::VectorXd& u, int n) {
  if (n < 1) throw std::invalid_argument("mode_projection: mode index must be >= 1");
  const Eigen::Index nx = u.size();
  const double dx = 1.0 / static_cast<double>(nx - 1);
  const Eigen::ArrayXd x = unit_grid(nx).array();
  return trapezoid((n * std::numbers::pi * x).sin() * u.array(), dx);
}

double mode_projection(const PlantState& s, int n) { return mode_projection(s.u, n); }

}  // namespace etbc
