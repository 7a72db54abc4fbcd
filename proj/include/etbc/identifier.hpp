#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "etbc/estimate.hpp"
#include "etbc/kernels.hpp"

namespace etbc {

/// Logged trajectory data over one identification window.
struct Batch {
  std::vector<double> times;           ///< strictly increasing sample instants
  std::vector<Eigen::VectorXd> u;      ///< u profiles on the plant grid
  std::vector<double> zeta;

  std::size_t size() const { return times.size(); }
  void push_back(double t, const Eigen::VectorXd& profile, double z) {
    times.push_back(t);
    u.push_back(profile);
    zeta.push_back(z);
  }
};

/// How the spatial coefficients of the mode identity are formed.
enum class RegressorForm {
  continuum,  ///< n pi and (n pi)^2, exact for the PDE itself
  grid,       ///< sin(n pi dx)/dx and 4 sin^2(n pi dx/2)/dx^2, exact for the discretised plant
};

/// f_n, g_{n,1}, g_{n,2} sampled at each batch time.
struct Regressors {
  Eigen::VectorXd f;
  Eigen::VectorXd g1;
  Eigen::VectorXd g2;
};

/// Normal equations Z = G theta of one mode.
struct ModeSystem {
  int n = 1;
  Eigen::Vector2d Z = Eigen::Vector2d::Zero();
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
};

/// Start of the data window: the earliest past event within N_tilde * T_max of the
/// newest entry of event_times (the candidate event). Throws std::logic_error if none.
double window_start(std::span<const double> event_times, int n_tilde, double T_max);

Regressors regressors(const Batch& batch, int n, double b, double eps,
                      RegressorForm form = RegressorForm::continuum);

ModeSystem assemble(const Batch& batch, int n, double b, double eps,
                    RegressorForm form = RegressorForm::continuum);

struct EstimateResult {
  Estimate value;
  int rank = 0;              ///< identifiable directions of the stacked system
  double sigma_min = 0.0;    ///< smallest singular value (column-equilibrated)
  double sigma_max = 0.0;
};

/// Minimum-distance update: least squares on the identifiable subspace of the
/// stacked systems, previous estimate on the rest, restricted to the box.
EstimateResult estimate(std::span<const ModeSystem> systems, const Estimate& prev,
                        const ThetaBox& box, double rank_tol = 1e-8);

/// Known data needed to evaluate K2 for a candidate initial estimate.
struct InitialFixContext {
  double eps = 1.0;
  double b = 1.0;
  double q = 0.0;
  double kappa = 0.0;
  ThetaBox box;
  Eigen::Index kernel_nx = 21;
  KernelScheme scheme = KernelScheme::paper;
};

/// Replace lambda_hat(0) when u0 == 0, zeta0 != 0 and K2 vanishes at the initial
/// estimate, so that the ODE stays controllable through the first event.
Estimate maybe_fix_initial_estimate(const Eigen::VectorXd& u0, double zeta0, const Estimate& est0,
                                    const InitialFixContext& ctx);

}  // namespace etbc
