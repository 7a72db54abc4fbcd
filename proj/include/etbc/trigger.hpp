#pragma once

#include <array>

#include <Eigen/Dense>

#include "etbc/estimate.hpp"
#include "etbc/kernels.hpp"
#include "etbc/plant.hpp"

namespace etbc {

/// Parameters of the dynamic event-triggering mechanism.
struct EtmParams {
  double xi = 1.1;       ///< threshold gain
  double T_max = 1.2;    ///< maximum dwell time (s)
  double eta = 15.0;     ///< decay rate of m
  double lambda_d = 20.0;
  std::array<double, 4> kappas{100.0, 100.0, 100.0, 100.0};  ///< weights on u(1)^2, u(0)^2, |u|^2, zeta^2
  double m0 = -500.0;

  bool operator==(const EtmParams&) const = default;
};

/// Throws std::invalid_argument unless every parameter has its required sign.
void check_etm_params(const EtmParams& p);

/// Held-input bookkeeping between two events.
struct TriggerState {
  double m = -1.0;
  double t_last = 0.0;
  Eigen::VectorXd u_sampled;
  double zeta_sampled = 0.0;
  double u_d = 0.0;
  GainSet gains;  ///< gains in force since t_last, K1 sampled on the plant grid
};

/// Resample the K1 profile of a gain set onto nx uniform nodes.
GainSet gains_on_grid(const GainSet& gains, Eigen::Index nx);

/// int_0^1 K1(1,y) u(y) dy + K2 zeta by trapezoid; K1 and u must share a grid.
double feedback(const Eigen::VectorXd& u, double zeta, const GainSet& gains);

/// Piecewise-constant input U_d computed from a state sample.
double held_input(const Eigen::VectorXd& u_sampled, double zeta_sampled, const GainSet& gains);

/// Continuous-in-state signal U_c: current state with the gains of the last event.
double continuous_input(const PlantState& s, const TriggerState& ts);

/// d(t) = U_c(t) - U_d, computed from the state drift since the last sample.
double deviation(const PlantState& s, const TriggerState& ts);

/// Right-hand side of m' without the -eta m term.
double m_forcing(const PlantState& s, double d, const EtmParams& p);

/// Advance m by dt with the forcing frozen: m e^{-eta dt} + F (1 - e^{-eta dt}) / eta.
/// Throws InvariantViolation if the result is not negative.
double step_m(double m, const PlantState& s, double d, const EtmParams& p, double dt);

/// True iff d^2 >= -xi m, or the maximum dwell time has elapsed.
bool check_trigger(double d, double m, double t, double t_last, const EtmParams& p);

// ---- dwell-time diagnostics -------------------------------------------

/// Known quantities that the derivative bound of d(t) depends on.
struct DesignContext {
  ThetaBox box;
  double q = 0.0;
  double eps = 1.0;
  double b = 1.0;
  double kappa = 0.0;
  Eigen::Index kernel_nx = 21;
  KernelScheme scheme = KernelScheme::paper;
};

/// Constants bounding (d')^2 by d^2, u(1)^2, u(0)^2, |u|^2 and zeta^2.
struct DerivativeBound {
  std::array<double, 5> eps{};  ///< eps1 .. eps5
  int samples = 0;              ///< estimates visited by the grid search
  /// Largest relative change of any constant when the y-grid is halved; K1_yy
  /// comes from second differences of a numerical kernel, so this is reported.
  double k1yy_sensitivity = 0.0;
};

/// Grid search of the five maxima over the box with resolution x resolution samples.
DerivativeBound lemma1_constants(const DesignContext& ctx, int resolution = 11);

struct DwellReport {
  std::array<double, 5> eps{};
  double n1 = 0.0;
  double n2 = 0.0;
  double n3 = 0.0;
  double tau_a = 0.0;
  double tau_min = 0.0;
};

/// int_0^1 ds / (n1 + n2 s + n3 s^2) by adaptive quadrature; needs n1 > 0, n2, n3 >= 0.
double dwell_integral(double n1, double n2, double n3);

/// Minimal dwell time estimate from eps1 and the ETM parameters.
DwellReport dwell_bound(const DerivativeBound& bound, const EtmParams& p);
DwellReport dwell_bound(double eps1, const EtmParams& p);

/// Lower bounds kappa_j = 2 eps_{j+1} / xi for the four state weights.
std::array<double, 4> suggest_kappas(const std::array<double, 5>& eps, double xi);

}  // namespace etbc
