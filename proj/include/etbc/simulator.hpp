#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "etbc/estimate.hpp"
#include "etbc/identifier.hpp"
#include "etbc/kernels.hpp"
#include "etbc/plant.hpp"
#include "etbc/trigger.hpp"

namespace etbc {

/// Closed-form initial profiles.
enum class InitialShape {
  zero,       ///< u0 = 0
  x2_sine,    ///< u0 = x^2 sin(n_bar pi x)
  sine,       ///< u0 = sin(n_bar pi x)
};

struct InitialCondition {
  InitialShape shape = InitialShape::x2_sine;
  int n_bar = 2;
  double zeta0 = 5.0;

  bool operator==(const InitialCondition&) const = default;
};

Eigen::VectorXd initial_profile(const InitialCondition& ic, Eigen::Index nx);

struct ScenarioConfig {
  PlantParams plant{1.5, 1.0, 1.0, 3.0, 5.0};
  ThetaBox box{0.0, 5.0, 0.0, 3.0};
  Estimate initial_estimate{2.5, 1.5};
  GridSpec grid;
  EtmParams etm;
  double kappa = 16.0;  ///< design gain of the ODE kernel
  int n_tilde = 5;
  int n_modes = 15;
  Eigen::Index kernel_nx = 21;
  KernelScheme scheme = KernelScheme::paper;
  RegressorForm regressor_form = RegressorForm::grid;
  double rank_tol = 1e-8;
  double horizon = 4.0;
  InitialCondition ic;
  std::uint64_t seed = 0;
  bool open_loop = false;  ///< force K1 = K2 = 0 (identifier still runs)

  bool operator==(const ScenarioConfig&) const = default;
};

/// One logged plant step, columns in CSV order.
struct TrajectoryRow {
  double t = 0.0;
  double zeta = 0.0;
  double u_norm = 0.0;
  double u0 = 0.0;
  double u1 = 0.0;
  double Ud = 0.0;
  double Uc = 0.0;
  double d2 = 0.0;    ///< after any event processing at this step
  double xi_m = 0.0;  ///< -xi m, the trigger threshold
  double m = 0.0;
};

enum class TriggerCause { threshold, max_dwell };

struct EventRecord {
  int index = 0;  ///< 1-based; t_0 = 0 is not an event
  double t = 0.0;
  double mu = 0.0;  ///< start of the identification window
  double dwell = 0.0;
  Estimate estimate;
  double Ud = 0.0;
  int rank = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double d2_pre = 0.0;  ///< d^2 that fired the event
  double xi_m = 0.0;
  TriggerCause cause = TriggerCause::threshold;
  bool gains_recomputed = false;
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;
  std::vector<EventRecord> events;
  Estimate initial_estimate;  ///< after the initial-estimate fix
  double initial_Ud = 0.0;
  int kernel_solves = 0;
};

struct Summary {
  int event_count = 0;
  double min_dwell = 0.0;
  double mean_dwell = 0.0;
  double max_dwell = 0.0;
  double final_u_norm = 0.0;
  double final_zeta_abs = 0.0;
  double peak = 0.0;  ///< max over the run of |u| + |zeta|
  double omega_rate = 0.0;  ///< slope of log Omega fitted on [1, horizon]
  std::vector<double> event_times;
  std::vector<Estimate> estimates;  ///< estimate after each event, starting with the initial one
};

/// Throws ConfigurationError on inconsistent sizes or parameters.
void check_config(const ScenarioConfig& cfg);

/// Closed-loop simulation over [0, horizon]. IntegrationOverflow propagates.
TrajectoryLog run(const ScenarioConfig& cfg);

/// Estimate in force at each logged row.
std::vector<Estimate> estimate_per_row(const TrajectoryLog& log);

/// Omega(t) = |u|^2 + zeta^2 + |m| + |theta - theta_hat(t)| per row.
std::vector<double> omega(const TrajectoryLog& log, const Estimate& true_theta);

/// Least-squares slope of log Omega against t over rows with t in [t0, t1].
double log_linear_slope(const TrajectoryLog& log, const std::vector<double>& values, double t0,
                        double t1);

Summary summarize(const TrajectoryLog& log, const ScenarioConfig& cfg);

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 edges
  std::vector<int> counts;

  /// Centre of the most populated bin (first one on ties).
  double mode() const;
};

Histogram histogram(const std::vector<double>& samples, int bins);

struct BatchMemberFailure {
  int n_bar = 0;
  std::string what;
};

struct BatchResult {
  std::vector<double> dwells;  ///< pooled inter-event times, member order
  Histogram hist;
  std::vector<BatchMemberFailure> failures;
  int members = 0;
};

/// Runs u0 = x^2 sin(n_bar pi x), zeta0 = zeta0 for n_bar = 1..members on worker threads.
BatchResult run_batch(const ScenarioConfig& base, int members = 100, double zeta0 = 0.2,
                      int bins = 50, unsigned threads = 0);

}  // namespace etbc
