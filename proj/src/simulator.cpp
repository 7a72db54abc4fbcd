#include "etbc/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>
#include <utility>

#include "etbc/errors.hpp"
#include "etbc/quadrature.hpp"

namespace etbc {

Eigen::VectorXd initial_profile(const InitialCondition& ic, Eigen::Index nx) {
  const Eigen::ArrayXd x = unit_grid(nx).array();
  const double k = ic.n_bar * std::numbers::pi;
  switch (ic.shape) {
    case InitialShape::zero:
      return Eigen::VectorXd::Zero(nx);
    case InitialShape::x2_sine:
      return (x.square() * (k * x).sin()).matrix();
    case InitialShape::sine:
      return (k * x).sin().matrix();
  }
  throw std::invalid_argument("initial_profile: unknown shape");
}

void check_config(const ScenarioConfig& cfg) {
  const auto fail = [](const std::string& what) { throw ConfigurationError(what); };
  if (cfg.grid.nx < 3) fail("grid.nx must be at least 3");
  if (!(cfg.grid.dt > 0.0)) fail("grid.dt must be positive");
  if (cfg.kernel_nx < 4) fail("grid.kernel_nx must be at least 4");
  if (!(cfg.horizon > 0.0)) fail("horizon must be positive");
  if (cfg.n_tilde < 1) fail("identifier.n_tilde must be >= 1");
  if (cfg.n_modes < 1) fail("identifier.n_modes must be >= 1");
  if (!(cfg.rank_tol > 0.0)) fail("identifier.rank_tol must be positive");
  if (!cfg.box.valid()) fail("bounds: lower bound exceeds upper bound");
  if (!(cfg.plant.eps > 0.0)) fail("plant.eps must be positive");
  if (cfg.plant.b == 0.0) fail("plant.b must be nonzero");
  if (cfg.ic.n_bar < 0) fail("initial.n_bar must be non-negative");
  try {
    check_etm_params(cfg.etm);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  const double a_hi = cfg.plant.b > 0.0 ? cfg.box.a_hi : cfg.box.a_lo;
  if (!(cfg.plant.b * cfg.kappa - a_hi > 0.0)) {
    std::ostringstream msg;
    msg << "kappa=" << cfg.kappa << " gives b*kappa - a_hat <= 0 inside the box";
    fail(msg.str());
  }
}

namespace {

class GainCache {
 public:
  GainCache(const ScenarioConfig& cfg) : cfg_(cfg) {}

  const GainSet& get(const Estimate& e) {
    const auto key = std::make_pair(e.lambda_hat, e.a_hat);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    GainSet g;
    if (cfg_.open_loop) {
      g.k1 = Eigen::VectorXd::Zero(cfg_.grid.nx);
      g.lambda_hat = e.lambda_hat;
      g.a_hat = e.a_hat;
    } else {
      const KernelParams kp{e.lambda_hat, e.a_hat, cfg_.plant.eps, cfg_.plant.b, cfg_.plant.q,
                            cfg_.kappa};
      g = gains_on_grid(compute_gains(kp, cfg_.kernel_nx, cfg_.scheme), cfg_.grid.nx);
      ++solves_;
    }
    return cache_.emplace(key, std::move(g)).first->second;
  }

  int solves() const { return solves_; }

 private:
  const ScenarioConfig& cfg_;
  std::map<std::pair<double, double>, GainSet> cache_;
  int solves_ = 0;
};

TrajectoryRow make_row(const PlantState& s, const TriggerState& ts, double d, const EtmParams& p) {
  TrajectoryRow r;
  r.t = s.t;
  r.zeta = s.zeta;
  r.u_norm = l2_norm(s);
  r.u0 = s.u(0);
  r.u1 = s.u(s.u.size() - 1);
  r.Ud = ts.u_d;
  r.Uc = continuous_input(s, ts);
  r.d2 = d * d;
  r.xi_m = -p.xi * ts.m;
  r.m = ts.m;
  return r;
}

}  // namespace

TrajectoryLog run(const ScenarioConfig& cfg) {
  check_config(cfg);
  const PlantStepper stepper(cfg.plant, cfg.grid);
  const EtmParams& etm = cfg.etm;

  PlantState s;
  s.u = initial_profile(cfg.ic, cfg.grid.nx);
  s.zeta = cfg.ic.zeta0;
  s.t = 0.0;

  TrajectoryLog log;
  Estimate est = cfg.initial_estimate;
  if (!cfg.open_loop) {
    const InitialFixContext fix{cfg.plant.eps, cfg.plant.b, cfg.plant.q, cfg.kappa,
                                cfg.box,       cfg.kernel_nx, cfg.scheme};
    est = maybe_fix_initial_estimate(s.u, s.zeta, est, fix);
  }
  log.initial_estimate = est;

  GainCache cache(cfg);
  TriggerState ts;
  ts.m = etm.m0;
  ts.t_last = 0.0;
  ts.gains = cache.get(est);
  ts.u_sampled = s.u;
  ts.zeta_sampled = s.zeta;
  ts.u_d = held_input(s.u, s.zeta, ts.gains);
  log.initial_Ud = ts.u_d;

  Batch window;
  window.push_back(s.t, s.u, s.zeta);
  std::vector<double> event_times{0.0};

  double d = 0.0;
  const auto steps = static_cast<long>(std::llround(cfg.horizon / cfg.grid.dt));
  log.rows.reserve(static_cast<std::size_t>(steps) + 1);
  log.rows.push_back(make_row(s, ts, d, etm));

  std::vector<ModeSystem> systems(static_cast<std::size_t>(cfg.n_modes));
  for (long k = 1; k <= steps; ++k) {
    const double m_next = step_m(ts.m, s, d, etm, cfg.grid.dt);
    s = stepper.step(s, ts.u_d);
    s.t = static_cast<double>(k) * cfg.grid.dt;
    ts.m = m_next;
    window.push_back(s.t, s.u, s.zeta);

    d = deviation(s, ts);
    if (check_trigger(d, ts.m, s.t, ts.t_last, etm)) {
      EventRecord ev;
      ev.index = static_cast<int>(log.events.size()) + 1;
      ev.t = s.t;
      ev.dwell = s.t - ts.t_last;
      ev.d2_pre = d * d;
      ev.xi_m = -etm.xi * ts.m;
      ev.cause = d * d >= -etm.xi * ts.m ? TriggerCause::threshold : TriggerCause::max_dwell;

      event_times.push_back(s.t);
      ev.mu = window_start(event_times, cfg.n_tilde, etm.T_max);
      const auto first = std::lower_bound(window.times.begin(), window.times.end(), ev.mu - 1e-12);
      const auto drop = first - window.times.begin();
      window.times.erase(window.times.begin(), first);
      window.u.erase(window.u.begin(), window.u.begin() + drop);
      window.zeta.erase(window.zeta.begin(), window.zeta.begin() + drop);

      for (int n = 1; n <= cfg.n_modes; ++n)
        systems[static_cast<std::size_t>(n - 1)] =
            assemble(window, n, cfg.plant.b, cfg.plant.eps, cfg.regressor_form);
      const EstimateResult res = estimate(systems, est, cfg.box, cfg.rank_tol);
      ev.rank = res.rank;
      ev.sigma_min = res.sigma_min;
      ev.sigma_max = res.sigma_max;
      if (!(res.value == est)) {
        est = res.value;
        const int before = cache.solves();
        ts.gains = cache.get(est);
        ev.gains_recomputed = cache.solves() != before;
      }

      ts.u_sampled = s.u;
      ts.zeta_sampled = s.zeta;
      ts.t_last = s.t;
      ts.u_d = held_input(s.u, s.zeta, ts.gains);
      d = deviation(s, ts);

      ev.estimate = est;
      ev.Ud = ts.u_d;
      log.events.push_back(ev);
    }
    log.rows.push_back(make_row(s, ts, d, etm));
  }
  log.kernel_solves = cache.solves();
  return log;
}

std::vector<Estimate> estimate_per_row(const TrajectoryLog& log) {
  std::vector<Estimate> out;
  out.reserve(log.rows.size());
  Estimate current = log.initial_estimate;
  std::size_t next = 0;
  for (const auto& row : log.rows) {
    while (next < log.events.size() && log.events[next].t <= row.t + 1e-12)
      current = log.events[next++].estimate;
    out.push_back(current);
  }
  return out;
}

std::vector<double> omega(const TrajectoryLog& log, const Estimate& true_theta) {
  const auto est = estimate_per_row(log);
  std::vector<double> out(log.rows.size());
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    const auto& r = log.rows[k];
    const double err = std::hypot(true_theta.lambda_hat - est[k].lambda_hat,
                                  true_theta.a_hat - est[k].a_hat);
    out[k] = r.u_norm * r.u_norm + r.zeta * r.zeta + std::abs(r.m) + err;
  }
  return out;
}

double log_linear_slope(const TrajectoryLog& log, const std::vector<double>& values, double t0,
                        double t1) {
  if (values.size() != log.rows.size())
    throw std::invalid_argument("log_linear_slope: one value per row expected");
  double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double t = log.rows[k].t;
    if (t < t0 - 1e-12 || t > t1 + 1e-12 || !(values[k] > 0.0)) continue;
    const double y = std::log(values[k]);
    n += 1.0;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double den = n * stt - st * st;
  if (n < 2.0 || den == 0.0) throw std::invalid_argument("log_linear_slope: fewer than two samples");
  return (n * sty - st * sy) / den;
}

Summary summarize(const TrajectoryLog& log, const ScenarioConfig& cfg) {
  Summary s;
  s.event_count = static_cast<int>(log.events.size());
  s.estimates.push_back(log.initial_estimate);
  if (!log.events.empty()) {
    s.min_dwell = log.events.front().dwell;
    double total = 0.0;
    for (const auto& ev : log.events) {
      s.min_dwell = std::min(s.min_dwell, ev.dwell);
      s.max_dwell = std::max(s.max_dwell, ev.dwell);
      total += ev.dwell;
      s.event_times.push_back(ev.t);
      s.estimates.push_back(ev.estimate);
    }
    s.mean_dwell = total / static_cast<double>(log.events.size());
  }
  if (!log.rows.empty()) {
    s.final_u_norm = log.rows.back().u_norm;
    s.final_zeta_abs = std::abs(log.rows.back().zeta);
    for (const auto& r : log.rows) s.peak = std::max(s.peak, r.u_norm + std::abs(r.zeta));
  }
  const Estimate truth{cfg.plant.lambda, cfg.plant.a};
  const double t0 = std::min(1.0, 0.25 * cfg.horizon);
  try {
    s.omega_rate = log_linear_slope(log, omega(log, truth), t0, cfg.horizon);
  } catch (const std::invalid_argument&) {
    s.omega_rate = 0.0;
  }
  return s;
}

double Histogram::mode() const {
  if (counts.empty()) return 0.0;
  const auto it = std::max_element(counts.begin(), counts.end());
  const auto k = static_cast<std::size_t>(it - counts.begin());
  return 0.5 * (edges[k] + edges[k + 1]);
}

Histogram histogram(const std::vector<double>& samples, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  if (samples.empty()) {
    h.edges.assign(static_cast<std::size_t>(bins) + 1, 0.0);
    return h;
  }
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;
  for (int k = 0; k <= bins; ++k) h.edges.push_back(lo + k * width);
  h.edges.back() = hi;
  for (double v : samples) {
    auto k = static_cast<int>((v - lo) / width);
    k = std::clamp(k, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(k)];
  }
  return h;
}

BatchResult run_batch(const ScenarioConfig& base, int members, double zeta0, int bins,
                      unsigned threads) {
  if (members < 1) throw std::invalid_argument("run_batch: need at least one member");
  check_config(base);

  struct Outcome {
    std::vector<double> dwells;
    std::string error;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(members));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next++; i < members; i = next++) {
      ScenarioConfig cfg = base;
      cfg.ic.shape = InitialShape::x2_sine;
      cfg.ic.n_bar = i + 1;
      cfg.ic.zeta0 = zeta0;
      auto& out = outcomes[static_cast<std::size_t>(i)];
      try {
        const TrajectoryLog log = run(cfg);
        for (const auto& ev : log.events) out.dwells.push_back(ev.dwell);
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(members));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  BatchResult result;
  result.members = members;
  for (int i = 0; i < members; ++i) {
    const auto& o = outcomes[static_cast<std::size_t>(i)];
    if (!o.error.empty()) {
      result.failures.push_back({i + 1, o.error});
      continue;
    }
    result.dwells.insert(result.dwells.end(), o.dwells.begin(), o.dwells.end());
  }
  result.hist = histogram(result.dwells, bins);
  return result;
}

}  // namespace etbc
