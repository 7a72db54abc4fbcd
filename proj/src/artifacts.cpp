#include "etbc/artifacts.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace etbc {

using nlohmann::json;

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << kTrajectoryHeader << '\n';
  for (const auto& r : rows)
    out << r.t << ',' << r.zeta << ',' << r.u_norm << ',' << r.u0 << ',' << r.u1 << ',' << r.Ud
        << ',' << r.Uc << ',' << r.d2 << ',' << r.xi_m << ',' << r.m << '\n';
  out.precision(old_precision);
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trajectory csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader)
    throw std::runtime_error("trajectory csv: unexpected header '" + line + "'");

  std::vector<TrajectoryRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream s(line);
    double v[10];
    for (int k = 0; k < 10; ++k) {
      std::string cell;
      if (!std::getline(s, cell, ',')) throw std::runtime_error("trajectory csv: short row at line " + std::to_string(lineno));
      try {
        v[k] = std::stod(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("trajectory csv: bad number '" + cell + "' at line " + std::to_string(lineno));
      }
    }
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
  }
  return rows;
}

namespace {

json estimate_json(const Estimate& e) { return {{"lambda_hat", e.lambda_hat}, {"a_hat", e.a_hat}}; }

Estimate estimate_from(const json& j) {
  return {j.at("lambda_hat").get<double>(), j.at("a_hat").get<double>()};
}

void check_schema(const json& j, const char* what) {
  if (!j.contains("schema") || j.at("schema").get<int>() != kSchemaVersion)
    throw std::runtime_error(std::string(what) + ": unsupported or missing schema version");
}

}  // namespace

json events_json(const TrajectoryLog& log) {
  json events = json::array();
  for (const auto& ev : log.events) {
    events.push_back({{"index", ev.index},
                      {"t_i", ev.t},
                      {"mu_i", ev.mu},
                      {"dwell", ev.dwell},
                      {"lambda_hat", ev.estimate.lambda_hat},
                      {"a_hat", ev.estimate.a_hat},
                      {"Ud", ev.Ud},
                      {"rank", ev.rank},
                      {"sigma_min", ev.sigma_min},
                      {"sigma_max", ev.sigma_max},
                      {"d2", ev.d2_pre},
                      {"xi_m", ev.xi_m},
                      {"cause", ev.cause == TriggerCause::threshold ? "threshold" : "max_dwell"},
                      {"gains_recomputed", ev.gains_recomputed}});
  }
  return {{"schema", kSchemaVersion},
          {"initial_estimate", estimate_json(log.initial_estimate)},
          {"initial_Ud", log.initial_Ud},
          {"events", events}};
}

TrajectoryLog events_from_json(const json& j) {
  check_schema(j, "events json");
  TrajectoryLog log;
  log.initial_estimate = estimate_from(j.at("initial_estimate"));
  log.initial_Ud = j.at("initial_Ud").get<double>();
  for (const auto& e : j.at("events")) {
    EventRecord ev;
    ev.index = e.at("index").get<int>();
    ev.t = e.at("t_i").get<double>();
    ev.mu = e.at("mu_i").get<double>();
    ev.dwell = e.at("dwell").get<double>();
    ev.estimate = estimate_from(e);
    ev.Ud = e.at("Ud").get<double>();
    ev.rank = e.at("rank").get<int>();
    ev.sigma_min = e.at("sigma_min").get<double>();
    ev.sigma_max = e.at("sigma_max").get<double>();
    ev.d2_pre = e.at("d2").get<double>();
    ev.xi_m = e.at("xi_m").get<double>();
    ev.cause = e.at("cause").get<std::string>() == "threshold" ? TriggerCause::threshold
                                                               : TriggerCause::max_dwell;
    ev.gains_recomputed = e.at("gains_recomputed").get<bool>();
    log.events.push_back(ev);
  }
  return log;
}

json summary_json(const Summary& s, const TrajectoryLog& log) {
  json estimates = json::array();
  for (const auto& e : s.estimates) estimates.push_back(estimate_json(e));
  return {{"schema", kSchemaVersion},
          {"event_count", s.event_count},
          {"min_dwell", s.min_dwell},
          {"mean_dwell", s.mean_dwell},
          {"max_dwell", s.max_dwell},
          {"final_u_norm", s.final_u_norm},
          {"final_zeta_abs", s.final_zeta_abs},
          {"peak", s.peak},
          {"omega_rate", s.omega_rate},
          {"kernel_solves", log.kernel_solves},
          {"event_times", s.event_times},
          {"estimates", estimates}};
}

json dwell_report_json(const DwellReport& r, const DerivativeBound& b,
                       const std::array<double, 4>& suggested) {
  return {{"schema", kSchemaVersion},
          {"eps", r.eps},
          {"n1", r.n1},
          {"n2", r.n2},
          {"n3", r.n3},
          {"tau_a", r.tau_a},
          {"tau_min", r.tau_min},
          {"samples", b.samples},
          {"k1yy_sensitivity", b.k1yy_sensitivity},
          {"suggested_kappas", suggested}};
}

void write_kernel_csv(std::ostream& out, const GainSet& g) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "y,K1\n";
  const Eigen::Index n = g.k1.size();
  for (Eigen::Index j = 0; j < n; ++j)
    out << static_cast<double>(j) / static_cast<double>(n - 1) << ',' << g.k1(j) << '\n';
  out.precision(old_precision);
}

json kernel_header_json(const GainSet& g) {
  return {{"schema", kSchemaVersion}, {"lambda_hat", g.lambda_hat}, {"a_hat", g.a_hat},
          {"r", g.r},                 {"K2", g.k2},                 {"nx", g.k1.size()}};
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    out << h.edges[k] << ',' << h.edges[k + 1] << ',' << h.counts[k] << '\n';
}

json validation_json(const ValidationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  return {{"schema", kSchemaVersion}, {"ok", r.ok()}, {"checks", checks}};
}

void write_simulation_artifacts(const std::filesystem::path& dir, const TrajectoryLog& log,
                                const Summary& s) {
  std::filesystem::create_directories(dir);
  const auto open = [&dir](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("trajectory.csv");
    write_trajectory_csv(out, log.rows);
  }
  {
    auto out = open("events.json");
    out << events_json(log).dump(2) << '\n';
  }
  {
    auto out = open("summary.json");
    out << summary_json(s, log).dump(2) << '\n';
  }
}

}  // namespace etbc
