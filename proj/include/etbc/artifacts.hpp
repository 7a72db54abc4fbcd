#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "etbc/kernels.hpp"
#include "etbc/scenario.hpp"
#include "etbc/simulator.hpp"
#include "etbc/trigger.hpp"

namespace etbc {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kTrajectoryHeader = "t,zeta,u_norm,u0,u1,Ud,Uc,d2,xi_m,m";

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);
/// Throws std::runtime_error on a wrong header or malformed row.
std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in);

nlohmann::json events_json(const TrajectoryLog& log);
/// Events plus initial estimate and input; rows are left empty.
TrajectoryLog events_from_json(const nlohmann::json& j);

nlohmann::json summary_json(const Summary& s, const TrajectoryLog& log);

nlohmann::json dwell_report_json(const DwellReport& r, const DerivativeBound& b,
                                 const std::array<double, 4>& suggested);

/// Rows of (y, K1) with the scalar gains in a JSON header.
void write_kernel_csv(std::ostream& out, const GainSet& g);
nlohmann::json kernel_header_json(const GainSet& g);

void write_histogram_csv(std::ostream& out, const Histogram& h);

nlohmann::json validation_json(const ValidationReport& r);

/// trajectory.csv, events.json and summary.json under dir (created if needed).
void write_simulation_artifacts(const std::filesystem::path& dir, const TrajectoryLog& log,
                                const Summary& s);

}  // namespace etbc
