#pragma once

#include "gainflow/analysis.hpp"
#include "gainflow/game.hpp"
#include "gainflow/integrator.hpp"
#include "gainflow/protocol.hpp"
#include "gainflow/scenario.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace gainflow {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

std::vector<std::string> csv_header(const Trajectory& traj);
void write_csv(const Trajectory& traj, std::ostream& out);
// Throws std::runtime_error when the file cannot be opened.
void write_csv(const Trajectory& traj, const std::string& path);
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

// Gnuplot commands plotting G and Gamma against t from a CSV file.
std::string gnuplot_script(const std::string& csv_path, const Trajectory& traj);

nlohmann::json to_json(const Trajectory& traj);
nlohmann::json to_json(const MonotonicityReport& r);
nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const StabilityReport& r);
nlohmann::json to_json(const SuiteReport& r);
nlohmann::json to_json(const StationarityReport& r);
nlohmann::json to_json(const AuditOutcome& r);

}  // namespace gainflow
