#pragma once

#include "gainflow/analysis.hpp"
#include "gainflow/dynamics.hpp"
#include "gainflow/game.hpp"
#include "gainflow/integrator.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gainflow {

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct AuditRequest {
  enum class Kind { monotonicity, convergence, decay };
  Kind kind = Kind::monotonicity;
  std::string series = "G";
  std::optional<double> budget;
  std::vector<Verdict> expect;  // empty: no expectation
  double radius = 1e-3;
  double min_fraction = 0.99;
  bool require_toward_zero = false;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::string game_type;
  std::variant<PopulationGame, MultiPopulationGame> game;
  std::vector<MeanDynamic> dynamics;
  std::vector<Vector> initial_states;
  IntegratorConfig integrator;
  std::vector<std::string> aux;
  std::vector<AuditRequest> audits;
  std::string csv_path;
  std::string json_path;
  std::string plot_path;

  bool multi_population() const { return std::holds_alternative<MultiPopulationGame>(game); }
};

// Throws ScenarioError listing every problem found, each with its key path.
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<text>");

// Seed after applying the GAINFLOW_SEED override.
std::uint64_t effective_seed(const Scenario& scenario);

Trajectory run_scenario(const Scenario& scenario);

struct AuditOutcome {
  AuditRequest request;
  std::optional<MonotonicityReport> monotonicity;
  std::optional<ConvergenceReport> convergence;
  bool passed = true;
};

std::vector<AuditOutcome> run_audits(const Scenario& scenario, const Trajectory& traj);

}  // namespace gainflow
