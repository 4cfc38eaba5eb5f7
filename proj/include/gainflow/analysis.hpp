#pragma once

#include "gainflow/common.hpp"
#include "gainflow/dynamics.hpp"
#include "gainflow/game.hpp"
#include "gainflow/integrator.hpp"

#include <string>
#include <vector>

namespace gainflow {

enum class Verdict { monotone, monotone_up_to_transients, non_monotone };
std::string to_string(Verdict v);

struct MonotonicityReport {
  std::string series;
  double budget = 0.0;
  std::size_t intervals = 0;
  // Record intervals on which the series increased.
  std::size_t violation_count = 0;
  // Largest increase rate (dS/dt) over all intervals, 0 if none.
  double max_violation = 0.0;
  // Isolated single-interval increases with rate within the budget.
  std::size_t transient_count = 0;
  std::size_t longest_increase_run = 0;
  Verdict verdict = Verdict::monotone;

  // Decay bound dG/dt <= H + budget; only filled for series G.
  bool decay_checked = false;
  std::size_t decay_satisfied = 0;
  double decay_fraction = 1.0;
  // Final value below max(1e-6, 1e-3 initial value).
  bool toward_zero = false;
  double initial_value = 0.0;
  double final_value = 0.0;
};

struct ConvergenceReport {
  double final_gap = 0.0;
  double final_distance = 0.0;
  double first_entry_time = -1.0;  // -1 when never within the radius
  double radius = 0.0;
  bool converged = false;
};

// 10 dt sup ||DF||_inf over the recorded states.
double default_budget(const Trajectory& traj, const PopulationGame& game);
double default_budget(const Trajectory& traj, const MultiPopulationGame& game);

MonotonicityReport audit_monotonicity(const Trajectory& traj, const std::string& series,
                                      double budget);
ConvergenceReport audit_convergence(const Trajectory& traj, const Vector& target, double radius);
// Multi-population runs with an aggregate target: distance of sum_p x^p.
ConvergenceReport audit_aggregate_convergence(const Trajectory& traj, const Vector& aggregate,
                                              double radius);

struct PropertyOutcome {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> counterexamples;  // first few, as text
  bool passed() const { return failures == 0; }
};

struct SuiteReport {
  std::string protocol;
  std::size_t actions = 0;
  std::size_t trials = 0;
  std::size_t smooth_trials = 0;
  std::vector<PropertyOutcome> properties;
  bool all_pass() const;
  const PropertyOutcome& property(const std::string& name) const;
};

SuiteReport run_property_suite(const RevisionProtocol& protocol, std::uint64_t seed,
                               std::size_t trial_count);

struct StationarityMismatch {
  Vector state;
  double field_norm = 0.0;
  double gap = 0.0;
};

struct StationarityReport {
  std::size_t states = 0;
  std::vector<StationarityMismatch> mismatches;
};

StationarityReport check_stationarity_nash(const PopulationGame& game, const MeanDynamic& dyn,
                                           const std::vector<SimplexState>& states);

}  // namespace gainflow
